#pragma once

#include <stdexcept>

#include "sear/tensor.hpp"

namespace sear::losses {

// Weights of the joint objective: concealer minimizes
// alpha * Loss_self + beta * Loss_adv, the supervisor minimizes
// -lambda * Loss_adv.
struct LossWeights {
    double alpha = 2.0;
    double beta = 3.0;
    double lambda = 0.5;

    void validate() const {
        if (alpha <= 0 || beta <= 0 || lambda <= 0)
            throw std::invalid_argument("loss weights must be strictly positive");
    }
};

constexpr double kProbEps = 1e-7;  // clamp for the BCE logarithms

// Pseudo label for the pretext task: i_p = delta (*) mask, the mask
// broadcast across channels. Treated as a constant target downstream.
Tensor make_pseudo_label(const Tensor& delta, const Tensor& mask);

// The scalar losses are templated so that training runs in float while
// the finite-difference gradient checks run in double.

// Mean |i_p - delta| over all pixels and channels; zero wherever mask=1,
// |delta| restricted to pristine pixels elsewhere.
template <typename T>
T pretext_loss_t(const T* delta, const float* mask, int channels, int hw);

// L2 norm of the perturbation: sqrt(sum delta^2) over one image.
template <typename T>
T hinge_loss_t(const T* delta, size_t n);

// Mean binary cross-entropy with probabilities clamped to
// [kProbEps, 1-kProbEps].
template <typename T>
T bce_t(const T* pred, const float* target, size_t n);

// Gradients w.r.t. delta / pred. Each *adds* into grad scaled by `scale`
// so batch means reduce to per-image seeds of 1/B.
template <typename T>
void pretext_loss_grad_t(const T* delta, const float* mask, int channels, int hw, T scale, T* grad);
template <typename T>
void hinge_loss_grad_t(const T* delta, size_t n, T scale, T* grad);
template <typename T>
void bce_grad_t(const T* pred, const float* target, size_t n, T scale, T* grad);

// Tensor front ends (float path used by training).
double pretext_loss(const Tensor& delta, const Tensor& mask);
double hinge_loss(const Tensor& delta);
double self_loss(const Tensor& delta, const Tensor& mask);      // pretext + hinge
double adversarial_loss(const Tensor& pred, const Tensor& gt);  // -BCE, always <= 0
double bce(const Tensor& pred, const Tensor& gt);

void pretext_loss_grad(const Tensor& delta, const Tensor& mask, float scale, Tensor& grad);
void hinge_loss_grad(const Tensor& delta, float scale, Tensor& grad);
// gradient of BCE itself; for Loss_adv = -BCE pass a negative scale
void bce_grad(const Tensor& pred, const Tensor& gt, float scale, Tensor& grad);

// Eq-style combinations.
inline double concealer_total(double self_val, double adv_val, const LossWeights& w) {
    return w.alpha * self_val + w.beta * adv_val;
}
inline double supervisor_total(double adv_val, const LossWeights& w) { return -w.lambda * adv_val; }

}  // namespace sear::losses
