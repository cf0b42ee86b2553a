#include "sear/losses.hpp"

#include <cmath>

namespace sear::losses {

Tensor make_pseudo_label(const Tensor& delta, const Tensor& mask) {
    if (mask.channels() != 1 || mask.height() != delta.height() || mask.width() != delta.width())
        throw std::invalid_argument("make_pseudo_label: mask must be {1,H,W} matching delta");
    Tensor out = delta;
    const int hw = delta.height() * delta.width();
    for (int c = 0; c < delta.channels(); ++c) {
        float* p = out.plane(c);
        const float* m = mask.data();
        for (int i = 0; i < hw; ++i) p[i] *= m[i];
    }
    return out;
}

template <typename T>
T pretext_loss_t(const T* delta, const float* mask, int channels, int hw) {
    T sum = 0;
    for (int c = 0; c < channels; ++c) {
        const T* d = delta + static_cast<size_t>(c) * hw;
        for (int i = 0; i < hw; ++i) {
            const T ip = d[i] * static_cast<T>(mask[i]);
            sum += std::abs(ip - d[i]);
        }
    }
    return sum / static_cast<T>(static_cast<size_t>(channels) * hw);
}

template <typename T>
T hinge_loss_t(const T* delta, size_t n) {
    T ss = 0;
    for (size_t i = 0; i < n; ++i) ss += delta[i] * delta[i];
    return std::sqrt(ss);
}

template <typename T>
T bce_t(const T* pred, const float* target, size_t n) {
    const T lo = static_cast<T>(kProbEps), hi = static_cast<T>(1.0 - kProbEps);
    T sum = 0;
    for (size_t i = 0; i < n; ++i) {
        const T p = std::min(hi, std::max(lo, pred[i]));
        const T t = static_cast<T>(target[i]);
        sum -= t * std::log(p) + (1 - t) * std::log(1 - p);
    }
    return sum / static_cast<T>(n);
}

template <typename T>
void pretext_loss_grad_t(const T* delta, const float* mask, int channels, int hw, T scale, T* grad) {
    // d/d delta of mean |stop_grad(delta*m) - delta| = sign(delta)/N where
    // m=0, and 0 where m=1 (the pseudo label is a constant target)
    const T inv = scale / static_cast<T>(static_cast<size_t>(channels) * hw);
    for (int c = 0; c < channels; ++c) {
        const T* d = delta + static_cast<size_t>(c) * hw;
        T* g = grad + static_cast<size_t>(c) * hw;
        for (int i = 0; i < hw; ++i) {
            if (mask[i] != 0.0f) continue;
            if (d[i] > 0)
                g[i] += inv;
            else if (d[i] < 0)
                g[i] -= inv;
        }
    }
}

template <typename T>
void hinge_loss_grad_t(const T* delta, size_t n, T scale, T* grad) {
    const T h = hinge_loss_t(delta, n);
    if (h <= 0) return;  // subgradient 0 at the origin
    const T inv = scale / h;
    for (size_t i = 0; i < n; ++i) grad[i] += inv * delta[i];
}

template <typename T>
void bce_grad_t(const T* pred, const float* target, size_t n, T scale, T* grad) {
    const T lo = static_cast<T>(kProbEps), hi = static_cast<T>(1.0 - kProbEps);
    const T inv = scale / static_cast<T>(n);
    for (size_t i = 0; i < n; ++i) {
        if (pred[i] < lo || pred[i] > hi) continue;  // clamped: no gradient
        const T p = pred[i];
        const T t = static_cast<T>(target[i]);
        grad[i] += inv * (-t / p + (1 - t) / (1 - p));
    }
}

template float pretext_loss_t<float>(const float*, const float*, int, int);
template double pretext_loss_t<double>(const double*, const float*, int, int);
template float hinge_loss_t<float>(const float*, size_t);
template double hinge_loss_t<double>(const double*, size_t);
template float bce_t<float>(const float*, const float*, size_t);
template double bce_t<double>(const double*, const float*, size_t);
template void pretext_loss_grad_t<float>(const float*, const float*, int, int, float, float*);
template void pretext_loss_grad_t<double>(const double*, const float*, int, int, double, double*);
template void hinge_loss_grad_t<float>(const float*, size_t, float, float*);
template void hinge_loss_grad_t<double>(const double*, size_t, double, double*);
template void bce_grad_t<float>(const float*, const float*, size_t, float, float*);
template void bce_grad_t<double>(const double*, const float*, size_t, double, double*);

namespace {
// scalar losses accumulate in double regardless of the tensor dtype
std::vector<double> widen(const Tensor& t) { return std::vector<double>(t.data(), t.data() + t.numel()); }
}  // namespace

double pretext_loss(const Tensor& delta, const Tensor& mask) {
    if (mask.height() != delta.height() || mask.width() != delta.width())
        throw std::invalid_argument("pretext_loss: shape mismatch");
    return pretext_loss_t<double>(widen(delta).data(), mask.data(), delta.channels(),
                                  delta.height() * delta.width());
}

double hinge_loss(const Tensor& delta) { return hinge_loss_t<double>(widen(delta).data(), delta.numel()); }

double self_loss(const Tensor& delta, const Tensor& mask) {
    return pretext_loss(delta, mask) + hinge_loss(delta);
}

double bce(const Tensor& pred, const Tensor& gt) {
    check_same_shape(pred, gt, "bce");
    return bce_t<double>(widen(pred).data(), gt.data(), pred.numel());
}

double adversarial_loss(const Tensor& pred, const Tensor& gt) { return -bce(pred, gt); }

void pretext_loss_grad(const Tensor& delta, const Tensor& mask, float scale, Tensor& grad) {
    pretext_loss_grad_t(delta.data(), mask.data(), delta.channels(), delta.height() * delta.width(), scale,
                        grad.data());
}

void hinge_loss_grad(const Tensor& delta, float scale, Tensor& grad) {
    hinge_loss_grad_t(delta.data(), delta.numel(), scale, grad.data());
}

void bce_grad(const Tensor& pred, const Tensor& gt, float scale, Tensor& grad) {
    bce_grad_t(pred.data(), gt.data(), pred.numel(), scale, grad.data());
}

}  // namespace sear::losses
