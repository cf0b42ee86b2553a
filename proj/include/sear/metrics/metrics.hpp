#pragma once

#include <optional>
#include <vector>

#include "sear/tensor.hpp"

namespace sear::metrics {

// prob > threshold -> 1 (strict)
Tensor binarize(const Tensor& pred, float threshold = 0.5f);

// Harmonic mean of pixel precision and recall. Degenerate cases: both
// masks empty -> 1 (a correct all-pristine prediction), exactly one
// empty -> 0.
double pixel_f1(const Tensor& pred, const Tensor& gt);

// (f1_ori - f1_anti) / f1_ori; callers must exclude f1_ori == 0.
double attack_rate(double f1_ori, double f1_anti);

// F1 of the bitwise-inverted prediction; low values mean the attack did
// not just flip the mask.
double f1_reverse(const Tensor& pred, const Tensor& gt);

// On the 0..255 scale after clamping and rounding; identical images
// report the 99 dB cap.
double psnr(const Tensor& a, const Tensor& b);

// Gaussian-window SSIM: window 11, sigma 1.5, K1=0.01, K2=0.03, dynamic
// range 255, valid windows only, averaged over positions and channels.
double ssim(const Tensor& a, const Tensor& b);

// Normalized co-occurrence matrix (levels x levels, row-major):
// grayscale conversion, quantization to `levels`, symmetric accumulation
// at `offset` (dy,dx). Entries sum to 1.
std::vector<double> glcm_matrix(const Tensor& image, int levels = 32, std::pair<int, int> offset = {0, 1});

// contrast = sum p(i,j) (i-j)^2 over the matrix above
double glcm_contrast(const Tensor& image, int levels = 32, std::pair<int, int> offset = {0, 1});

struct GlcmHistogram {
    std::vector<double> bin_left, bin_right;
    std::vector<long> count;
    long total = 0;
};

// Histogram of contrast(original) - contrast(anti) over pairs.
GlcmHistogram glcm_diff_histogram(const std::vector<std::pair<Tensor, Tensor>>& pairs, int bins = 21,
                                  double lo = -2.0, double hi = 2.0);

// |delta|*255 statistics split by region; a side with no pixels reports
// nullopt rather than zero.
struct PerturbationStats {
    std::optional<double> mean_tampered, mean_pristine;
    std::optional<double> var_tampered, var_pristine;
};
PerturbationStats perturbation_stats(const Tensor& delta, const Tensor& mask);

}  // namespace sear::metrics
