#include "sear/metrics/metrics.hpp"

#include <cmath>

namespace sear::metrics {

Tensor binarize(const Tensor& pred, float threshold) {
    Tensor out = pred;
    for (size_t i = 0; i < out.numel(); ++i) out[i] = out[i] > threshold ? 1.0f : 0.0f;
    return out;
}

double pixel_f1(const Tensor& pred, const Tensor& gt) {
    check_same_shape(pred, gt, "pixel_f1");
    long tp = 0, fp = 0, fn = 0;
    for (size_t i = 0; i < pred.numel(); ++i) {
        const bool p = pred[i] != 0.0f, g = gt[i] != 0.0f;
        tp += p && g;
        fp += p && !g;
        fn += !p && g;
    }
    if (tp + fp == 0 && tp + fn == 0) return 1.0;  // both all-pristine
    if (tp == 0) return 0.0;
    const double precision = static_cast<double>(tp) / (tp + fp);
    const double recall = static_cast<double>(tp) / (tp + fn);
    return 2.0 * precision * recall / (precision + recall);
}

double attack_rate(double f1_ori, double f1_anti) {
    if (f1_ori <= 0.0) throw std::invalid_argument("attack_rate: f1_ori must be > 0");
    return (f1_ori - f1_anti) / f1_ori;
}

double f1_reverse(const Tensor& pred, const Tensor& gt) {
    Tensor reversed = pred;
    for (size_t i = 0; i < reversed.numel(); ++i) reversed[i] = 1.0f - reversed[i];
    return pixel_f1(reversed, gt);
}

namespace {
inline int to_u8(float v) { return static_cast<int>(std::lround(std::min(1.0f, std::max(0.0f, v)) * 255.0f)); }
}  // namespace

double psnr(const Tensor& a, const Tensor& b) {
    check_same_shape(a, b, "psnr");
    double se = 0.0;
    for (size_t i = 0; i < a.numel(); ++i) {
        const double d = to_u8(a[i]) - to_u8(b[i]);
        se += d * d;
    }
    const double mse = se / static_cast<double>(a.numel());
    if (mse == 0.0) return 99.0;
    return 10.0 * std::log10(255.0 * 255.0 / mse);
}

double ssim(const Tensor& a, const Tensor& b) {
    check_same_shape(a, b, "ssim");
    constexpr int kWin = 11;
    constexpr double kSigma = 1.5;
    constexpr double kC1 = (0.01 * 255.0) * (0.01 * 255.0);
    constexpr double kC2 = (0.03 * 255.0) * (0.03 * 255.0);
    if (a.height() < kWin || a.width() < kWin)
        throw std::invalid_argument("ssim: image smaller than the 11x11 window");

    double win[kWin][kWin];
    double wsum = 0.0;
    for (int y = 0; y < kWin; ++y)
        for (int x = 0; x < kWin; ++x) {
            const double dy = y - kWin / 2, dx = x - kWin / 2;
            win[y][x] = std::exp(-(dx * dx + dy * dy) / (2.0 * kSigma * kSigma));
            wsum += win[y][x];
        }
    for (auto& row : win)
        for (double& w : row) w /= wsum;

    double total = 0.0;
    long positions = 0;
    for (int c = 0; c < a.channels(); ++c) {
        for (int y = 0; y + kWin <= a.height(); ++y)
            for (int x = 0; x + kWin <= a.width(); ++x) {
                double mx = 0, my = 0, sxx = 0, syy = 0, sxy = 0;
                for (int wy = 0; wy < kWin; ++wy)
                    for (int wx = 0; wx < kWin; ++wx) {
                        const double w = win[wy][wx];
                        const double va = a.at(c, y + wy, x + wx) * 255.0;
                        const double vb = b.at(c, y + wy, x + wx) * 255.0;
                        mx += w * va;
                        my += w * vb;
                        sxx += w * va * va;
                        syy += w * vb * vb;
                        sxy += w * va * vb;
                    }
                const double vx = sxx - mx * mx;
                const double vy = syy - my * my;
                const double cov = sxy - mx * my;
                total += ((2 * mx * my + kC1) * (2 * cov + kC2)) /
                         ((mx * mx + my * my + kC1) * (vx + vy + kC2));
                ++positions;
            }
    }
    return total / static_cast<double>(positions);
}

PerturbationStats perturbation_stats(const Tensor& delta, const Tensor& mask) {
    if (mask.height() != delta.height() || mask.width() != delta.width())
        throw std::invalid_argument("perturbation_stats: shape mismatch");
    double sum_t = 0, sum_p = 0, sq_t = 0, sq_p = 0;
    long n_t = 0, n_p = 0;
    const int hw = delta.height() * delta.width();
    for (int c = 0; c < delta.channels(); ++c) {
        const float* d = delta.plane(c);
        const float* m = mask.data();
        for (int i = 0; i < hw; ++i) {
            const double v = std::fabs(d[i]) * 255.0;
            if (m[i] != 0.0f) {
                sum_t += v;
                sq_t += v * v;
                ++n_t;
            } else {
                sum_p += v;
                sq_p += v * v;
                ++n_p;
            }
        }
    }
    PerturbationStats s;
    if (n_t > 0) {
        s.mean_tampered = sum_t / n_t;
        s.var_tampered = sq_t / n_t - (sum_t / n_t) * (sum_t / n_t);
    }
    if (n_p > 0) {
        s.mean_pristine = sum_p / n_p;
        s.var_pristine = sq_p / n_p - (sum_p / n_p) * (sum_p / n_p);
    }
    return s;
}

}  // namespace sear::metrics
