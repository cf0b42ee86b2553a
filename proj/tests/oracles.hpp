#pragma once

// Brute-force reference implementations used as independent oracles.
// Everything here is plain double-precision loops, deliberately sharing
// no code with the library.

#include <cmath>
#include <vector>

#include "sear/tensor.hpp"

namespace oracle {

// direct 2D convolution, stride 1, zero padding pad, square kernel k
inline void conv2d(const std::vector<double>& x, int cin, int h, int w, const std::vector<double>& wgt,
                   int cout, int k, int dil, int pad, const std::vector<double>& bias,
                   std::vector<double>& y) {
    y.assign(static_cast<size_t>(cout) * h * w, 0.0);
    for (int co = 0; co < cout; ++co)
        for (int yy = 0; yy < h; ++yy)
            for (int xx = 0; xx < w; ++xx) {
                double acc = bias[co];
                for (int ci = 0; ci < cin; ++ci)
                    for (int ky = 0; ky < k; ++ky)
                        for (int kx = 0; kx < k; ++kx) {
                            const int sy = yy + dil * ky - pad;
                            const int sx = xx + dil * kx - pad;
                            if (sy < 0 || sy >= h || sx < 0 || sx >= w) continue;
                            acc += wgt[((static_cast<size_t>(co) * cin + ci) * k + ky) * k + kx] *
                                   x[(static_cast<size_t>(ci) * h + sy) * w + sx];
                        }
                y[(static_cast<size_t>(co) * h + yy) * w + xx] = acc;
            }
}

// gradients of the same convolution
inline void conv2d_dx(const std::vector<double>& dy, int cout, int h, int w, const std::vector<double>& wgt,
                      int cin, int k, int dil, int pad, std::vector<double>& dx) {
    dx.assign(static_cast<size_t>(cin) * h * w, 0.0);
    for (int co = 0; co < cout; ++co)
        for (int yy = 0; yy < h; ++yy)
            for (int xx = 0; xx < w; ++xx) {
                const double g = dy[(static_cast<size_t>(co) * h + yy) * w + xx];
                for (int ci = 0; ci < cin; ++ci)
                    for (int ky = 0; ky < k; ++ky)
                        for (int kx = 0; kx < k; ++kx) {
                            const int sy = yy + dil * ky - pad;
                            const int sx = xx + dil * kx - pad;
                            if (sy < 0 || sy >= h || sx < 0 || sx >= w) continue;
                            dx[(static_cast<size_t>(ci) * h + sy) * w + sx] +=
                                g * wgt[((static_cast<size_t>(co) * cin + ci) * k + ky) * k + kx];
                        }
            }
}

inline void conv2d_dw(const std::vector<double>& dy, const std::vector<double>& x, int cout, int cin, int h,
                      int w, int k, int dil, int pad, std::vector<double>& dw) {
    dw.assign(static_cast<size_t>(cout) * cin * k * k, 0.0);
    for (int co = 0; co < cout; ++co)
        for (int yy = 0; yy < h; ++yy)
            for (int xx = 0; xx < w; ++xx) {
                const double g = dy[(static_cast<size_t>(co) * h + yy) * w + xx];
                for (int ci = 0; ci < cin; ++ci)
                    for (int ky = 0; ky < k; ++ky)
                        for (int kx = 0; kx < k; ++kx) {
                            const int sy = yy + dil * ky - pad;
                            const int sx = xx + dil * kx - pad;
                            if (sy < 0 || sy >= h || sx < 0 || sx >= w) continue;
                            dw[((static_cast<size_t>(co) * cin + ci) * k + ky) * k + kx] +=
                                g * x[(static_cast<size_t>(ci) * h + sy) * w + sx];
                        }
            }
}

// 2x2 max pooling, floor semantics
inline void maxpool2(const std::vector<double>& x, int c, int h, int w, std::vector<double>& y) {
    const int oh = h / 2, ow = w / 2;
    y.assign(static_cast<size_t>(c) * oh * ow, 0.0);
    for (int ci = 0; ci < c; ++ci)
        for (int yy = 0; yy < oh; ++yy)
            for (int xx = 0; xx < ow; ++xx) {
                double best = -1e300;
                for (int dy = 0; dy < 2; ++dy)
                    for (int dx = 0; dx < 2; ++dx)
                        best = std::max(best, x[(static_cast<size_t>(ci) * h + 2 * yy + dy) * w + 2 * xx + dx]);
                y[(static_cast<size_t>(ci) * oh + yy) * ow + xx] = best;
            }
}

// bilinear x2 with half-pixel centers, edge clamped
inline void bilinear_up2(const std::vector<double>& x, int c, int h, int w, std::vector<double>& y) {
    const int oh = 2 * h, ow = 2 * w;
    y.assign(static_cast<size_t>(c) * oh * ow, 0.0);
    auto cl = [](int v, int hi) { return v < 0 ? 0 : (v > hi ? hi : v); };
    for (int ci = 0; ci < c; ++ci)
        for (int yy = 0; yy < oh; ++yy)
            for (int xx = 0; xx < ow; ++xx) {
                const double fy = (yy + 0.5) / 2.0 - 0.5;
                const double fx = (xx + 0.5) / 2.0 - 0.5;
                const int y0 = static_cast<int>(std::floor(fy)), x0 = static_cast<int>(std::floor(fx));
                const double wy = fy - y0, wx = fx - x0;
                const int y0c = cl(y0, h - 1), y1c = cl(y0 + 1, h - 1);
                const int x0c = cl(x0, w - 1), x1c = cl(x0 + 1, w - 1);
                auto v = [&](int sy, int sx) { return x[(static_cast<size_t>(ci) * h + sy) * w + sx]; };
                y[(static_cast<size_t>(ci) * oh + yy) * ow + xx] =
                    (1 - wy) * ((1 - wx) * v(y0c, x0c) + wx * v(y0c, x1c)) +
                    wy * ((1 - wx) * v(y1c, x0c) + wx * v(y1c, x1c));
            }
}

// losses on double arrays (independent of the library's templated kernels)
inline double pretext(const std::vector<double>& delta, const std::vector<double>& mask, int ch, int hw) {
    double s = 0;
    for (int c = 0; c < ch; ++c)
        for (int i = 0; i < hw; ++i) {
            const double d = delta[static_cast<size_t>(c) * hw + i];
            s += std::fabs(d * mask[i] - d);
        }
    return s / (static_cast<double>(ch) * hw);
}

inline double hinge(const std::vector<double>& delta) {
    double s = 0;
    for (double d : delta) s += d * d;
    return std::sqrt(s);
}

inline double bce(const std::vector<double>& pred, const std::vector<double>& gt, double eps = 1e-7) {
    double s = 0;
    for (size_t i = 0; i < pred.size(); ++i) {
        const double p = std::min(1.0 - eps, std::max(eps, pred[i]));
        s += -(gt[i] * std::log(p) + (1.0 - gt[i]) * std::log(1.0 - p));
    }
    return s / static_cast<double>(pred.size());
}

// counting metrics
struct Counts {
    long tp = 0, fp = 0, fn = 0, tn = 0;
};
inline Counts count_pixels(const std::vector<int>& pred, const std::vector<int>& gt) {
    Counts c;
    for (size_t i = 0; i < pred.size(); ++i) {
        if (pred[i] && gt[i]) ++c.tp;
        if (pred[i] && !gt[i]) ++c.fp;
        if (!pred[i] && gt[i]) ++c.fn;
        if (!pred[i] && !gt[i]) ++c.tn;
    }
    return c;
}
inline double f1_from_counts(const Counts& c) {
    if (c.tp + c.fp == 0 && c.tp + c.fn == 0) return 1.0;
    if (c.tp == 0) return 0.0;
    const double p = static_cast<double>(c.tp) / (c.tp + c.fp);
    const double r = static_cast<double>(c.tp) / (c.tp + c.fn);
    return 2 * p * r / (p + r);
}

// SSIM written as separate statistics passes (different structure from
// the library's fused loop)
inline double ssim_ref(const std::vector<double>& a, const std::vector<double>& b, int c, int h, int w) {
    const int win = 11;
    const double sigma = 1.5, c1 = 6.5025, c2 = 58.5225;
    std::vector<double> g(win * win);
    double gs = 0;
    for (int y = 0; y < win; ++y)
        for (int x = 0; x < win; ++x) {
            g[y * win + x] = std::exp(-((x - 5.0) * (x - 5.0) + (y - 5.0) * (y - 5.0)) / (2 * sigma * sigma));
            gs += g[y * win + x];
        }
    double total = 0;
    long n = 0;
    for (int ci = 0; ci < c; ++ci)
        for (int y = 0; y + win <= h; ++y)
            for (int x = 0; x + win <= w; ++x) {
                double mx = 0, my = 0;
                for (int wy = 0; wy < win; ++wy)
                    for (int wx = 0; wx < win; ++wx) {
                        const double wt = g[wy * win + wx] / gs;
                        mx += wt * 255.0 * a[(static_cast<size_t>(ci) * h + y + wy) * w + x + wx];
                        my += wt * 255.0 * b[(static_cast<size_t>(ci) * h + y + wy) * w + x + wx];
                    }
                double vx = 0, vy = 0, cov = 0;
                for (int wy = 0; wy < win; ++wy)
                    for (int wx = 0; wx < win; ++wx) {
                        const double wt = g[wy * win + wx] / gs;
                        const double da = 255.0 * a[(static_cast<size_t>(ci) * h + y + wy) * w + x + wx] - mx;
                        const double db = 255.0 * b[(static_cast<size_t>(ci) * h + y + wy) * w + x + wx] - my;
                        vx += wt * da * da;
                        vy += wt * db * db;
                        cov += wt * da * db;
                    }
                total += (2 * mx * my + c1) * (2 * cov + c2) / ((mx * mx + my * my + c1) * (vx + vy + c2));
                ++n;
            }
    return total / n;
}

// helpers to move between Tensor and double vectors
inline std::vector<double> to_d(const sear::Tensor& t) {
    std::vector<double> v(t.numel());
    for (size_t i = 0; i < v.size(); ++i) v[i] = t[i];
    return v;
}

inline sear::Tensor from_d(const std::vector<double>& v, int c, int h, int w) {
    sear::Tensor t(c, h, w);
    for (size_t i = 0; i < v.size(); ++i) t[i] = static_cast<float>(v[i]);
    return t;
}

}  // namespace oracle
