#include "sear/nn/layers.hpp"

#include <cblas.h>

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace sear::nn {

namespace {
// The pthread OpenBLAS scheduler loses time on this workload's small
// matrices; default to one thread, overridable via SEAR_BLAS_THREADS.
struct BlasInit {
    BlasInit() {
        int n = 1;
        if (const char* e = std::getenv("SEAR_BLAS_THREADS")) n = std::max(1, std::atoi(e));
        openblas_set_num_threads(n);
    }
};
const BlasInit blas_init;
}  // namespace

// ---------------------------------------------------------------- Conv2d

Conv2d::Conv2d(std::string name, int in_ch, int out_ch, int ksize, int dilation)
    : in_ch_(in_ch), out_ch_(out_ch), k_(ksize), dil_(dilation) {
    if (ksize % 2 == 0) throw std::invalid_argument("Conv2d: kernel must be odd");
    pad_ = dil_ * (k_ - 1) / 2;
    weight.resize(name + ".weight", {out_ch, in_ch, ksize, ksize});
    bias.resize(name + ".bias", {out_ch});
}

void Conv2d::init_he(Rng& rng) {
    const float std = std::sqrt(2.0f / (static_cast<float>(in_ch_) * k_ * k_));
    for (float& w : weight.w) w = rng.normal() * std;
    std::fill(bias.w.begin(), bias.w.end(), 0.0f);
}

void Conv2d::init_zero() {
    std::fill(weight.w.begin(), weight.w.end(), 0.0f);
    std::fill(bias.w.begin(), bias.w.end(), 0.0f);
}

void Conv2d::im2col(const Tensor& x, std::vector<float>& col) const {
    const int h = x.height(), w = x.width();
    const size_t hw = static_cast<size_t>(h) * w;
    col.resize(static_cast<size_t>(in_ch_) * k_ * k_ * hw);
    // every element of col is written exactly once: padding strips get
    // explicit zeros instead of a full-buffer pre-fill
    for (int ci = 0; ci < in_ch_; ++ci) {
        const float* src = x.plane(ci);
        for (int ky = 0; ky < k_; ++ky) {
            const int oy = dil_ * ky - pad_;
            for (int kx = 0; kx < k_; ++kx) {
                const int ox = dil_ * kx - pad_;
                float* dst = col.data() + ((static_cast<size_t>(ci) * k_ + ky) * k_ + kx) * hw;
                const int y0 = std::max(0, -oy), y1 = std::min(h, h - oy);
                const int x0 = std::max(0, -ox), x1 = std::min(w, w - ox);
                if (y0 >= y1 || x0 >= x1) {
                    std::fill(dst, dst + hw, 0.0f);
                    continue;
                }
                std::fill(dst, dst + static_cast<size_t>(y0) * w, 0.0f);
                for (int y = y0; y < y1; ++y) {
                    float* d = dst + static_cast<size_t>(y) * w;
                    std::fill(d, d + x0, 0.0f);
                    std::copy(src + static_cast<size_t>(y + oy) * w + (x0 + ox),
                              src + static_cast<size_t>(y + oy) * w + (x1 + ox), d + x0);
                    std::fill(d + x1, d + w, 0.0f);
                }
                std::fill(dst + static_cast<size_t>(y1) * w, dst + hw, 0.0f);
            }
        }
    }
}

Tensor Conv2d::forward(Tensor x) {
    if (x.channels() != in_ch_)
        throw std::invalid_argument("Conv2d " + weight.name + ": got " + std::to_string(x.channels()) +
                                    " channels, want " + std::to_string(in_ch_));
    x_ = std::move(x);
    const int h = x_.height(), w = x_.width();
    const int hw = h * w;
    const int kk = in_ch_ * k_ * k_;
    im2col(x_, col_);

    Tensor y(out_ch_, h, w);
    cblas_sgemm(CblasRowMajor, CblasNoTrans, CblasNoTrans, out_ch_, hw, kk, 1.0f, weight.w.data(), kk,
                col_.data(), hw, 0.0f, y.data(), hw);
    for (int co = 0; co < out_ch_; ++co) {
        float* p = y.plane(co);
        const float b = bias.w[co];
        for (int i = 0; i < hw; ++i) p[i] += b;
    }
    return y;
}

Tensor Conv2d::backward(const Tensor& dy) {
    const int h = x_.height(), w = x_.width();
    const int hw = h * w;
    const int kk = in_ch_ * k_ * k_;
    im2col(x_, col_);

    // dW += dy . col^T ; db += row sums
    cblas_sgemm(CblasRowMajor, CblasNoTrans, CblasTrans, out_ch_, kk, hw, 1.0f, dy.data(), hw, col_.data(),
                hw, 1.0f, weight.g.data(), kk);
    for (int co = 0; co < out_ch_; ++co) {
        const float* p = dy.plane(co);
        double s = 0.0;
        for (int i = 0; i < hw; ++i) s += p[i];
        bias.g[co] += static_cast<float>(s);
    }

    // dcol = W^T . dy, then scatter back to dx (col2im)
    dcol_.resize(static_cast<size_t>(kk) * hw);
    cblas_sgemm(CblasRowMajor, CblasTrans, CblasNoTrans, kk, hw, out_ch_, 1.0f, weight.w.data(), kk,
                dy.data(), hw, 0.0f, dcol_.data(), hw);

    Tensor dx(in_ch_, h, w);
    for (int ci = 0; ci < in_ch_; ++ci) {
        float* dst = dx.plane(ci);
        for (int ky = 0; ky < k_; ++ky) {
            const int oy = dil_ * ky - pad_;
            for (int kx = 0; kx < k_; ++kx) {
                const int ox = dil_ * kx - pad_;
                const float* src = dcol_.data() + ((static_cast<size_t>(ci) * k_ + ky) * k_ + kx) * hw;
                const int y0 = std::max(0, -oy), y1 = std::min(h, h - oy);
                const int x0 = std::max(0, -ox), x1 = std::min(w, w - ox);
                for (int y = y0; y < y1; ++y) {
                    const float* s = src + static_cast<size_t>(y) * w + x0;
                    float* d = dst + static_cast<size_t>(y + oy) * w + (x0 + ox);
                    for (int i = 0; i < x1 - x0; ++i) d[i] += s[i];
                }
            }
        }
    }
    return dx;
}

// ------------------------------------------------------ DepthwiseConv3x3

DepthwiseConv3x3::DepthwiseConv3x3(std::string name, int channels) : ch_(channels) {
    weight.resize(name + ".weight", {channels, 3, 3});
    bias.resize(name + ".bias", {channels});
}

void DepthwiseConv3x3::init_he(Rng& rng) {
    const float std = std::sqrt(2.0f / 9.0f);
    for (float& w : weight.w) w = rng.normal() * std;
    std::fill(bias.w.begin(), bias.w.end(), 0.0f);
}

Tensor DepthwiseConv3x3::forward(const Tensor& x) {
    x_ = x;
    const int h = x.height(), w = x.width();
    Tensor y(ch_, h, w);
    for (int c = 0; c < ch_; ++c) {
        const float* src = x.plane(c);
        const float* ker = weight.w.data() + static_cast<size_t>(c) * 9;
        float* dst = y.plane(c);
        const float b = bias.w[c];
        for (int yy = 0; yy < h; ++yy)
            for (int xx = 0; xx < w; ++xx) {
                float acc = b;
                for (int ky = 0; ky < 3; ++ky) {
                    const int sy = yy + ky - 1;
                    if (sy < 0 || sy >= h) continue;
                    for (int kx = 0; kx < 3; ++kx) {
                        const int sx = xx + kx - 1;
                        if (sx < 0 || sx >= w) continue;
                        acc += ker[ky * 3 + kx] * src[static_cast<size_t>(sy) * w + sx];
                    }
                }
                dst[static_cast<size_t>(yy) * w + xx] = acc;
            }
    }
    return y;
}

Tensor DepthwiseConv3x3::backward(const Tensor& dy) {
    const int h = x_.height(), w = x_.width();
    Tensor dx(ch_, h, w);
    for (int c = 0; c < ch_; ++c) {
        const float* src = x_.plane(c);
        const float* g = dy.plane(c);
        const float* ker = weight.w.data() + static_cast<size_t>(c) * 9;
        float* dw = weight.g.data() + static_cast<size_t>(c) * 9;
        float* dxp = dx.plane(c);
        double db = 0.0;
        for (int yy = 0; yy < h; ++yy)
            for (int xx = 0; xx < w; ++xx) {
                const float go = g[static_cast<size_t>(yy) * w + xx];
                db += go;
                for (int ky = 0; ky < 3; ++ky) {
                    const int sy = yy + ky - 1;
                    if (sy < 0 || sy >= h) continue;
                    for (int kx = 0; kx < 3; ++kx) {
                        const int sx = xx + kx - 1;
                        if (sx < 0 || sx >= w) continue;
                        dw[ky * 3 + kx] += go * src[static_cast<size_t>(sy) * w + sx];
                        dxp[static_cast<size_t>(sy) * w + sx] += go * ker[ky * 3 + kx];
                    }
                }
            }
        bias.g[c] += static_cast<float>(db);
    }
    return dx;
}

// ------------------------------------------------------------ activations

Tensor ReLU::forward(Tensor x) {
    mask_.resize(x.numel());
    for (size_t i = 0; i < x.numel(); ++i) {
        const bool pos = x[i] > 0.0f;
        mask_[i] = pos;
        if (!pos) x[i] = 0.0f;
    }
    return x;
}

Tensor ReLU::backward(Tensor dy) const {
    for (size_t i = 0; i < dy.numel(); ++i)
        if (!mask_[i]) dy[i] = 0.0f;
    return dy;
}

Tensor Sigmoid::forward(Tensor x) {
    for (size_t i = 0; i < x.numel(); ++i) x[i] = 1.0f / (1.0f + std::exp(-x[i]));
    y_ = x;
    return x;
}

Tensor Sigmoid::backward(Tensor dy) const {
    for (size_t i = 0; i < dy.numel(); ++i) dy[i] *= y_[i] * (1.0f - y_[i]);
    return dy;
}

// --------------------------------------------------------------- pooling

Tensor MaxPool2::forward(const Tensor& x) {
    in_h_ = x.height();
    in_w_ = x.width();
    ch_ = x.channels();
    const int oh = in_h_ / 2, ow = in_w_ / 2;
    Tensor y(ch_, oh, ow);
    argmax_.assign(static_cast<size_t>(ch_) * oh * ow, 0);
    for (int c = 0; c < ch_; ++c) {
        const float* src = x.plane(c);
        float* dst = y.plane(c);
        int* am = argmax_.data() + static_cast<size_t>(c) * oh * ow;
        for (int yy = 0; yy < oh; ++yy)
            for (int xx = 0; xx < ow; ++xx) {
                int best = (2 * yy) * in_w_ + 2 * xx;
                float bv = src[best];
                for (int dy = 0; dy < 2; ++dy)
                    for (int dx = 0; dx < 2; ++dx) {
                        const int idx = (2 * yy + dy) * in_w_ + 2 * xx + dx;
                        if (src[idx] > bv) {
                            bv = src[idx];
                            best = idx;
                        }
                    }
                dst[yy * ow + xx] = bv;
                am[yy * ow + xx] = best;
            }
    }
    return y;
}

Tensor MaxPool2::backward(const Tensor& dy) const {
    const int oh = in_h_ / 2, ow = in_w_ / 2;
    Tensor dx(ch_, in_h_, in_w_);
    for (int c = 0; c < ch_; ++c) {
        const float* g = dy.plane(c);
        float* dst = dx.plane(c);
        const int* am = argmax_.data() + static_cast<size_t>(c) * oh * ow;
        for (int i = 0; i < oh * ow; ++i) dst[am[i]] += g[i];
    }
    return dx;
}

// ------------------------------------------------------------- upsampling

namespace {
// source index pair and weight for output position d under half-pixel 2x
inline void up2_coeff(int d, int in_sz, int& i0, int& i1, float& w1) {
    const float f = (d + 0.5f) * 0.5f - 0.5f;
    const int base = static_cast<int>(std::floor(f));
    w1 = f - base;
    i0 = std::clamp(base, 0, in_sz - 1);
    i1 = std::clamp(base + 1, 0, in_sz - 1);
}
}  // namespace

Tensor BilinearUp2::forward(const Tensor& x) {
    in_h_ = x.height();
    in_w_ = x.width();
    ch_ = x.channels();
    const int oh = in_h_ * 2, ow = in_w_ * 2;
    Tensor y(ch_, oh, ow);
    for (int yy = 0; yy < oh; ++yy) {
        int y0, y1;
        float wy;
        up2_coeff(yy, in_h_, y0, y1, wy);
        for (int xx = 0; xx < ow; ++xx) {
            int x0, x1;
            float wx;
            up2_coeff(xx, in_w_, x0, x1, wx);
            for (int c = 0; c < ch_; ++c) {
                const float* s = x.plane(c);
                const float top = (1.0f - wx) * s[y0 * in_w_ + x0] + wx * s[y0 * in_w_ + x1];
                const float bot = (1.0f - wx) * s[y1 * in_w_ + x0] + wx * s[y1 * in_w_ + x1];
                y.plane(c)[yy * ow + xx] = (1.0f - wy) * top + wy * bot;
            }
        }
    }
    return y;
}

Tensor BilinearUp2::backward(const Tensor& dy) const {
    const int oh = in_h_ * 2, ow = in_w_ * 2;
    Tensor dx(ch_, in_h_, in_w_);
    for (int yy = 0; yy < oh; ++yy) {
        int y0, y1;
        float wy;
        up2_coeff(yy, in_h_, y0, y1, wy);
        for (int xx = 0; xx < ow; ++xx) {
            int x0, x1;
            float wx;
            up2_coeff(xx, in_w_, x0, x1, wx);
            for (int c = 0; c < ch_; ++c) {
                const float g = dy.plane(c)[yy * ow + xx];
                float* d = dx.plane(c);
                d[y0 * in_w_ + x0] += (1.0f - wy) * (1.0f - wx) * g;
                d[y0 * in_w_ + x1] += (1.0f - wy) * wx * g;
                d[y1 * in_w_ + x0] += wy * (1.0f - wx) * g;
                d[y1 * in_w_ + x1] += wy * wx * g;
            }
        }
    }
    return dx;
}

// ----------------------------------------------------------------- concat

Tensor concat_channels(const Tensor& a, const Tensor& b) {
    if (a.height() != b.height() || a.width() != b.width())
        throw std::invalid_argument("concat_channels: spatial dims differ");
    Tensor y(a.channels() + b.channels(), a.height(), a.width());
    std::copy(a.data(), a.data() + a.numel(), y.data());
    std::copy(b.data(), b.data() + b.numel(), y.data() + a.numel());
    return y;
}

std::pair<Tensor, Tensor> split_channels(const Tensor& dy, int ch_a) {
    Tensor da(ch_a, dy.height(), dy.width());
    Tensor db(dy.channels() - ch_a, dy.height(), dy.width());
    std::copy(dy.data(), dy.data() + da.numel(), da.data());
    std::copy(dy.data() + da.numel(), dy.data() + dy.numel(), db.data());
    return {std::move(da), std::move(db)};
}

// ----------------------------------------------------------- HighPassBank

HighPassBank::HighPassBank(int channels) : conv_("high_pass", channels, 4 * channels, 3, 1) {
    // kernels: identity (pass the raw channel), d/dx, d/dy, Laplacian
    const float kid[9] = {0, 0, 0, 0, 1, 0, 0, 0, 0};
    const float kdx[9] = {0, 0, 0, 0, -1, 1, 0, 0, 0};
    const float kdy[9] = {0, 0, 0, 0, -1, 0, 0, 1, 0};
    const float klap[9] = {0, -1, 0, -1, 4, -1, 0, -1, 0};
    const float* kernels[4] = {kid, kdx, kdy, klap};

    conv_.init_zero();
    const int cin = channels;
    for (int k = 0; k < 4; ++k)
        for (int c = 0; c < cin; ++c) {
            const int co = k * cin + c;
            float* w = conv_.weight.w.data() + (static_cast<size_t>(co) * cin + c) * 9;
            std::copy(kernels[k], kernels[k] + 9, w);
        }
}

uint64_t params_hash(const std::vector<Param*>& params) {
    uint64_t h = 1469598103934665603ull;
    for (const Param* p : params) {
        const uint64_t ph = bytes_hash(p->w.data(), p->size());
        h ^= ph;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace sear::nn
