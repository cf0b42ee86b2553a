#pragma once

#include <string>
#include <vector>

#include "sear/rng.hpp"
#include "sear/tensor.hpp"

namespace sear::nn {

// One learnable tensor with its gradient and ADAM moments.
struct Param {
    std::string name;
    std::vector<int> dims;
    std::vector<float> w, g, m, v;

    void resize(std::string n, std::vector<int> d) {
        name = std::move(n);
        dims = std::move(d);
        size_t sz = 1;
        for (int x : dims) sz *= static_cast<size_t>(x);
        w.assign(sz, 0.0f);
        g.assign(sz, 0.0f);
        m.assign(sz, 0.0f);
        v.assign(sz, 0.0f);
    }
    size_t size() const { return w.size(); }
};

// 2D convolution, stride 1, odd kernel, zero padding chosen so the output
// spatial size equals the input. Forward/backward run as im2col + sgemm.
// backward() accumulates parameter gradients and returns the input
// gradient; the im2col buffer is rebuilt from the cached input rather
// than kept alive between passes.
class Conv2d {
public:
    Conv2d() = default;
    Conv2d(std::string name, int in_ch, int out_ch, int ksize, int dilation = 1);

    Tensor forward(Tensor x);  // input moves into the backward cache
    Tensor backward(const Tensor& dy);

    void init_he(Rng& rng);     // He-normal weights, zero bias
    void init_zero();           // used for perturbation heads

    int in_channels() const { return in_ch_; }
    int out_channels() const { return out_ch_; }
    int kernel() const { return k_; }
    int dilation() const { return dil_; }

    Param weight, bias;

private:
    void im2col(const Tensor& x, std::vector<float>& col) const;

    int in_ch_ = 0, out_ch_ = 0, k_ = 0, dil_ = 1, pad_ = 0;
    Tensor x_;                    // cached forward input
    std::vector<float> col_, dcol_;  // scratch
};

// Depthwise 3x3, stride 1, pad 1.
class DepthwiseConv3x3 {
public:
    DepthwiseConv3x3() = default;
    DepthwiseConv3x3(std::string name, int channels);

    Tensor forward(const Tensor& x);
    Tensor backward(const Tensor& dy);
    void init_he(Rng& rng);

    Param weight, bias;

private:
    int ch_ = 0;
    Tensor x_;
};

class ReLU {
public:
    Tensor forward(Tensor x);            // in place; keeps only the sign mask
    Tensor backward(Tensor dy) const;    // in place

private:
    std::vector<uint8_t> mask_;
};

class Sigmoid {
public:
    Tensor forward(Tensor x);
    Tensor backward(Tensor dy) const;

private:
    Tensor y_;
};

// 2x2 max pooling, stride 2, floor semantics. Ties resolve to the first
// element in scan order, which keeps backward deterministic.
class MaxPool2 {
public:
    Tensor forward(const Tensor& x);
    Tensor backward(const Tensor& dy) const;

private:
    int in_h_ = 0, in_w_ = 0, ch_ = 0;
    std::vector<int> argmax_;
};

// Bilinear x2 upscaling with half-pixel centers; backward is the exact
// transpose (scatter-add of the interpolation weights).
class BilinearUp2 {
public:
    Tensor forward(const Tensor& x);
    Tensor backward(const Tensor& dy) const;

private:
    int in_h_ = 0, in_w_ = 0, ch_ = 0;
};

Tensor concat_channels(const Tensor& a, const Tensor& b);
std::pair<Tensor, Tensor> split_channels(const Tensor& dy, int ch_a);

// Fixed high-pass front end: the raw image concatenated with the response
// of three non-learned kernels per channel (first-order horizontal,
// first-order vertical, 4-neighbour Laplacian) -> 4*C output channels.
class HighPassBank {
public:
    explicit HighPassBank(int channels = 3);

    Tensor forward(const Tensor& x) { return conv_.forward(x); }
    Tensor backward(const Tensor& dy) { return conv_.backward(dy); }

    int out_channels() const { return conv_.out_channels(); }

private:
    Conv2d conv_;  // fixed weights, excluded from trainable params
};

uint64_t params_hash(const std::vector<Param*>& params);

}  // namespace sear::nn
