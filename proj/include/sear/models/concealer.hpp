#pragma once

#include <vector>

#include "sear/models/blocks.hpp"

namespace sear::models {

struct ConcealerConfig {
    BlockKind block = BlockKind::vgg;
    int depth = 4;
    int base_channels = 32;
    std::vector<int> dilation_rates = {2, 4, 8, 16};

    void validate() const;
    int stride() const { return 1 << depth; }  // required spatial divisibility
};

// Perturbation generator: encoder of `depth` downsampling stages, a
// dilated bridge, and a decoder of upsampling stages with channel-concat
// skip connections, ending in a linear 3x3 head to 3 channels. The head
// is zero-initialized, so an untrained concealer emits a zero map and the
// composed image equals its input; magnitude control is left entirely to
// the losses.
class ConcealerNet {
public:
    explicit ConcealerNet(ConcealerConfig cfg = {});

    // image {3,H,W}, H and W divisible by 2^depth -> signed delta {3,H,W}
    Tensor forward(const Tensor& image);
    // ddelta -> dimage, accumulating parameter gradients
    Tensor backward(const Tensor& ddelta);

    void init(uint64_t seed);
    std::vector<nn::Param*> params();
    size_t param_count();

    const ConcealerConfig& config() const { return cfg_; }

private:
    ConcealerConfig cfg_;
    std::vector<ConvBlock> enc_;
    std::vector<nn::MaxPool2> pools_;
    DilatedBridge bridge_;
    std::vector<nn::BilinearUp2> ups_;
    std::vector<nn::Conv2d> up_convs_;
    std::vector<nn::ReLU> up_relus_;
    nn::Conv2d head_;
    std::vector<int> skip_channels_;
};

// I_anti = clamp01(image + delta). Gradients pass where the sum is inside
// the valid range (see compose_backward_mask).
Tensor compose_anti_image(const Tensor& image, const Tensor& delta);

// 1 where the unclamped sum stayed in [0,1] (gradient passes), else 0.
Tensor compose_backward_mask(const Tensor& image, const Tensor& delta);

void check_divisible(const Tensor& image, int stride, const char* who);

}  // namespace sear::models
