#pragma once

#include <memory>
#include <string>
#include <vector>

#include "sear/nn/adam.hpp"
#include "sear/nn/layers.hpp"

namespace sear::models {

enum class BlockKind { vgg, res, mobile };

BlockKind block_kind_from_string(const std::string& s);
std::string to_string(BlockKind k);

// The configurable conv block shared by encoder and decoder stages.
//   vgg:    three 3x3 convs, ReLU after each
//   res:    two 3x3 convs with an identity shortcut (1x1 projection when
//           the channel count changes)
//   mobile: 1x1 expansion (x4) -> depthwise 3x3 -> 1x1 projection,
//           residual when in == out
// Spatial size is preserved by all variants.
class ConvBlock {
public:
    ConvBlock() = default;
    ConvBlock(const std::string& name, BlockKind kind, int in_ch, int out_ch);

    Tensor forward(const Tensor& x);
    Tensor backward(const Tensor& dy);

    void init(Rng& rng);
    void collect(std::vector<nn::Param*>& out);

    int out_channels() const { return out_ch_; }

private:
    BlockKind kind_ = BlockKind::vgg;
    int in_ch_ = 0, out_ch_ = 0;

    std::vector<nn::Conv2d> convs_;
    std::vector<nn::ReLU> relus_;
    nn::DepthwiseConv3x3 dw_;
    bool has_projection_ = false;
    nn::Conv2d projection_;
};

// Sequential 3x3 dilated convolutions (ReLU after each) linking the
// encoder to the decoder; padding preserves the spatial size.
class DilatedBridge {
public:
    DilatedBridge() = default;
    DilatedBridge(const std::string& name, int channels, const std::vector<int>& rates);

    Tensor forward(const Tensor& x);
    Tensor backward(const Tensor& dy);
    void init(Rng& rng);
    void collect(std::vector<nn::Param*>& out);

private:
    std::vector<nn::Conv2d> convs_;
    std::vector<nn::ReLU> relus_;
};

}  // namespace sear::models
