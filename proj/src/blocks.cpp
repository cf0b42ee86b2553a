#include "sear/models/blocks.hpp"

#include <stdexcept>

namespace sear::models {

BlockKind block_kind_from_string(const std::string& s) {
    if (s == "vgg") return BlockKind::vgg;
    if (s == "res") return BlockKind::res;
    if (s == "mobile") return BlockKind::mobile;
    throw std::invalid_argument("unknown block kind: " + s);
}

std::string to_string(BlockKind k) {
    switch (k) {
        case BlockKind::vgg: return "vgg";
        case BlockKind::res: return "res";
        case BlockKind::mobile: return "mobile";
    }
    return "?";
}

ConvBlock::ConvBlock(const std::string& name, BlockKind kind, int in_ch, int out_ch)
    : kind_(kind), in_ch_(in_ch), out_ch_(out_ch) {
    switch (kind) {
        case BlockKind::vgg:
            convs_.emplace_back(name + ".conv0", in_ch, out_ch, 3);
            convs_.emplace_back(name + ".conv1", out_ch, out_ch, 3);
            convs_.emplace_back(name + ".conv2", out_ch, out_ch, 3);
            relus_.resize(3);
            break;
        case BlockKind::res:
            convs_.emplace_back(name + ".conv0", in_ch, out_ch, 3);
            convs_.emplace_back(name + ".conv1", out_ch, out_ch, 3);
            relus_.resize(2);
            has_projection_ = in_ch != out_ch;
            if (has_projection_) projection_ = nn::Conv2d(name + ".proj", in_ch, out_ch, 1);
            break;
        case BlockKind::mobile: {
            const int mid = 4 * in_ch;
            convs_.emplace_back(name + ".expand", in_ch, mid, 1);
            dw_ = nn::DepthwiseConv3x3(name + ".dw", mid);
            convs_.emplace_back(name + ".project", mid, out_ch, 1);
            relus_.resize(2);
            break;
        }
    }
}

void ConvBlock::init(Rng& rng) {
    for (auto& c : convs_) c.init_he(rng);
    if (has_projection_) projection_.init_he(rng);
    if (kind_ == BlockKind::mobile) dw_.init_he(rng);
}

void ConvBlock::collect(std::vector<nn::Param*>& out) {
    for (auto& c : convs_) {
        out.push_back(&c.weight);
        out.push_back(&c.bias);
    }
    if (has_projection_) {
        out.push_back(&projection_.weight);
        out.push_back(&projection_.bias);
    }
    if (kind_ == BlockKind::mobile) {
        out.push_back(&dw_.weight);
        out.push_back(&dw_.bias);
    }
}

Tensor ConvBlock::forward(const Tensor& x) {
    switch (kind_) {
        case BlockKind::vgg: {
            Tensor y = relus_[0].forward(convs_[0].forward(x));
            y = relus_[1].forward(convs_[1].forward(y));
            return relus_[2].forward(convs_[2].forward(y));
        }
        case BlockKind::res: {
            Tensor y = relus_[0].forward(convs_[0].forward(x));
            y = convs_[1].forward(y);
            Tensor sc = has_projection_ ? projection_.forward(x) : x;
            for (size_t i = 0; i < y.numel(); ++i) y[i] += sc[i];
            return relus_[1].forward(y);
        }
        case BlockKind::mobile: {
            Tensor y = relus_[0].forward(convs_[0].forward(x));
            y = relus_[1].forward(dw_.forward(y));
            y = convs_[1].forward(y);
            if (in_ch_ == out_ch_)
                for (size_t i = 0; i < y.numel(); ++i) y[i] += x[i];
            return y;
        }
    }
    throw std::logic_error("unreachable");
}

Tensor ConvBlock::backward(const Tensor& dy) {
    switch (kind_) {
        case BlockKind::vgg: {
            Tensor d = convs_[2].backward(relus_[2].backward(dy));
            d = convs_[1].backward(relus_[1].backward(d));
            return convs_[0].backward(relus_[0].backward(d));
        }
        case BlockKind::res: {
            Tensor d = relus_[1].backward(dy);
            Tensor dmain = convs_[0].backward(relus_[0].backward(convs_[1].backward(d)));
            Tensor dsc = has_projection_ ? projection_.backward(d) : d;
            for (size_t i = 0; i < dmain.numel(); ++i) dmain[i] += dsc[i];
            return dmain;
        }
        case BlockKind::mobile: {
            Tensor d = convs_[1].backward(dy);
            d = dw_.backward(relus_[1].backward(d));
            Tensor dx = convs_[0].backward(relus_[0].backward(d));
            if (in_ch_ == out_ch_)
                for (size_t i = 0; i < dx.numel(); ++i) dx[i] += dy[i];
            return dx;
        }
    }
    throw std::logic_error("unreachable");
}

DilatedBridge::DilatedBridge(const std::string& name, int channels, const std::vector<int>& rates) {
    if (rates.empty()) throw std::invalid_argument("DilatedBridge: need at least one rate");
    for (size_t i = 1; i < rates.size(); ++i)
        if (rates[i] <= rates[i - 1]) throw std::invalid_argument("dilation rates must be strictly increasing");
    for (size_t i = 0; i < rates.size(); ++i)
        convs_.emplace_back(name + ".dilated" + std::to_string(i), channels, channels, 3, rates[i]);
    relus_.resize(rates.size());
}

void DilatedBridge::init(Rng& rng) {
    for (auto& c : convs_) c.init_he(rng);
}

void DilatedBridge::collect(std::vector<nn::Param*>& out) {
    for (auto& c : convs_) {
        out.push_back(&c.weight);
        out.push_back(&c.bias);
    }
}

Tensor DilatedBridge::forward(const Tensor& x) {
    Tensor y = x;
    for (size_t i = 0; i < convs_.size(); ++i) y = relus_[i].forward(convs_[i].forward(y));
    return y;
}

Tensor DilatedBridge::backward(const Tensor& dy) {
    Tensor d = dy;
    for (size_t i = convs_.size(); i-- > 0;) d = convs_[i].backward(relus_[i].backward(d));
    return d;
}

}  // namespace sear::models
