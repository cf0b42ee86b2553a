#pragma once

#include <memory>
#include <vector>

#include "sear/models/blocks.hpp"

namespace sear::models {

enum class LocalizerKind { supervisor_refined, small_distill };

struct LocalizerConfig {
    LocalizerKind kind = LocalizerKind::supervisor_refined;
    BlockKind block = BlockKind::vgg;
    bool high_pass = true;
    int depth = 4;
    int base_channels = 32;
    std::vector<int> dilation_rates = {2, 4, 8, 16};

    static LocalizerConfig small_distill_defaults() {
        LocalizerConfig c;
        c.kind = LocalizerKind::small_distill;
        c.depth = 2;
        c.base_channels = 8;
        c.dilation_rates = {2, 4};
        return c;
    }

    void validate() const;
    int stride() const { return 1 << depth; }
};

// Forward-only view of a localizer: what black-box attackers get. The
// type exposes no gradient entry point at all.
class ForwardLocalizer {
public:
    virtual ~ForwardLocalizer() = default;
    // image {3,H,W} in [0,1] -> tamper probability map {1,H,W}
    virtual Tensor forward(const Tensor& image) = 0;
    virtual int stride() const = 0;
};

// Adds white-box gradient access on top of the forward contract.
class GradLocalizer : public ForwardLocalizer {
public:
    // d BCE(forward(image), target) / d image; bce_out receives the loss
    virtual Tensor input_gradient_bce(const Tensor& image, const Tensor& target, double* bce_out) = 0;
};

// Simplified forgery localizer: a fixed high-pass filter bank concatenated
// with the raw image feeds the same encoder / dilated bridge / decoder
// skeleton as the concealer, ending in a single-channel sigmoid head.
class LocalizerNet final : public GradLocalizer {
public:
    explicit LocalizerNet(LocalizerConfig cfg = {});

    Tensor forward(const Tensor& image) override;
    // dprob {1,H,W} -> dimage, accumulating parameter gradients
    Tensor backward(const Tensor& dprob);
    Tensor input_gradient_bce(const Tensor& image, const Tensor& target, double* bce_out) override;

    int stride() const override { return cfg_.stride(); }

    void init(uint64_t seed);
    std::vector<nn::Param*> params();
    size_t param_count();
    uint64_t param_hash();

    const LocalizerConfig& config() const { return cfg_; }

private:
    LocalizerConfig cfg_;
    nn::HighPassBank bank_;
    std::vector<ConvBlock> enc_;
    std::vector<nn::MaxPool2> pools_;
    DilatedBridge bridge_;
    std::vector<nn::BilinearUp2> ups_;
    std::vector<nn::Conv2d> up_convs_;
    std::vector<nn::ReLU> up_relus_;
    nn::Conv2d head_;
    nn::Sigmoid sig_;
};

// Wrapper that strips gradient access; handing this to an attack is the
// harness-level guarantee that targets stay black boxes.
class ForwardOnlyView final : public ForwardLocalizer {
public:
    explicit ForwardOnlyView(ForwardLocalizer& inner) : inner_(&inner) {}
    Tensor forward(const Tensor& image) override { return inner_->forward(image); }
    int stride() const override { return inner_->stride(); }

private:
    ForwardLocalizer* inner_;
};

}  // namespace sear::models
