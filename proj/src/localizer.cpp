#include "sear/models/localizer.hpp"

#include "sear/models/concealer.hpp"

#include "sear/losses.hpp"

namespace sear::models {

void LocalizerConfig::validate() const {
    if (depth < 1) throw std::invalid_argument("localizer: depth must be >= 1");
    if (base_channels < 1) throw std::invalid_argument("localizer: base_channels must be >= 1");
    if (dilation_rates.empty()) throw std::invalid_argument("localizer: need dilation rates");
}

LocalizerNet::LocalizerNet(LocalizerConfig cfg) : cfg_(std::move(cfg)), bank_(3) {
    cfg_.validate();
    const int D = cfg_.depth;
    int in_ch = cfg_.high_pass ? bank_.out_channels() : 3;
    for (int d = 0; d < D; ++d) {
        const int out_ch = cfg_.base_channels << d;
        enc_.emplace_back("enc" + std::to_string(d), cfg_.block, in_ch, out_ch);
        in_ch = out_ch;
    }
    pools_.resize(D);
    const int bottom = cfg_.base_channels << (D - 1);
    bridge_ = DilatedBridge("bridge", bottom, cfg_.dilation_rates);
    ups_.resize(D);
    up_relus_.resize(D);
    up_convs_.resize(D);
    for (int d = D - 1; d >= 0; --d) {
        const int dec_in = (d == D - 1) ? bottom : 2 * (cfg_.base_channels << (d + 1));
        up_convs_[d] = nn::Conv2d("dec" + std::to_string(d) + ".conv", dec_in, cfg_.base_channels << d, 3);
    }
    head_ = nn::Conv2d("head", 2 * cfg_.base_channels, 1, 3);
}

void LocalizerNet::init(uint64_t seed) {
    Rng rng(Rng::derive(seed, 0x10CA112));
    for (auto& b : enc_) b.init(rng);
    bridge_.init(rng);
    for (auto& c : up_convs_) c.init_he(rng);
    head_.init_he(rng);
}

std::vector<nn::Param*> LocalizerNet::params() {
    std::vector<nn::Param*> out;  // the high-pass bank is fixed, not listed
    for (auto& b : enc_) b.collect(out);
    bridge_.collect(out);
    for (auto& c : up_convs_) {
        out.push_back(&c.weight);
        out.push_back(&c.bias);
    }
    out.push_back(&head_.weight);
    out.push_back(&head_.bias);
    return out;
}

size_t LocalizerNet::param_count() {
    size_t n = 0;
    for (auto* p : params()) n += p->size();
    return n;
}

uint64_t LocalizerNet::param_hash() { return nn::params_hash(params()); }

Tensor LocalizerNet::forward(const Tensor& image) {
    if (image.channels() != 3) throw std::invalid_argument("localizer: expected a 3-channel image");
    check_divisible(image, cfg_.stride(), "localizer");

    const int D = cfg_.depth;
    Tensor x = cfg_.high_pass ? bank_.forward(image) : image;
    std::vector<Tensor> skips(D);
    for (int d = 0; d < D; ++d) {
        skips[d] = enc_[d].forward(x);
        x = pools_[d].forward(skips[d]);
    }
    x = bridge_.forward(x);
    for (int d = D - 1; d >= 0; --d) {
        x = ups_[d].forward(x);
        x = up_relus_[d].forward(up_convs_[d].forward(x));
        x = nn::concat_channels(x, skips[d]);
    }
    return sig_.forward(head_.forward(x));
}

Tensor LocalizerNet::backward(const Tensor& dprob) {
    const int D = cfg_.depth;
    Tensor d = head_.backward(sig_.backward(dprob));
    std::vector<Tensor> dskips(D);
    for (int dd = 0; dd < D; ++dd) {
        auto [da, dskip] = nn::split_channels(d, cfg_.base_channels << dd);
        dskips[dd] = std::move(dskip);
        d = ups_[dd].backward(up_convs_[dd].backward(up_relus_[dd].backward(da)));
    }
    d = bridge_.backward(d);
    for (int dd = D - 1; dd >= 0; --dd) {
        Tensor dfeat = pools_[dd].backward(d);
        for (size_t i = 0; i < dfeat.numel(); ++i) dfeat[i] += dskips[dd][i];
        d = enc_[dd].backward(dfeat);
    }
    return cfg_.high_pass ? bank_.backward(d) : d;
}

Tensor LocalizerNet::input_gradient_bce(const Tensor& image, const Tensor& target, double* bce_out) {
    Tensor prob = forward(image);
    if (bce_out) *bce_out = losses::bce(prob, target);
    Tensor dprob(prob.channels(), prob.height(), prob.width());
    losses::bce_grad(prob, target, 1.0f, dprob);
    return backward(dprob);
}

}  // namespace sear::models
