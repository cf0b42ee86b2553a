#include "sear/models/concealer.hpp"

#include <stdexcept>

namespace sear::models {

void ConcealerConfig::validate() const {
    if (depth < 1) throw std::invalid_argument("concealer: depth must be >= 1");
    if (base_channels < 1) throw std::invalid_argument("concealer: base_channels must be >= 1");
    if (dilation_rates.empty()) throw std::invalid_argument("concealer: need dilation rates");
    for (size_t i = 1; i < dilation_rates.size(); ++i)
        if (dilation_rates[i] <= dilation_rates[i - 1])
            throw std::invalid_argument("concealer: dilation rates must be strictly increasing");
}

void check_divisible(const Tensor& image, int stride, const char* who) {
    if (image.height() % stride != 0 || image.width() % stride != 0)
        throw std::invalid_argument(std::string(who) + ": input " + image.shape_str() + " not divisible by " +
                                    std::to_string(stride) + "; pad or resize the image first");
}

ConcealerNet::ConcealerNet(ConcealerConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    const int D = cfg_.depth;
    int in_ch = 3;
    for (int d = 0; d < D; ++d) {
        const int out_ch = cfg_.base_channels << d;
        enc_.emplace_back("enc" + std::to_string(d), cfg_.block, in_ch, out_ch);
        skip_channels_.push_back(out_ch);
        in_ch = out_ch;
    }
    pools_.resize(D);
    const int bottom = cfg_.base_channels << (D - 1);
    bridge_ = DilatedBridge("bridge", bottom, cfg_.dilation_rates);

    ups_.resize(D);
    up_relus_.resize(D);
    // decoder runs d = D-1 .. 0; up_convs_[d] maps the incoming feature to
    // base<<d channels before the concat with the matching encoder output
    up_convs_.resize(D);
    for (int d = D - 1; d >= 0; --d) {
        const int dec_in = (d == D - 1) ? bottom : 2 * (cfg_.base_channels << (d + 1));
        up_convs_[d] = nn::Conv2d("dec" + std::to_string(d) + ".conv", dec_in, cfg_.base_channels << d, 3);
    }
    head_ = nn::Conv2d("head", 2 * cfg_.base_channels, 3, 3);
}

void ConcealerNet::init(uint64_t seed) {
    Rng rng(Rng::derive(seed, 0xC0CEA1));
    for (auto& b : enc_) b.init(rng);
    bridge_.init(rng);
    for (auto& c : up_convs_) c.init_he(rng);
    head_.init_zero();
}

std::vector<nn::Param*> ConcealerNet::params() {
    std::vector<nn::Param*> out;
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

size_t ConcealerNet::param_count() {
    size_t n = 0;
    for (auto* p : params()) n += p->size();
    return n;
}

Tensor ConcealerNet::forward(const Tensor& image) {
    if (image.channels() != 3) throw std::invalid_argument("concealer: expected a 3-channel image");
    check_divisible(image, cfg_.stride(), "concealer");

    const int D = cfg_.depth;
    std::vector<Tensor> skips(D);
    Tensor x = image;
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
    return head_.forward(x);
}

Tensor ConcealerNet::backward(const Tensor& ddelta) {
    const int D = cfg_.depth;
    Tensor d = head_.backward(ddelta);
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
    return d;
}

Tensor compose_anti_image(const Tensor& image, const Tensor& delta) {
    check_same_shape(image, delta, "compose_anti_image");
    Tensor out = image;
    for (size_t i = 0; i < out.numel(); ++i) out[i] = std::min(1.0f, std::max(0.0f, image[i] + delta[i]));
    return out;
}

Tensor compose_backward_mask(const Tensor& image, const Tensor& delta) {
    Tensor m(image.channels(), image.height(), image.width());
    for (size_t i = 0; i < m.numel(); ++i) {
        const float s = image[i] + delta[i];
        m[i] = (s >= 0.0f && s <= 1.0f) ? 1.0f : 0.0f;
    }
    return m;
}

}  // namespace sear::models
