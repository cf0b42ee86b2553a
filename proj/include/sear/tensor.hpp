#pragma once

#include <cassert>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sear {

// Dense CHW float tensor. Images are {3,H,W} in [0,1], masks {1,H,W},
// feature maps {C,H,W}. Batches are handled by looping, not by a 4th axis.
class Tensor {
public:
    Tensor() = default;
    Tensor(int c, int h, int w) : c_(c), h_(h), w_(w), data_(static_cast<size_t>(c) * h * w, 0.0f) {
        if (c <= 0 || h <= 0 || w <= 0) throw std::invalid_argument("Tensor: non-positive dims");
    }

    int channels() const { return c_; }
    int height() const { return h_; }
    int width() const { return w_; }
    size_t numel() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    bool same_shape(const Tensor& o) const { return c_ == o.c_ && h_ == o.h_ && w_ == o.w_; }

    float& at(int c, int y, int x) {
        assert(c >= 0 && c < c_ && y >= 0 && y < h_ && x >= 0 && x < w_);
        return data_[(static_cast<size_t>(c) * h_ + y) * w_ + x];
    }
    float at(int c, int y, int x) const {
        assert(c >= 0 && c < c_ && y >= 0 && y < h_ && x >= 0 && x < w_);
        return data_[(static_cast<size_t>(c) * h_ + y) * w_ + x];
    }
    float& operator[](size_t i) { return data_[i]; }
    float operator[](size_t i) const { return data_[i]; }

    float* data() { return data_.data(); }
    const float* data() const { return data_.data(); }
    // channel plane pointer
    float* plane(int c) { return data_.data() + static_cast<size_t>(c) * h_ * w_; }
    const float* plane(int c) const { return data_.data() + static_cast<size_t>(c) * h_ * w_; }

    void fill(float v) { std::fill(data_.begin(), data_.end(), v); }
    void zero() { fill(0.0f); }

    std::string shape_str() const {
        return "{" + std::to_string(c_) + "," + std::to_string(h_) + "," + std::to_string(w_) + "}";
    }

private:
    int c_ = 0, h_ = 0, w_ = 0;
    std::vector<float> data_;
};

inline void check_same_shape(const Tensor& a, const Tensor& b, const char* where) {
    if (!a.same_shape(b))
        throw std::invalid_argument(std::string(where) + ": shape mismatch " + a.shape_str() + " vs " + b.shape_str());
}

// y = clamp(x, lo, hi), elementwise
inline Tensor clamped(const Tensor& x, float lo, float hi) {
    Tensor y = x;
    for (size_t i = 0; i < y.numel(); ++i) y[i] = std::min(hi, std::max(lo, y[i]));
    return y;
}

bool all_finite(const Tensor& t);

// FNV-1a over the raw float bytes; used for freeze/alternation contracts.
uint64_t bytes_hash(const float* p, size_t n);

}  // namespace sear
