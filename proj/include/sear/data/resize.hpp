#pragma once

#include "sear/data/sample.hpp"
#include "sear/tensor.hpp"

namespace sear::data {

// Bilinear with half-pixel centers: src = (dst + 0.5) * in/out - 0.5,
// edges clamped. Equal sizes reproduce the input bit-exactly.
Tensor resize_bilinear(const Tensor& t, int out_h, int out_w);

// Nearest neighbour, src = floor((dst + 0.5) * in/out); keeps masks binary.
Tensor resize_nearest(const Tensor& t, int out_h, int out_w);

// Image bilinear (re-clamped to [0,1]), mask nearest. size >= 16.
ForgerySample resize_sample(const ForgerySample& sample, int size);

}  // namespace sear::data
