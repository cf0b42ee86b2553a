#pragma once

#include <vector>

#include "sear/data/sample.hpp"

namespace sear::data {

// Procedural splice generator: a textured background with a patch copied
// in place from a second texture. The mask marks exactly the pasted
// pixels; tampered area fraction lies in [5%, 40%]. Byte-identical output
// for a given seed. size >= 32.
std::vector<ForgerySample> synth_toy_forgery(uint64_t seed, int size, int count);

}  // namespace sear::data
