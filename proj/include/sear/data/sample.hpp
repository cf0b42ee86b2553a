#pragma once

#include <filesystem>
#include <string>

#include "sear/data/png_io.hpp"
#include "sear/tensor.hpp"

namespace sear::data {

// One forged image with its pixel-level ground truth.
// image: {3,H,W} in [0,1]; mask: {1,H,W} with values exactly 0 or 1
// (1 = tampered, 0 = pristine).
struct ForgerySample {
    Tensor image;
    Tensor mask;
    std::string id;

    void validate() const;  // throws DataError on any broken invariant
};

struct ManifestEntry {
    std::string id;
    std::filesystem::path image_path;
    std::filesystem::path mask_path;
};

// Decodes the pair behind an entry. Images are scaled to [0,1] by /255;
// masks are binarized with value > 127 -> 1 (antialiased mask PNGs are
// common, so a midpoint threshold instead of requiring pure 0/255).
ForgerySample load_sample(const ManifestEntry& entry);

// Writes <root>/images/<id>.png and <root>/masks/<id>.png and returns the
// entry. Round trip restores the mask exactly and the image within 1/255.
ManifestEntry save_sample(const std::filesystem::path& root, const ForgerySample& sample);

PngImage to_png8(const Tensor& image);       // clamp + round to 8-bit
Tensor from_png8(const PngImage& img);       // /255 to [0,1]

}  // namespace sear::data
