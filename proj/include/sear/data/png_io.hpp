#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace sear::data {

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Decoded 8-bit image, row-major, interleaved channels.
struct PngImage {
    int width = 0;
    int height = 0;
    int channels = 0;  // 1 or 3
    std::vector<uint8_t> pixels;

    uint8_t at(int y, int x, int c) const { return pixels[(static_cast<size_t>(y) * width + x) * channels + c]; }
};

// Reads an 8-bit PNG. want_channels selects the decode target:
//   3 -> gray/palette/RGBA are expanded or stripped to RGB
//   1 -> grayscale required; alpha is stripped, color input is an error
// Throws DataError on missing or undecodable files.
PngImage read_png(const std::filesystem::path& path, int want_channels);

void write_png(const std::filesystem::path& path, const PngImage& img);

}  // namespace sear::data
