#include <cmath>

#include "sear/metrics/metrics.hpp"

namespace sear::metrics {

namespace {

// BT.601 luma on the 0..255 integer scale, then quantization to `levels`
int quantize_gray(const Tensor& img, int y, int x, int levels) {
    double g;
    if (img.channels() == 1) {
        g = img.at(0, y, x) * 255.0;
    } else {
        g = 255.0 * (0.299 * img.at(0, y, x) + 0.587 * img.at(1, y, x) + 0.114 * img.at(2, y, x));
    }
    const int gi = std::clamp(static_cast<int>(std::lround(g)), 0, 255);
    return std::min(levels - 1, gi * levels / 256);
}

}  // namespace

std::vector<double> glcm_matrix(const Tensor& image, int levels, std::pair<int, int> offset) {
    if (levels < 2) throw std::invalid_argument("glcm: levels must be >= 2");
    const auto [dy, dx] = offset;
    const int h = image.height(), w = image.width();

    std::vector<int> q(static_cast<size_t>(h) * w);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) q[static_cast<size_t>(y) * w + x] = quantize_gray(image, y, x, levels);

    std::vector<double> p(static_cast<size_t>(levels) * levels, 0.0);
    long pairs = 0;
    for (int y = 0; y < h; ++y) {
        const int yy = y + dy;
        if (yy < 0 || yy >= h) continue;
        for (int x = 0; x < w; ++x) {
            const int xx = x + dx;
            if (xx < 0 || xx >= w) continue;
            const int i = q[static_cast<size_t>(y) * w + x];
            const int j = q[static_cast<size_t>(yy) * w + xx];
            p[static_cast<size_t>(i) * levels + j] += 1.0;  // symmetric accumulation
            p[static_cast<size_t>(j) * levels + i] += 1.0;
            pairs += 2;
        }
    }
    if (pairs == 0) throw std::invalid_argument("glcm: offset leaves no pixel pairs");
    for (double& v : p) v /= static_cast<double>(pairs);
    return p;
}

double glcm_contrast(const Tensor& image, int levels, std::pair<int, int> offset) {
    const std::vector<double> p = glcm_matrix(image, levels, offset);
    double contrast = 0.0;
    for (int i = 0; i < levels; ++i)
        for (int j = 0; j < levels; ++j) contrast += p[static_cast<size_t>(i) * levels + j] * (i - j) * (i - j);
    return contrast;
}

GlcmHistogram glcm_diff_histogram(const std::vector<std::pair<Tensor, Tensor>>& pairs, int bins, double lo,
                                  double hi) {
    if (bins < 1 || !(hi > lo)) throw std::invalid_argument("glcm_diff_histogram: bad binning");
    GlcmHistogram hist;
    const double width = (hi - lo) / bins;
    for (int b = 0; b < bins; ++b) {
        hist.bin_left.push_back(lo + b * width);
        hist.bin_right.push_back(lo + (b + 1) * width);
        hist.count.push_back(0);
    }
    for (const auto& [origin, anti] : pairs) {
        const double d = glcm_contrast(origin) - glcm_contrast(anti);
        int b = static_cast<int>(std::floor((d - lo) / width));
        b = std::clamp(b, 0, bins - 1);  // out-of-range mass lands in the edge bins
        ++hist.count[b];
        ++hist.total;
    }
    return hist;
}

}  // namespace sear::metrics
