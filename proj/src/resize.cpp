#include "sear/data/resize.hpp"

#include <cmath>

namespace sear::data {

Tensor resize_bilinear(const Tensor& t, int out_h, int out_w) {
    if (t.height() == out_h && t.width() == out_w) return t;
    Tensor out(t.channels(), out_h, out_w);
    const double sy = static_cast<double>(t.height()) / out_h;
    const double sx = static_cast<double>(t.width()) / out_w;
    for (int y = 0; y < out_h; ++y) {
        double fy = (y + 0.5) * sy - 0.5;
        int y0 = static_cast<int>(std::floor(fy));
        double wy = fy - y0;
        int y0c = std::clamp(y0, 0, t.height() - 1);
        int y1c = std::clamp(y0 + 1, 0, t.height() - 1);
        for (int x = 0; x < out_w; ++x) {
            double fx = (x + 0.5) * sx - 0.5;
            int x0 = static_cast<int>(std::floor(fx));
            double wx = fx - x0;
            int x0c = std::clamp(x0, 0, t.width() - 1);
            int x1c = std::clamp(x0 + 1, 0, t.width() - 1);
            for (int c = 0; c < t.channels(); ++c) {
                double top = (1.0 - wx) * t.at(c, y0c, x0c) + wx * t.at(c, y0c, x1c);
                double bot = (1.0 - wx) * t.at(c, y1c, x0c) + wx * t.at(c, y1c, x1c);
                out.at(c, y, x) = static_cast<float>((1.0 - wy) * top + wy * bot);
            }
        }
    }
    return out;
}

Tensor resize_nearest(const Tensor& t, int out_h, int out_w) {
    if (t.height() == out_h && t.width() == out_w) return t;
    Tensor out(t.channels(), out_h, out_w);
    for (int y = 0; y < out_h; ++y) {
        int sy = std::min(t.height() - 1,
                          static_cast<int>(std::floor((y + 0.5) * static_cast<double>(t.height()) / out_h)));
        for (int x = 0; x < out_w; ++x) {
            int sx = std::min(t.width() - 1,
                              static_cast<int>(std::floor((x + 0.5) * static_cast<double>(t.width()) / out_w)));
            for (int c = 0; c < t.channels(); ++c) out.at(c, y, x) = t.at(c, sy, sx);
        }
    }
    return out;
}

ForgerySample resize_sample(const ForgerySample& sample, int size) {
    if (size < 16) throw DataError("resize_sample: size must be >= 16");
    ForgerySample out;
    out.id = sample.id;
    out.image = clamped(resize_bilinear(sample.image, size, size), 0.0f, 1.0f);
    out.mask = resize_nearest(sample.mask, size, size);
    return out;
}

}  // namespace sear::data
