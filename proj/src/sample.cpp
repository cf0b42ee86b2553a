#include "sear/data/sample.hpp"

#include <cmath>

namespace sear::data {

void ForgerySample::validate() const {
    if (image.channels() != 3) throw DataError("sample " + id + ": image must have 3 channels");
    if (mask.channels() != 1) throw DataError("sample " + id + ": mask must have 1 channel");
    if (image.height() != mask.height() || image.width() != mask.width())
        throw DataError("sample " + id + ": image/mask spatial dims differ");
    for (size_t i = 0; i < image.numel(); ++i)
        if (!(image[i] >= 0.0f && image[i] <= 1.0f))
            throw DataError("sample " + id + ": image value outside [0,1]");
    for (size_t i = 0; i < mask.numel(); ++i)
        if (mask[i] != 0.0f && mask[i] != 1.0f)
            throw DataError("sample " + id + ": mask value not in {0,1}");
}

ForgerySample load_sample(const ManifestEntry& entry) {
    PngImage img = read_png(entry.image_path, 3);
    PngImage msk = read_png(entry.mask_path, 1);
    if (img.width != msk.width || img.height != msk.height)
        throw DataError("sample " + entry.id + ": image and mask sizes differ");

    ForgerySample s;
    s.id = entry.id;
    s.image = from_png8(img);
    s.mask = Tensor(1, msk.height, msk.width);
    for (int y = 0; y < msk.height; ++y)
        for (int x = 0; x < msk.width; ++x) s.mask.at(0, y, x) = msk.at(y, x, 0) > 127 ? 1.0f : 0.0f;
    return s;
}

ManifestEntry save_sample(const std::filesystem::path& root, const ForgerySample& sample) {
    std::filesystem::create_directories(root / "images");
    std::filesystem::create_directories(root / "masks");

    ManifestEntry e;
    e.id = sample.id;
    e.image_path = root / "images" / (sample.id + ".png");
    e.mask_path = root / "masks" / (sample.id + ".png");

    write_png(e.image_path, to_png8(sample.image));

    PngImage m;
    m.width = sample.mask.width();
    m.height = sample.mask.height();
    m.channels = 1;
    m.pixels.resize(sample.mask.numel());
    for (int y = 0; y < m.height; ++y)
        for (int x = 0; x < m.width; ++x)
            m.pixels[static_cast<size_t>(y) * m.width + x] = sample.mask.at(0, y, x) > 0.5f ? 255 : 0;
    write_png(e.mask_path, m);
    return e;
}

PngImage to_png8(const Tensor& image) {
    PngImage p;
    p.width = image.width();
    p.height = image.height();
    p.channels = image.channels();
    p.pixels.resize(image.numel());
    for (int y = 0; y < p.height; ++y)
        for (int x = 0; x < p.width; ++x)
            for (int c = 0; c < p.channels; ++c) {
                float v = std::min(1.0f, std::max(0.0f, image.at(c, y, x)));
                p.pixels[(static_cast<size_t>(y) * p.width + x) * p.channels + c] =
                    static_cast<uint8_t>(std::lround(v * 255.0f));
            }
    return p;
}

Tensor from_png8(const PngImage& img) {
    Tensor t(img.channels, img.height, img.width);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            for (int c = 0; c < img.channels; ++c) t.at(c, y, x) = static_cast<float>(img.at(y, x, c)) / 255.0f;
    return t;
}

}  // namespace sear::data
