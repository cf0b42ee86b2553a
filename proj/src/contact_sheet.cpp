#include "sear/harness/harness.hpp"

namespace sear::harness {

namespace {
constexpr int kPad = 2;

void blit(data::PngImage& sheet, const Tensor& t, int y0, int x0) {
    for (int y = 0; y < t.height(); ++y)
        for (int x = 0; x < t.width(); ++x)
            for (int c = 0; c < 3; ++c) {
                const float v = t.channels() == 3 ? t.at(c, y, x) : t.at(0, y, x);
                const int vi = static_cast<int>(std::lround(std::min(1.0f, std::max(0.0f, v)) * 255.0f));
                sheet.pixels[(static_cast<size_t>(y0 + y) * sheet.width + (x0 + x)) * 3 + c] =
                    static_cast<uint8_t>(vi);
            }
}
}  // namespace

void write_contact_sheet(const std::filesystem::path& path, const std::vector<std::array<Tensor, 5>>& rows) {
    if (rows.empty()) throw HarnessError("write_contact_sheet: no rows");
    const int h = rows[0][0].height(), w = rows[0][0].width();

    data::PngImage sheet;
    sheet.channels = 3;
    sheet.width = 5 * w + 6 * kPad;
    sheet.height = static_cast<int>(rows.size()) * h + (static_cast<int>(rows.size()) + 1) * kPad;
    sheet.pixels.assign(static_cast<size_t>(sheet.width) * sheet.height * 3, 32);

    for (size_t r = 0; r < rows.size(); ++r)
        for (int col = 0; col < 5; ++col)
            blit(sheet, rows[r][col], kPad + static_cast<int>(r) * (h + kPad), kPad + col * (w + kPad));

    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    data::write_png(path, sheet);
}

}  // namespace sear::harness
