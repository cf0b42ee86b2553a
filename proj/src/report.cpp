#include "sear/metrics/report.hpp"

#include <fstream>

namespace sear::metrics {

using nlohmann::json;

void EvalReport::finalize() {
    double so = 0, sa = 0, sr = 0, sp = 0, ss = 0;
    long included = 0;
    n_excluded_zero_f1 = 0;
    for (const Row& r : rows) {
        sr += r.f1_reverse;
        sp += r.psnr;
        ss += r.ssim;
        if (r.f1_ori > 0.0) {
            so += r.f1_ori;
            sa += r.f1_anti;
            ++included;
        } else {
            ++n_excluded_zero_f1;
        }
    }
    const double n = static_cast<double>(rows.size());
    mean_f1_reverse = rows.empty() ? 0.0 : sr / n;
    mean_psnr = rows.empty() ? 0.0 : sp / n;
    mean_ssim = rows.empty() ? 0.0 : ss / n;
    if (included > 0) {
        mean_f1_ori = so / included;
        mean_f1_anti = sa / included;
        attack_rate = metrics::attack_rate(mean_f1_ori, mean_f1_anti);
    } else {
        mean_f1_ori = mean_f1_anti = 0.0;
        attack_rate = std::numeric_limits<double>::quiet_NaN();
    }
}

json EvalReport::aggregates_json() const {
    return {{"attack", attack},
            {"model", model},
            {"setting", setting},
            {"dataset", dataset},
            {"n_images", rows.size()},
            {"n_excluded_zero_f1", n_excluded_zero_f1},
            {"mean_f1_ori", mean_f1_ori},
            {"mean_f1_anti", mean_f1_anti},
            {"attack_rate", attack_rate},
            {"mean_f1_reverse", mean_f1_reverse},
            {"mean_psnr", mean_psnr},
            {"mean_ssim", mean_ssim}};
}

void EvalReport::write_csv(const std::filesystem::path& file) const {
    if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot write " + file.string());
    out << "id,f1_ori,f1_anti,f1_reverse,psnr,ssim\n";
    for (const Row& r : rows)
        out << r.id << ',' << r.f1_ori << ',' << r.f1_anti << ',' << r.f1_reverse << ',' << r.psnr << ','
            << r.ssim << '\n';
}

void EvalReport::write_json(const std::filesystem::path& file) const {
    if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot write " + file.string());
    out << aggregates_json().dump(2) << "\n";
}

EvalReport EvalReport::read_json(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot read " + file.string());
    json j = json::parse(in);
    EvalReport r;
    r.attack = j.value("attack", "");
    r.model = j.value("model", "");
    r.setting = j.value("setting", "");
    r.dataset = j.value("dataset", "");
    r.n_excluded_zero_f1 = j.value("n_excluded_zero_f1", 0L);
    r.mean_f1_ori = j.value("mean_f1_ori", 0.0);
    r.mean_f1_anti = j.value("mean_f1_anti", 0.0);
    r.attack_rate = j.value("attack_rate", 0.0);
    r.mean_f1_reverse = j.value("mean_f1_reverse", 0.0);
    r.mean_psnr = j.value("mean_psnr", 0.0);
    r.mean_ssim = j.value("mean_ssim", 0.0);
    return r;
}

void write_glcm_histogram_csv(const std::filesystem::path& file, const GlcmHistogram& hist) {
    if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot write " + file.string());
    out << "bin_left,bin_right,count\n";
    for (size_t i = 0; i < hist.count.size(); ++i)
        out << hist.bin_left[i] << ',' << hist.bin_right[i] << ',' << hist.count[i] << '\n';
}

}  // namespace sear::metrics
