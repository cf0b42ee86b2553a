#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "sear/metrics/metrics.hpp"

namespace sear::metrics {

// Per-image and aggregate results for one (attack, model, setting,
// dataset) cell. attack_rate is computed from the aggregate means over
// the images with f1_ori > 0; the rest are skipped and counted.
struct EvalReport {
    struct Row {
        std::string id;
        double f1_ori = 0, f1_anti = 0, f1_reverse = 0, psnr = 0, ssim = 0;
    };

    std::string attack, model, setting, dataset;
    std::vector<Row> rows;

    double mean_f1_ori = 0, mean_f1_anti = 0, attack_rate = 0;
    double mean_f1_reverse = 0, mean_psnr = 0, mean_ssim = 0;
    long n_excluded_zero_f1 = 0;

    void finalize();  // recompute the aggregates from rows

    nlohmann::json aggregates_json() const;
    void write_csv(const std::filesystem::path& file) const;      // per-image rows
    void write_json(const std::filesystem::path& file) const;     // aggregates
    static EvalReport read_json(const std::filesystem::path& file);
};

void write_glcm_histogram_csv(const std::filesystem::path& file, const GlcmHistogram& hist);

}  // namespace sear::metrics
