#pragma once

#include <filesystem>
#include <vector>

#include <json.hpp>

#include "sear/attacks/attacks.hpp"
#include "sear/models/checkpoint.hpp"
#include "sear/train/train.hpp"

namespace sear::cli {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One cell of the experiment matrix.
struct SettingSpec {
    std::string kind;  // whitebox | blackbox_distilled | blackbox_pure | retrained_defense
    std::string attack = "identity";
    std::filesystem::path target;     // localizer checkpoint
    std::filesystem::path surrogate;  // blackbox_distilled only
    std::filesystem::path generator;  // sear / advgan checkpoint
    std::string label;

    void validate() const;
};

// Single-file JSON configuration; unknown keys are rejected and every
// referenced path must exist at validation time.
struct RunConfig {
    uint64_t seed = 7;

    std::filesystem::path data_root;
    int input_size = 64;
    double train_fraction = 0.75;

    models::ConcealerConfig concealer;
    models::LocalizerConfig localizer;
    models::LocalizerConfig surrogate = models::LocalizerConfig::small_distill_defaults();

    train::TrainConfig train;
    attacks::AttackConfig attack;
    std::vector<SettingSpec> settings;

    static RunConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir,
                               bool check_paths);
    static RunConfig load(const std::filesystem::path& file, bool check_paths = true);
    nlohmann::json to_json() const;
};

// rejects keys outside `allowed`
void check_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed, const std::string& where);

}  // namespace sear::cli
