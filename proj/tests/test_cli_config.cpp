#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "sear/cli/run_config.hpp"

using namespace sear;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

json minimal_config() {
    return json{{"seed", 7},
                {"data", {{"size", 64}, {"train_fraction", 0.75}}},
                {"concealer", {{"block", "vgg"}, {"depth", 3}, {"base_channels", 16}}},
                {"localizer", {{"depth", 3}, {"base_channels", 16}, {"high_pass", true}}},
                {"train",
                 {{"learning_rate", 2e-4}, {"batch_size", 4}, {"max_iterations", 100},
                  {"weights", {{"alpha", 2.0}, {"beta", 3.0}, {"lambda", 0.5}}}}},
                {"attack", {{"epsilon", 8.0 / 255.0}, {"steps", 10}}}};
}

}  // namespace

TEST_CASE("defaults mirror the published settings") {
    cli::RunConfig c = cli::RunConfig::from_json(json::object(), ".", false);
    CHECK(c.train.weights.alpha == 2.0);
    CHECK(c.train.weights.beta == 3.0);
    CHECK(c.train.weights.lambda == 0.5);
    CHECK(c.train.learning_rate == doctest::Approx(2e-4));
    CHECK(c.train_fraction == 0.75);
    CHECK(c.concealer.dilation_rates == std::vector<int>{2, 4, 8, 16});
    CHECK(c.attack.epsilon == doctest::Approx(8.0 / 255.0));
    CHECK(c.attack.momentum == 1.0f);
}

TEST_CASE("a full config parses and echoes") {
    cli::RunConfig c = cli::RunConfig::from_json(minimal_config(), ".", false);
    CHECK(c.seed == 7);
    CHECK(c.concealer.base_channels == 16);
    json echo = c.to_json();
    CHECK(echo["train"]["weights"]["alpha"] == 2.0);
    // echo reparses to the same values
    cli::RunConfig back = cli::RunConfig::from_json(echo, ".", false);
    CHECK(back.concealer.depth == c.concealer.depth);
    CHECK(back.train.max_iterations == c.train.max_iterations);
}

TEST_CASE("unknown keys are rejected at every level") {
    auto j = minimal_config();
    j["surprise"] = 1;
    CHECK_THROWS_AS(cli::RunConfig::from_json(j, ".", false), cli::ConfigError);

    j = minimal_config();
    j["train"]["typo_lr"] = 0.1;
    CHECK_THROWS_AS(cli::RunConfig::from_json(j, ".", false), cli::ConfigError);

    j = minimal_config();
    j["data"]["rootdir"] = "x";
    CHECK_THROWS_AS(cli::RunConfig::from_json(j, ".", false), cli::ConfigError);

    j = minimal_config();
    j["train"]["weights"]["gamma"] = 1.0;
    CHECK_THROWS_AS(cli::RunConfig::from_json(j, ".", false), cli::ConfigError);
}

TEST_CASE("referenced paths must exist at validation time") {
    TempDir dir("sear_cfg_paths");
    auto j = minimal_config();
    j["data"]["root"] = (dir.path / "missing_dataset").string();
    CHECK_THROWS_AS(cli::RunConfig::from_json(j, dir.path, true), cli::ConfigError);

    fs::create_directories(dir.path / "dataset");
    j["data"]["root"] = (dir.path / "dataset").string();
    CHECK_NOTHROW(cli::RunConfig::from_json(j, dir.path, true));
}

TEST_CASE("config files load from disk with relative paths resolved") {
    TempDir dir("sear_cfg_file");
    fs::create_directories(dir.path / "data");
    auto j = minimal_config();
    j["data"]["root"] = "data";
    std::ofstream(dir.path / "run.json") << j.dump();
    cli::RunConfig c = cli::RunConfig::load(dir.path / "run.json");
    CHECK(c.data_root == dir.path / "data");
}

TEST_CASE("setting specs validate their kind and references") {
    cli::SettingSpec s;
    s.kind = "nonsense";
    s.target = "t.bin";
    CHECK_THROWS_AS(s.validate(), cli::ConfigError);

    s.kind = "whitebox";
    s.target.clear();
    CHECK_THROWS_AS(s.validate(), cli::ConfigError);

    s.target = "t.bin";
    s.attack = "sear";
    CHECK_THROWS_AS(s.validate(), cli::ConfigError);  // generator missing
    s.generator = "g.bin";
    CHECK_NOTHROW(s.validate());

    s = {};
    s.kind = "blackbox_distilled";
    s.attack = "bim";
    s.target = "t.bin";
    CHECK_THROWS_AS(s.validate(), cli::ConfigError);  // surrogate missing
    s.surrogate = "s.bin";
    CHECK_NOTHROW(s.validate());
}

TEST_CASE("invalid numeric settings are config errors") {
    auto j = minimal_config();
    j["data"]["train_fraction"] = 1.5;
    CHECK_THROWS_AS(cli::RunConfig::from_json(j, ".", false), cli::ConfigError);

    j = minimal_config();
    j["train"]["batch_size"] = 0;
    CHECK_THROWS_AS(cli::RunConfig::from_json(j, ".", false), cli::ConfigError);

    j = minimal_config();
    j["attack"]["steps"] = 0;
    CHECK_THROWS_AS(cli::RunConfig::from_json(j, ".", false), cli::ConfigError);
}
