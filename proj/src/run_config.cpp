#include "sear/cli/run_config.hpp"

#include <fstream>

namespace sear::cli {

using nlohmann::json;
namespace fs = std::filesystem;

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected a JSON object");
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) {
                ok = true;
                break;
            }
        if (!ok) throw ConfigError(where + ": unknown key '" + key + "'");
    }
}

void SettingSpec::validate() const {
    static const std::vector<std::string> kinds = {"whitebox", "blackbox_distilled", "blackbox_pure",
                                                   "retrained_defense"};
    if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end())
        throw ConfigError("setting: unknown kind '" + kind + "'");
    if (target.empty()) throw ConfigError("setting '" + kind + "': target checkpoint required");
    if (kind == "blackbox_distilled" && surrogate.empty() && (attack == "fgsm" || attack == "bim" || attack == "mim"))
        throw ConfigError("blackbox_distilled with a gradient attack needs a surrogate checkpoint");
    if ((attack == "sear" || attack == "advgan") && generator.empty())
        throw ConfigError("setting with attack '" + attack + "' needs a generator checkpoint");
}

namespace {

fs::path resolve(const fs::path& base, const std::string& p) {
    fs::path path(p);
    return path.is_absolute() ? path : base / path;
}

void require_exists(const fs::path& p, const std::string& what) {
    if (!fs::exists(p)) throw ConfigError(what + " does not exist: " + p.string());
}

train::TrainConfig train_from_json(const json& j) {
    check_keys(j,
               {"learning_rate", "batch_size", "max_iterations", "checkpoint_interval", "max_epochs",
                "patience", "weights"},
               "train");
    train::TrainConfig t;
    t.learning_rate = j.value("learning_rate", t.learning_rate);
    t.batch_size = j.value("batch_size", t.batch_size);
    t.max_iterations = j.value("max_iterations", t.max_iterations);
    t.checkpoint_interval = j.value("checkpoint_interval", t.checkpoint_interval);
    t.max_epochs = j.value("max_epochs", t.max_epochs);
    t.patience = j.value("patience", t.patience);
    if (j.contains("weights")) {
        const json& w = j["weights"];
        check_keys(w, {"alpha", "beta", "lambda"}, "train.weights");
        t.weights.alpha = w.value("alpha", t.weights.alpha);
        t.weights.beta = w.value("beta", t.weights.beta);
        t.weights.lambda = w.value("lambda", t.weights.lambda);
    }
    try {
        t.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("train: ") + e.what());
    }
    return t;
}

attacks::AttackConfig attack_from_json(const json& j) {
    check_keys(j, {"epsilon", "steps", "step_size", "momentum"}, "attack");
    attacks::AttackConfig a;
    a.epsilon = j.value("epsilon", a.epsilon);
    a.steps = j.value("steps", a.steps);
    a.step_size = j.value("step_size", a.step_size);
    a.momentum = j.value("momentum", a.momentum);
    try {
        a.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("attack: ") + e.what());
    }
    return a;
}

}  // namespace

RunConfig RunConfig::from_json(const json& j, const fs::path& base_dir, bool check_paths) {
    check_keys(j, {"seed", "data", "concealer", "localizer", "surrogate", "train", "attack", "eval"},
               "config");
    RunConfig c;
    c.seed = j.value("seed", c.seed);

    if (j.contains("data")) {
        const json& d = j["data"];
        check_keys(d, {"root", "size", "train_fraction"}, "data");
        if (d.contains("root")) c.data_root = resolve(base_dir, d["root"].get<std::string>());
        c.input_size = d.value("size", c.input_size);
        c.train_fraction = d.value("train_fraction", c.train_fraction);
        if (!(c.train_fraction > 0.0 && c.train_fraction < 1.0))
            throw ConfigError("data.train_fraction must be in (0,1)");
        if (check_paths && !c.data_root.empty()) require_exists(c.data_root, "data.root");
    }

    try {
        if (j.contains("concealer")) {
            check_keys(j["concealer"], {"block", "depth", "base_channels", "dilation_rates"}, "concealer");
            c.concealer = models::concealer_config_from_json(j["concealer"]);
        }
        if (j.contains("localizer")) {
            check_keys(j["localizer"], {"kind", "block", "high_pass", "depth", "base_channels", "dilation_rates"},
                       "localizer");
            c.localizer = models::localizer_config_from_json(j["localizer"]);
        }
        if (j.contains("surrogate")) {
            check_keys(j["surrogate"], {"kind", "block", "high_pass", "depth", "base_channels", "dilation_rates"},
                       "surrogate");
            c.surrogate = models::localizer_config_from_json(j["surrogate"]);
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("model config: ") + e.what());
    }

    if (j.contains("train")) c.train = train_from_json(j["train"]);
    c.train.seed = c.seed;
    c.train.input_size = c.input_size;
    if (j.contains("attack")) c.attack = attack_from_json(j["attack"]);

    if (j.contains("eval")) {
        check_keys(j["eval"], {"settings"}, "eval");
        for (const json& s : j["eval"].value("settings", json::array())) {
            check_keys(s, {"kind", "attack", "target", "surrogate", "generator", "label"}, "eval.settings[]");
            SettingSpec spec;
            spec.kind = s.value("kind", "");
            spec.attack = s.value("attack", "identity");
            if (s.contains("target")) spec.target = resolve(base_dir, s["target"].get<std::string>());
            if (s.contains("surrogate")) spec.surrogate = resolve(base_dir, s["surrogate"].get<std::string>());
            if (s.contains("generator")) spec.generator = resolve(base_dir, s["generator"].get<std::string>());
            spec.label = s.value("label", spec.kind + "_" + spec.attack);
            spec.validate();
            if (check_paths) {
                require_exists(spec.target, "setting target");
                if (!spec.surrogate.empty()) require_exists(spec.surrogate, "setting surrogate");
                if (!spec.generator.empty()) require_exists(spec.generator, "setting generator");
            }
            c.settings.push_back(std::move(spec));
        }
    }
    return c;
}

RunConfig RunConfig::load(const fs::path& file, bool check_paths) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open config file: " + file.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("config parse error in " + file.string() + ": " + e.what());
    }
    return from_json(j, file.parent_path(), check_paths);
}

json RunConfig::to_json() const {
    json j;
    j["seed"] = seed;
    j["data"] = {{"root", data_root.string()}, {"size", input_size}, {"train_fraction", train_fraction}};
    j["concealer"] = models::concealer_config_to_json(concealer);
    j["localizer"] = models::localizer_config_to_json(localizer);
    j["surrogate"] = models::localizer_config_to_json(surrogate);
    j["train"] = {{"learning_rate", train.learning_rate},
                  {"batch_size", train.batch_size},
                  {"max_iterations", train.max_iterations},
                  {"checkpoint_interval", train.checkpoint_interval},
                  {"max_epochs", train.max_epochs},
                  {"patience", train.patience},
                  {"weights",
                   {{"alpha", train.weights.alpha},
                    {"beta", train.weights.beta},
                    {"lambda", train.weights.lambda}}}};
    j["attack"] = {{"epsilon", attack.epsilon},
                   {"steps", attack.steps},
                   {"step_size", attack.step_size},
                   {"momentum", attack.momentum}};
    json settings_json = json::array();
    for (const auto& s : settings)
        settings_json.push_back({{"kind", s.kind},
                                 {"attack", s.attack},
                                 {"target", s.target.string()},
                                 {"surrogate", s.surrogate.string()},
                                 {"generator", s.generator.string()},
                                 {"label", s.label}});
    j["eval"]["settings"] = settings_json;
    return j;
}

}  // namespace sear::cli
