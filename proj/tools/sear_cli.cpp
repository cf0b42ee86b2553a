// Command-line front end: dataset synthesis, training, attacks and the
// evaluation matrix. Exit codes: 0 ok, 2 configuration error, 3 runtime
// failure.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "sear/cli/run_config.hpp"
#include "sear/data/resize.hpp"
#include "sear/data/synth.hpp"
#include "sear/harness/harness.hpp"
#include "sear/metrics/report.hpp"

using namespace sear;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// SEAR_RUN_ROOT reroutes relative output paths, e.g. for scratch disks
fs::path resolve_out(const std::string& out) {
    fs::path p(out);
    if (p.is_absolute()) return p;
    if (const char* root = std::getenv("SEAR_RUN_ROOT")) return fs::path(root) / p;
    return p;
}

void ensure_out_dir(const fs::path& dir, bool force) {
    if (fs::exists(dir) && !fs::is_empty(dir) && !force)
        throw cli::ConfigError("output directory exists and is not empty (use --force): " + dir.string());
    fs::create_directories(dir);
}

void write_config_echo(const fs::path& dir, const cli::RunConfig& cfg) {
    std::ofstream(dir / "config.json") << cfg.to_json().dump(2) << "\n";
}

cli::RunConfig load_config(const std::string& config_path, uint64_t seed_override) {
    cli::RunConfig cfg = config_path.empty() ? cli::RunConfig::from_json(json::object(), ".", false)
                                             : cli::RunConfig::load(config_path);
    if (seed_override != 0) {
        cfg.seed = seed_override;
        cfg.train.seed = seed_override;
    }
    return cfg;
}

std::pair<data::DatasetManifest, data::DatasetManifest> split_of(const cli::RunConfig& cfg,
                                                                 const fs::path& data_root) {
    auto manifest = data::load_manifest(data_root);
    return data::split_dataset(manifest, {cfg.train_fraction, cfg.seed});
}

data::DatasetManifest pick_split(const cli::RunConfig& cfg, const fs::path& root, const std::string& which) {
    if (which == "all") return data::load_manifest(root);
    auto [train, test] = split_of(cfg, root);
    if (which == "train") return train;
    if (which == "test") return test;
    throw cli::ConfigError("--split must be train, test or all");
}

harness::AttackSpec make_spec(const cli::RunConfig& cfg, const std::string& method,
                              const std::string& generator) {
    harness::AttackSpec spec;
    spec.method = harness::attack_method_from_string(method);
    spec.config = cfg.attack;
    if (!generator.empty()) spec.generator_ckpt = generator;
    return spec;
}

// ------------------------------------------------------------- commands

int cmd_synth_data(const std::string& out, int count, int size, uint64_t seed, bool force) {
    const fs::path dir = resolve_out(out);
    ensure_out_dir(dir, force);
    auto samples = data::synth_toy_forgery(seed, size, count);
    data::DatasetManifest manifest;
    manifest.root = dir;
    for (const auto& s : samples) manifest.entries.push_back(data::save_sample(dir, s));
    data::write_manifest_jsonl(dir / "manifest.jsonl", manifest);
    // verify everything decodes and validates before declaring success
    for (const auto& e : manifest.entries) data::load_sample(e).validate();
    json echo{{"command", "synth-data"}, {"count", count}, {"size", size}, {"seed", seed}};
    std::ofstream(dir / "synth_config.json") << echo.dump(2) << "\n";
    std::cout << "wrote " << count << " samples to " << dir << "\n";
    return 0;
}

int cmd_train_supervisor(const cli::RunConfig& cfg, const fs::path& data_root, const std::string& out,
                         bool force) {
    const fs::path dir = resolve_out(out);
    ensure_out_dir(dir, force);
    write_config_echo(dir, cfg);

    auto [train_m, test_m] = split_of(cfg, data_root);
    json split{{"train_ids", train_m.ids()}, {"test_ids", test_m.ids()}};
    std::ofstream(dir / "split.json") << split.dump(2) << "\n";

    models::LocalizerNet net(cfg.localizer);
    net.init(cfg.seed);
    auto history = train::pretrain_supervisor(net, train_m, test_m, cfg.train);

    json hist = json::array();
    for (const auto& h : history)
        hist.push_back({{"epoch", h.epoch}, {"train_bce", h.train_bce}, {"val_f1", h.val_f1}});
    std::ofstream(dir / "history.json") << hist.dump(2) << "\n";

    models::save_localizer(dir / "ckpt_final.bin", net, {{"trained_on", data_root.string()}});
    const double f1 = history.empty() ? 0.0 : history.back().val_f1;
    double best = 0.0;
    for (const auto& h : history) best = std::max(best, h.val_f1);
    std::cout << "supervisor trained: " << history.size() << " epochs, best held-out F1 " << best << " (last "
              << f1 << ")\n";
    return 0;
}

int cmd_train_sear(const cli::RunConfig& cfg, const fs::path& data_root, const fs::path& supervisor_ckpt,
                   const std::string& out, bool force, bool no_pretext, bool static_supervisor, bool resume) {
    const fs::path dir = resolve_out(out);
    if (!resume) ensure_out_dir(dir, force);
    write_config_echo(dir, cfg);

    auto [train_m, test_m] = split_of(cfg, data_root);
    models::LocalizerNet supervisor = models::load_localizer(supervisor_ckpt);
    models::ConcealerNet concealer(cfg.concealer);
    concealer.init(cfg.seed);

    train::LoopOptions opts;
    opts.run_dir = dir;
    opts.resume = resume;
    opts.use_pretext = !no_pretext;
    opts.update_supervisor = !static_supervisor;
    auto reports = train::train_loop(concealer, supervisor, train_m, cfg.train, opts);

    models::save_concealer(dir / "concealer.bin", concealer);
    if (!reports.empty())
        std::cout << "sear trained to iteration " << reports.back().iteration << ", Loss_Concealer "
                  << reports.back().loss_concealer << "\n";
    std::cout << "generator checkpoint: " << (dir / "concealer.bin") << "\n";
    return 0;
}

int cmd_attack(const cli::RunConfig& cfg, const fs::path& data_root, const std::string& split,
               const std::string& method, const fs::path& target_ckpt, const std::string& generator,
               const std::string& out, bool force) {
    const fs::path dir = resolve_out(out);
    ensure_out_dir(dir, force);

    auto manifest = pick_split(cfg, data_root, split);
    auto samples = train::load_all(manifest, cfg.input_size);

    harness::AttackSpec spec = make_spec(cfg, method, generator);
    std::optional<models::LocalizerNet> target;
    models::GradLocalizer* grad_target = nullptr;
    if (!target_ckpt.empty()) {
        target.emplace(models::load_localizer(target_ckpt));
        grad_target = &*target;
    }
    auto attack = harness::make_attack(spec, grad_target);

    fs::create_directories(dir / "images");
    json sidecar;
    sidecar["method"] = method;
    sidecar["epsilon"] = cfg.attack.epsilon;
    sidecar["steps"] = cfg.attack.steps;
    sidecar["momentum"] = cfg.attack.momentum;
    sidecar["images"] = json::array();
    for (const auto& s : samples) {
        Tensor anti = attack(s);
        data::write_png(dir / "images" / (s.id + ".png"), data::to_png8(anti));
        float linf = 0;
        for (size_t i = 0; i < anti.numel(); ++i) linf = std::max(linf, std::fabs(anti[i] - s.image[i]));
        sidecar["images"].push_back({{"id", s.id}, {"linf", linf}});
    }
    std::ofstream(dir / "attack.json") << sidecar.dump(2) << "\n";
    std::cout << "wrote " << samples.size() << " anti-forensic images to " << (dir / "images") << "\n";
    return 0;
}

int cmd_distill(const cli::RunConfig& cfg, const fs::path& data_root, const fs::path& target_ckpt,
                const std::string& out, bool force) {
    const fs::path dir = resolve_out(out);
    ensure_out_dir(dir, force);
    write_config_echo(dir, cfg);

    // the surrogate trains on the test side of the split; the target's
    // own training ids come from the supervisor run when available
    auto [train_m, test_m] = split_of(cfg, data_root);
    std::vector<std::string> target_train_ids = train_m.ids();
    const fs::path split_file = target_ckpt.parent_path() / "split.json";
    if (fs::exists(split_file)) {
        json sj = json::parse(std::ifstream(split_file));
        target_train_ids = sj.at("train_ids").get<std::vector<std::string>>();
    }

    models::LocalizerNet target = models::load_localizer(target_ckpt);
    auto student = harness::distill_local_model(target, test_m, target_train_ids, cfg.surrogate, cfg.train);

    auto samples = train::load_all(test_m, cfg.input_size);
    const double agreement = harness::teacher_agreement_f1(target, student, samples);
    models::save_localizer(dir / "surrogate.bin", student, {{"distilled_from", target_ckpt.string()}});
    std::ofstream(dir / "distill.json") << json{{"teacher_agreement_f1", agreement},
                                                {"surrogate_params", student.param_count()},
                                                {"target_params", target.param_count()}}
                                               .dump(2)
                                        << "\n";
    std::cout << "surrogate distilled, teacher-agreement F1 " << agreement << "\n";
    return 0;
}

int cmd_defend(const cli::RunConfig& cfg, const fs::path& data_root, const fs::path& target_ckpt,
               const std::string& method, const std::string& generator, const std::string& out, bool force) {
    const fs::path dir = resolve_out(out);
    ensure_out_dir(dir, force);
    write_config_echo(dir, cfg);

    auto [train_m, test_m] = split_of(cfg, data_root);
    models::LocalizerNet target = models::load_localizer(target_ckpt);
    harness::AttackSpec spec = make_spec(cfg, method, generator);
    auto attack = harness::make_attack(spec, &target);

    auto retrained = harness::retrain_defense(target, attack, train_m, cfg.train);
    models::save_localizer(dir / "retrained.bin", retrained,
                           {{"defended_against", method}, {"base", target_ckpt.string()}});

    // re-run the attack white-box against the retrained model
    harness::EvalOptions opts;
    opts.input_size = cfg.input_size;
    opts.attack_label = method;
    opts.model_label = "retrained";
    opts.setting_label = "retrained_defense";
    opts.dataset_label = data_root.filename().string();
    auto rep = harness::whitebox_eval(make_spec(cfg, method, generator), retrained, test_m, opts);
    rep.write_csv(dir / "rows.csv");
    rep.write_json(dir / "report.json");
    std::cout << "retrained defense: post-retraining attack_rate " << rep.attack_rate << "\n";
    return 0;
}

int cmd_evaluate(const cli::RunConfig& cfg, const fs::path& data_root, const std::string& out, bool force) {
    if (cfg.settings.empty()) throw cli::ConfigError("evaluate: config has no eval.settings");
    const fs::path dir = resolve_out(out);
    ensure_out_dir(dir, force);
    write_config_echo(dir, cfg);

    auto [train_m, test_m] = split_of(cfg, data_root);

    for (const auto& setting : cfg.settings) {
        const fs::path cell = dir / setting.kind / setting.attack;
        fs::create_directories(cell);

        harness::AttackSpec spec;
        spec.method = harness::attack_method_from_string(setting.attack);
        spec.config = cfg.attack;
        spec.generator_ckpt = setting.generator;

        harness::EvalOptions opts;
        opts.input_size = cfg.input_size;
        opts.attack_label = setting.attack;
        opts.model_label = setting.target.filename().string();
        opts.setting_label = setting.kind;
        opts.dataset_label = data_root.filename().string();
        opts.contact_sheet = cell / "sheet.png";

        models::LocalizerNet target = models::load_localizer(setting.target);
        metrics::EvalReport rep;
        if (setting.kind == "whitebox") {
            rep = harness::whitebox_eval(spec, target, test_m, opts);
        } else if (setting.kind == "blackbox_distilled") {
            models::LocalizerNet surrogate = models::load_localizer(setting.surrogate);
            rep = harness::blackbox_eval(spec, &surrogate, target, test_m, opts);
        } else if (setting.kind == "blackbox_pure") {
            rep = harness::blackbox_eval(spec, nullptr, target, test_m, opts);
        } else if (setting.kind == "retrained_defense") {
            auto attack = harness::make_attack(spec, &target);
            auto retrained = harness::retrain_defense(target, attack, train_m, cfg.train);
            rep = harness::whitebox_eval(spec, retrained, test_m, opts);
        } else {
            throw cli::ConfigError("unknown setting kind: " + setting.kind);
        }
        rep.write_csv(cell / "rows.csv");
        rep.write_json(cell / "report.json");

        // texture analysis of the generated images for generator methods
        if (spec.method == harness::AttackMethod::sear || spec.method == harness::AttackMethod::advgan) {
            auto attack = harness::make_attack(spec, nullptr);
            auto samples = train::load_all(test_m, cfg.input_size);
            std::vector<std::pair<Tensor, Tensor>> pairs;
            metrics::PerturbationStats agg;
            double mt = 0, mp = 0;
            long n_t = 0, n_p = 0;
            for (const auto& s : samples) {
                Tensor anti = attack(s);
                pairs.emplace_back(s.image, anti);
                Tensor delta = anti;
                for (size_t i = 0; i < delta.numel(); ++i) delta[i] -= s.image[i];
                auto st = metrics::perturbation_stats(delta, s.mask);
                if (st.mean_tampered) {
                    mt += *st.mean_tampered;
                    ++n_t;
                }
                if (st.mean_pristine) {
                    mp += *st.mean_pristine;
                    ++n_p;
                }
            }
            metrics::write_glcm_histogram_csv(cell / "glcm_hist.csv",
                                              metrics::glcm_diff_histogram(pairs, 21, -20.0, 20.0));
            json stats{{"mean_tampered", n_t ? mt / n_t : 0.0}, {"mean_pristine", n_p ? mp / n_p : 0.0}};
            std::ofstream(cell / "perturbation_stats.json") << stats.dump(2) << "\n";
        }
        std::cout << setting.kind << "/" << setting.attack << ": attack_rate " << rep.attack_rate
                  << ", F1R " << rep.mean_f1_reverse << ", PSNR " << rep.mean_psnr << ", SSIM "
                  << rep.mean_ssim << "\n";
    }
    return 0;
}

int cmd_bench(const cli::RunConfig& cfg, const fs::path& data_root, const fs::path& target_ckpt,
              const std::string& generator, const std::vector<std::string>& methods, const std::string& out,
              bool force) {
    const fs::path dir = resolve_out(out);
    ensure_out_dir(dir, force);

    auto manifest = pick_split(cfg, data_root, "test");
    auto samples = train::load_all(manifest, cfg.input_size);
    std::optional<models::LocalizerNet> target;
    if (!target_ckpt.empty()) target.emplace(models::load_localizer(target_ckpt));

    json result = json::array();
    std::ofstream csv(dir / "bench.csv");
    csv << "method,seconds_per_image\n";
    for (const std::string& m : methods) {
        harness::AttackSpec spec = make_spec(cfg, m, generator);
        auto attack = harness::make_attack(spec, target ? &*target : nullptr);
        const double sec = harness::timing_benchmark(attack, samples, 2);
        result.push_back({{"method", m}, {"seconds_per_image", sec}});
        csv << m << ',' << sec << '\n';
        std::cout << m << ": " << sec << " s/image\n";
    }
    std::ofstream(dir / "bench.json") << result.dump(2) << "\n";
    return 0;
}

int cmd_report(const fs::path& in, const std::string& out, bool force) {
    const fs::path dir = resolve_out(out);
    ensure_out_dir(dir, force);

    std::vector<metrics::EvalReport> reports;
    for (const auto& de : fs::recursive_directory_iterator(in))
        if (de.is_regular_file() && de.path().filename() == "report.json")
            reports.push_back(metrics::EvalReport::read_json(de.path()));
    if (reports.empty()) throw cli::ConfigError("report: no report.json files under " + in.string());

    std::sort(reports.begin(), reports.end(), [](const auto& a, const auto& b) {
        return std::tie(a.setting, a.model, a.dataset, a.attack) <
               std::tie(b.setting, b.model, b.dataset, b.attack);
    });

    std::ofstream csv(dir / "summary.csv");
    csv << "setting,attack,model,dataset,attack_rate,f1_reverse,ssim,psnr\n";
    for (const auto& r : reports)
        csv << r.setting << ',' << r.attack << ',' << r.model << ',' << r.dataset << ',' << r.attack_rate
            << ',' << r.mean_f1_reverse << ',' << r.mean_ssim << ',' << r.mean_psnr << '\n';

    std::ofstream txt(dir / "summary.txt");
    auto line = [&](const std::string& a, const std::string& b, const std::string& c, const std::string& d,
                    const std::string& e, const std::string& f, const std::string& g, const std::string& h) {
        txt << std::left;
        txt.width(20);
        txt << a;
        txt.width(10);
        txt << b;
        txt.width(22);
        txt << c;
        txt.width(12);
        txt << d;
        txt.width(12);
        txt << e;
        txt.width(12);
        txt << f;
        txt.width(10);
        txt << g;
        txt.width(10);
        txt << h;
        txt << "\n";
    };
    line("setting", "attack", "model", "dataset", "attack_rate", "F1R", "SSIM", "PSNR");
    txt << std::string(108, '-') << "\n";
    auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.4f", v);
        return std::string(buf);
    };
    for (const auto& r : reports)
        line(r.setting, r.attack, r.model, r.dataset, fmt(r.attack_rate), fmt(r.mean_f1_reverse),
             fmt(r.mean_ssim), fmt(r.mean_psnr));

    std::cout << "collated " << reports.size() << " reports into " << (dir / "summary.csv") << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pixel-level anti-forensics laboratory"};
    app.require_subcommand(1);

    std::string config_path, out, data_root, method = "identity", generator, split = "test";
    std::string target_ckpt, supervisor_ckpt, report_in;
    std::vector<std::string> methods;
    uint64_t seed = 0;
    int count = 200, size = 64;
    bool force = false, no_pretext = false, static_supervisor = false, resume = false;

    auto add_common = [&](CLI::App* cmd, bool with_data = true) {
        cmd->add_option("--config", config_path, "run configuration JSON");
        cmd->add_option("--out", out, "output directory")->required();
        cmd->add_option("--seed", seed, "seed override");
        cmd->add_flag("--force", force, "overwrite non-empty output directories");
        if (with_data) cmd->add_option("--data", data_root, "dataset directory or manifest")->required();
    };

    auto* synth = app.add_subcommand("synth-data", "generate a synthetic splice dataset");
    synth->add_option("--out", out)->required();
    synth->add_option("--count", count);
    synth->add_option("--size", size);
    synth->add_option("--seed", seed);
    synth->add_flag("--force", force);

    auto* tsup = app.add_subcommand("train-supervisor", "pretrain the forgery localizer");
    add_common(tsup);

    auto* tsear = app.add_subcommand("train-sear", "joint concealer/supervisor training");
    add_common(tsear);
    tsear->add_option("--supervisor", supervisor_ckpt, "pretrained supervisor checkpoint")->required();
    tsear->add_flag("--no-pretext", no_pretext, "ablation: drop the pretext term");
    tsear->add_flag("--static-supervisor", static_supervisor, "keep the supervisor frozen throughout");
    tsear->add_flag("--resume", resume, "resume from the latest checkpoint in --out");

    auto* atk = app.add_subcommand("attack", "write anti-forensic images for a dataset split");
    add_common(atk);
    atk->add_option("--method", method, "identity|fgsm|bim|mim|sear|advgan")->required();
    atk->add_option("--target", target_ckpt, "localizer checkpoint (gradient methods)");
    atk->add_option("--generator", generator, "generator checkpoint (sear/advgan)");
    atk->add_option("--split", split, "train|test|all");

    auto* dist = app.add_subcommand("distill", "train a small surrogate on teacher outputs");
    add_common(dist);
    dist->add_option("--target", target_ckpt, "teacher localizer checkpoint")->required();

    auto* def = app.add_subcommand("defend", "retrain the target on attacked images and re-evaluate");
    add_common(def);
    def->add_option("--target", target_ckpt)->required();
    def->add_option("--method", method)->required();
    def->add_option("--generator", generator);

    auto* ev = app.add_subcommand("evaluate", "run the eval.settings matrix from the config");
    add_common(ev);

    auto* bench = app.add_subcommand("bench", "seconds-per-image timing of attack methods");
    add_common(bench);
    bench->add_option("--target", target_ckpt);
    bench->add_option("--generator", generator);
    bench->add_option("--methods", methods, "attack methods to time")->required();

    auto* rep = app.add_subcommand("report", "collate EvalReports into summary tables");
    rep->add_option("--in", report_in, "directory tree containing report.json files")->required();
    rep->add_option("--out", out)->required();
    rep->add_flag("--force", force);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*synth) return cmd_synth_data(out, count, size, seed == 0 ? 7 : seed, force);
        const cli::RunConfig cfg = load_config(config_path, seed);
        if (*tsup) return cmd_train_supervisor(cfg, data_root, out, force);
        if (*tsear)
            return cmd_train_sear(cfg, data_root, supervisor_ckpt, out, force, no_pretext, static_supervisor,
                                  resume);
        if (*atk) return cmd_attack(cfg, data_root, split, method, target_ckpt, generator, out, force);
        if (*dist) return cmd_distill(cfg, data_root, target_ckpt, out, force);
        if (*def) return cmd_defend(cfg, data_root, target_ckpt, method, generator, out, force);
        if (*ev) return cmd_evaluate(cfg, data_root, out, force);
        if (*bench) return cmd_bench(cfg, data_root, target_ckpt, generator, methods, out, force);
        if (*rep) return cmd_report(report_in, out, force);
        return 2;
    } catch (const cli::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const data::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
