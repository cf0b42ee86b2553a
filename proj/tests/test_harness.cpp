#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "sear/data/synth.hpp"
#include "sear/harness/harness.hpp"

using namespace sear;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

models::LocalizerConfig tiny_localizer(int depth = 2, int base = 4) {
    models::LocalizerConfig c;
    c.depth = depth;
    c.base_channels = base;
    c.dilation_rates = {2, 4};
    return c;
}

struct Fixture {
    TempDir dir{"sear_harness_fixture"};
    data::DatasetManifest manifest;
    models::LocalizerNet target{tiny_localizer()};

    Fixture() {
        for (const auto& s : data::synth_toy_forgery(71, 32, 8)) data::save_sample(dir.path, s);
        manifest = data::load_manifest(dir.path);
        target.init(51);
        // brief supervised training so predictions carry signal
        auto samples = train::load_all(manifest, 0);
        auto params = target.params();
        nn::Adam opt(2e-3f);
        for (int epoch = 0; epoch < 25; ++epoch)
            for (const auto& s : samples) {
                nn::zero_grad(params);
                Tensor prob = target.forward(s.image);
                Tensor dprob(1, 32, 32);
                losses::bce_grad(prob, s.mask, 1.0f, dprob);
                target.backward(dprob);
                opt.step(params);
            }
    }
};

}  // namespace

TEST_CASE("identity attack scores an attack rate of zero with one row per image") {
    Fixture f;
    harness::AttackSpec spec;  // identity
    harness::EvalOptions opts;
    opts.attack_label = "identity";
    auto rep = harness::whitebox_eval(spec, f.target, f.manifest, opts);
    CHECK(rep.rows.size() == f.manifest.size());
    CHECK(rep.attack_rate == doctest::Approx(0.0));
    for (const auto& r : rep.rows) {
        CHECK(r.f1_ori == r.f1_anti);
        CHECK(r.psnr == 99.0);
        CHECK(r.ssim == doctest::Approx(1.0));
    }
}

TEST_CASE("evaluation reports are reproducible") {
    Fixture f;
    harness::AttackSpec spec;
    spec.method = harness::AttackMethod::fgsm;
    spec.config.epsilon = 8.0f / 255.0f;
    harness::EvalOptions opts;
    auto a = harness::whitebox_eval(spec, f.target, f.manifest, opts);
    auto b = harness::whitebox_eval(spec, f.target, f.manifest, opts);
    REQUIRE(a.rows.size() == b.rows.size());
    for (size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].f1_anti == b.rows[i].f1_anti);
        CHECK(a.rows[i].psnr == b.rows[i].psnr);
    }
    CHECK(a.attack_rate == b.attack_rate);
}

TEST_CASE("black-box isolation: the sealed target cannot produce gradients") {
    Fixture f;
    models::ForwardOnlyView sealed(f.target);
    CHECK(dynamic_cast<models::GradLocalizer*>(static_cast<models::ForwardLocalizer*>(&sealed)) == nullptr);

    harness::AttackSpec spec;
    spec.method = harness::AttackMethod::fgsm;
    CHECK_THROWS_AS(harness::make_attack(spec, nullptr), harness::HarnessError);

    // identity attack through the black-box path still produces a report
    harness::AttackSpec id;
    auto rep = harness::blackbox_eval(id, nullptr, f.target, f.manifest, {});
    CHECK(rep.attack_rate == doctest::Approx(0.0));
}

TEST_CASE("distillation asserts id-disjointness and trains a smaller surrogate") {
    Fixture f;
    auto [train_m, test_m] = data::split_dataset(f.manifest, {0.5, 3});

    train::TrainConfig cfg;
    cfg.batch_size = 2;
    cfg.max_epochs = 6;
    cfg.seed = 13;

    SUBCASE("overlap is a hard error") {
        CHECK_THROWS_AS(harness::distill_local_model(f.target, test_m, test_m.ids(),
                                                     models::LocalizerConfig::small_distill_defaults(), cfg),
                        harness::HarnessError);
    }
    SUBCASE("disjoint manifests pass and the surrogate is smaller") {
        auto surrogate_cfg = tiny_localizer(1, 2);
        surrogate_cfg.kind = models::LocalizerKind::small_distill;
        surrogate_cfg.dilation_rates = {2};
        auto student = harness::distill_local_model(f.target, test_m, train_m.ids(), surrogate_cfg, cfg);
        CHECK(student.param_count() < f.target.param_count());
        auto samples = train::load_all(test_m, 0);
        CHECK(harness::teacher_agreement_f1(f.target, student, samples) >= 0.0);
    }
}

TEST_CASE("retraining defense improves F1 on previously attacked images") {
    Fixture f;
    harness::AttackSpec spec;
    spec.method = harness::AttackMethod::fgsm;
    spec.config.epsilon = 8.0f / 255.0f;
    auto attack = harness::make_attack(spec, &f.target);

    auto samples = train::load_all(f.manifest, 0);
    auto f1_on_attacked = [&](models::LocalizerNet& net) {
        double sum = 0;
        for (const auto& s : samples)
            sum += metrics::pixel_f1(metrics::binarize(net.forward(attack(s))), s.mask);
        return sum / samples.size();
    };
    const double before = f1_on_attacked(f.target);

    train::TrainConfig cfg;
    cfg.batch_size = 2;
    cfg.max_epochs = 4;
    cfg.seed = 17;
    auto retrained = harness::retrain_defense(f.target, attack, f.manifest, cfg);
    const double after = f1_on_attacked(retrained);
    CHECK(after >= before);
}

TEST_CASE("timing benchmark is positive, finite and stable") {
    Fixture f;
    auto samples = train::load_all(f.manifest, 0);
    // fixed-cost deterministic "attack" keeps the stability check honest
    harness::AttackFn fixed_work = [](const data::ForgerySample& s) {
        Tensor out = s.image;
        volatile float sink = 0;
        for (int rep = 0; rep < 40; ++rep)
            for (size_t i = 0; i < out.numel(); ++i) sink += out[i] * 1.0001f;
        (void)sink;
        return out;
    };
    const double t1 = harness::timing_benchmark(fixed_work, samples, 2);
    const double t2 = harness::timing_benchmark(fixed_work, samples, 2);
    CHECK(t1 > 0.0);
    CHECK(std::isfinite(t1));
    CHECK(std::fabs(t1 - t2) / std::max(t1, t2) < 0.2);
}

TEST_CASE("contact sheets are written") {
    Fixture f;
    TempDir out("sear_harness_sheet");
    harness::AttackSpec spec;
    harness::EvalOptions opts;
    opts.contact_sheet = out.path / "grid.png";
    opts.contact_sheet_rows = 4;
    harness::whitebox_eval(spec, f.target, f.manifest, opts);
    CHECK(fs::exists(out.path / "grid.png"));
    auto png = data::read_png(out.path / "grid.png", 3);
    CHECK(png.width > 5 * 32);
    CHECK(png.height > 32);
}
