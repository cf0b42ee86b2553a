#pragma once

#include <functional>

#include "sear/attacks/attacks.hpp"
#include "sear/metrics/report.hpp"

namespace sear::harness {

struct HarnessError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An attack instance maps one forged sample to its anti-forensic image;
// the model access it holds (gradient, forward-only, or none) is baked in
// when the closure is built, which is what separates the threat settings.
using AttackFn = std::function<Tensor(const data::ForgerySample&)>;

enum class AttackMethod { identity, fgsm, bim, mim, sear, advgan };
AttackMethod attack_method_from_string(const std::string& s);
std::string to_string(AttackMethod m);

struct AttackSpec {
    AttackMethod method = AttackMethod::identity;
    attacks::AttackConfig config;              // gradient methods
    std::filesystem::path generator_ckpt;      // sear / advgan
};

// Builds the closure for one setting. Gradient methods require a gradient
// model; generator methods ignore it entirely.
AttackFn make_attack(const AttackSpec& spec, models::GradLocalizer* white_box_model);

struct EvalOptions {
    int input_size = 0;
    std::string attack_label, model_label, setting_label, dataset_label;
    std::filesystem::path contact_sheet;  // written when non-empty
    int contact_sheet_rows = 8;
};

// Scores an attack against a target on a test manifest: per-image F1 on
// original and attacked images, F1 of the reversed mask, PSNR/SSIM of the
// attacked vs original image.
metrics::EvalReport evaluate_attack(const AttackFn& attack, models::ForwardLocalizer& target,
                                    const data::DatasetManifest& test, const EvalOptions& opts);

// White-box: the attack closure is built on the target itself.
metrics::EvalReport whitebox_eval(const AttackSpec& spec, models::GradLocalizer& target,
                                  const data::DatasetManifest& test, const EvalOptions& opts);

// Black-box: gradient attacks run on the surrogate (nullptr = pure
// transfer, generator methods only); the target is scored through a
// forward-only view, so the closure cannot touch its gradients.
metrics::EvalReport blackbox_eval(const AttackSpec& spec, models::GradLocalizer* surrogate,
                                  models::ForwardLocalizer& target, const data::DatasetManifest& test,
                                  const EvalOptions& opts);

// Teacher-student distillation on a manifest disjoint from the target's
// training ids (hard error otherwise): the student small_distill net fits
// the teacher's soft predictions with BCE.
models::LocalizerNet distill_local_model(models::ForwardLocalizer& target,
                                         const data::DatasetManifest& distill_manifest,
                                         const std::vector<std::string>& target_train_ids,
                                         const models::LocalizerConfig& surrogate_cfg,
                                         const train::TrainConfig& cfg);

// Student's mean F1 against the binarized teacher outputs (agreement).
double teacher_agreement_f1(models::ForwardLocalizer& teacher, models::LocalizerNet& student,
                            const std::vector<data::ForgerySample>& samples);

// Retraining defense: fine-tune a copy of the target on original plus
// attacked training images (ground-truth masks), per-pixel BCE.
models::LocalizerNet retrain_defense(const models::LocalizerNet& target, const AttackFn& attack,
                                     const data::DatasetManifest& train_manifest, const train::TrainConfig& cfg);

// Mean wall-clock seconds per generated image; `warmup` untimed runs
// precede the measurement.
double timing_benchmark(const AttackFn& attack, const std::vector<data::ForgerySample>& samples,
                        int warmup = 2);

// 5-column grids (original, anti, pred-ori, pred-anti, gt) as one PNG.
void write_contact_sheet(const std::filesystem::path& path,
                         const std::vector<std::array<Tensor, 5>>& rows);

}  // namespace sear::harness
