#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "sear/data/manifest.hpp"
#include "sear/losses.hpp"
#include "sear/models/checkpoint.hpp"
#include "sear/nn/adam.hpp"

namespace sear::train {

struct TrainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TrainConfig {
    float learning_rate = 2e-4f;  // ADAM
    int batch_size = 4;
    int max_iterations = 2000;
    uint64_t seed = 0;
    int checkpoint_interval = 500;
    losses::LossWeights weights;
    int input_size = 0;  // resize samples when > 0

    // supervisor pretraining
    int max_epochs = 20;
    int patience = 5;  // epochs without held-out F1 improvement

    void validate() const {
        if (learning_rate < 0) throw TrainError("learning_rate must be >= 0");
        if (batch_size < 1) throw TrainError("batch_size must be >= 1");
        weights.validate();
    }
};

struct StepReport {
    long iteration = 0;
    double loss_self = 0;        // Eq. 5, batch mean
    double loss_adv = 0;         // Eq. 6 during the concealer phase
    double loss_concealer = 0;   // Eq. 10
    double loss_supervisor = 0;  // Eq. 11, from the recomputed predictions
    double loss_adv_post = 0;    // adversarial loss of those predictions
    double ms = 0;

    nlohmann::json to_json() const;
    static StepReport from_json(const nlohmann::json& j);
};

struct EpochReport {
    int epoch = 0;
    double train_bce = 0;
    double val_f1 = 0;
};

// In-memory dataset used by the loops; samples are loaded once and
// optionally resized.
std::vector<data::ForgerySample> load_all(const data::DatasetManifest& manifest, int input_size);

// Supervised pretraining with per-pixel BCE. Stops when the held-out
// pixel-F1 has not improved for cfg.patience epochs or after
// cfg.max_epochs; the best epoch's parameters are restored before
// returning. Throws TrainError on divergence.
std::vector<EpochReport> pretrain_supervisor(models::LocalizerNet& net, const data::DatasetManifest& train,
                                             const data::DatasetManifest& heldout, const TrainConfig& cfg);

// Mean pixel-F1 of binarized predictions over a sample set.
double mean_pixel_f1(models::LocalizerNet& net, const std::vector<data::ForgerySample>& samples);

// One iteration of the joint loop. Phase 1 freezes the supervisor,
// synthesizes the anti-forensic batch, and updates the concealer with
// alpha*Loss_self + beta*Loss_adv; phase 2 recomputes predictions on the
// same batch and updates the supervisor with lambda*BCE.
StepReport sear_train_step(models::ConcealerNet& concealer, models::LocalizerNet& supervisor,
                           std::span<const data::ForgerySample* const> batch, const losses::LossWeights& w,
                           nn::Adam& opt_concealer, nn::Adam& opt_supervisor,
                           bool update_supervisor = true);

struct LoopOptions {
    std::filesystem::path run_dir;
    bool resume = false;
    bool update_supervisor = true;  // false = static target (AdvGAN-style)
    bool use_pretext = true;        // false = ablation without the pretext term
    // optional in-loop early stop: called every eval_interval iterations,
    // return true to stop
    int eval_interval = 0;
    std::function<bool(long, models::ConcealerNet&)> eval_hook;
};

// Runs sear_train_step over deterministic shuffled batches, writing
// ckpt_<iter>.bin (resumable), log.jsonl and config.json under run_dir.
// Returns the step reports of this invocation.
std::vector<StepReport> train_loop(models::ConcealerNet& concealer, models::LocalizerNet& supervisor,
                                   const data::DatasetManifest& manifest, const TrainConfig& cfg,
                                   const LoopOptions& opts);

// Loads only the concealer (never a localizer) from a concealer or joint
// checkpoint and maps each image through compose_anti_image.
std::vector<Tensor> infer_anti(const std::filesystem::path& concealer_ckpt, const std::vector<Tensor>& images);
std::vector<Tensor> infer_anti(models::ConcealerNet& net, const std::vector<Tensor>& images);

// Reads the concealer half of a joint checkpoint (or a plain concealer
// checkpoint).
models::ConcealerNet load_concealer_for_inference(const std::filesystem::path& ckpt);

}  // namespace sear::train
