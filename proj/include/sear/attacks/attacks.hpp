#pragma once

#include <filesystem>

#include "sear/models/localizer.hpp"
#include "sear/train/train.hpp"

namespace sear::attacks {

struct AttackError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AttackConfig {
    float epsilon = 8.0f / 255.0f;  // max per-pixel deviation, [0,1] scale
    int steps = 10;                 // BIM/MIM iterations
    float step_size = 0.0f;         // 0 -> epsilon / steps * 1.25
    float momentum = 1.0f;          // MIM decay mu

    float effective_step() const { return step_size > 0.0f ? step_size : epsilon / static_cast<float>(steps) * 1.25f; }
    void validate() const {
        // epsilon 0 is allowed as the degenerate no-op budget
        if (epsilon < 0.0f) throw AttackError("epsilon must be >= 0");
        if (steps < 1) throw AttackError("steps must be >= 1");
    }
};

// All three gradient attacks maximize BCE(F(x'), gt) inside the epsilon
// infinity-ball around x, clamped to [0,1]. They need white-box access:
// passing a forward-only localizer raises an error pointing the caller at
// the black-box harness.

// x' = clamp01(x + eps * sign(grad))
Tensor fgsm_attack(models::ForwardLocalizer& localizer, const Tensor& image, const Tensor& gt_mask,
                   const AttackConfig& cfg);

// `steps` signed-gradient steps, re-projected into the ball and [0,1]
// after every step; steps=1 with step_size=eps reproduces FGSM exactly.
Tensor bim_attack(models::ForwardLocalizer& localizer, const Tensor& image, const Tensor& gt_mask,
                  const AttackConfig& cfg);

// momentum accumulator g <- mu*g + grad/||grad||_1, update by sign(g).
Tensor mim_attack(models::ForwardLocalizer& localizer, const Tensor& image, const Tensor& gt_mask,
                  const AttackConfig& cfg);

// AdvGAN adapted to the pixel level: a generator with the concealer
// backbone trained against a *static* localizer (its parameters never
// move) with alpha*hinge + beta*Loss_adv -- adversarial training without
// the pretext term and without supervisor updates. Writes the run
// artifacts under run_dir and returns the final generator checkpoint.
std::filesystem::path advgan_pixel_train(const data::DatasetManifest& train_manifest,
                                         models::LocalizerNet& target, const models::ConcealerConfig& gen_cfg,
                                         const train::TrainConfig& cfg, const std::filesystem::path& run_dir);

// Single forward pass per image; no target model involved.
std::vector<Tensor> advgan_pixel_attack(const std::filesystem::path& generator_ckpt,
                                        const std::vector<Tensor>& images);

}  // namespace sear::attacks
