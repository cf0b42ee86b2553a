#include "sear/attacks/attacks.hpp"

#include <cmath>

namespace sear::attacks {

namespace {

models::GradLocalizer& need_gradients(models::ForwardLocalizer& localizer) {
    auto* g = dynamic_cast<models::GradLocalizer*>(&localizer);
    if (!g)
        throw AttackError(
            "this localizer exposes no gradients (black-box target); "
            "use the black-box harness with a distilled surrogate instead");
    return *g;
}

inline float sign_of(float v) { return v > 0.0f ? 1.0f : (v < 0.0f ? -1.0f : 0.0f); }

// one signed step from `x`, then projection into the eps-ball around x0
// and into [0,1]; shared by all three attacks so degenerate configs match
// bit-for-bit
Tensor signed_step(const Tensor& x, const Tensor& dir, float step, const Tensor& x0, float eps) {
    Tensor out = x;
    for (size_t i = 0; i < out.numel(); ++i) {
        float v = out[i] + step * sign_of(dir[i]);
        v = std::min(x0[i] + eps, std::max(x0[i] - eps, v));
        out[i] = std::min(1.0f, std::max(0.0f, v));
    }
    return out;
}

}  // namespace

Tensor fgsm_attack(models::ForwardLocalizer& localizer, const Tensor& image, const Tensor& gt_mask,
                   const AttackConfig& cfg) {
    cfg.validate();
    auto& g = need_gradients(localizer);
    Tensor grad = g.input_gradient_bce(image, gt_mask, nullptr);
    return signed_step(image, grad, cfg.epsilon, image, cfg.epsilon);
}

Tensor bim_attack(models::ForwardLocalizer& localizer, const Tensor& image, const Tensor& gt_mask,
                  const AttackConfig& cfg) {
    cfg.validate();
    auto& g = need_gradients(localizer);
    const float step = cfg.effective_step();
    Tensor x = image;
    for (int t = 0; t < cfg.steps; ++t) {
        Tensor grad = g.input_gradient_bce(x, gt_mask, nullptr);
        x = signed_step(x, grad, step, image, cfg.epsilon);
    }
    return x;
}

Tensor mim_attack(models::ForwardLocalizer& localizer, const Tensor& image, const Tensor& gt_mask,
                  const AttackConfig& cfg) {
    cfg.validate();
    auto& g = need_gradients(localizer);
    const float step = cfg.effective_step();
    Tensor x = image;
    Tensor acc(image.channels(), image.height(), image.width());
    for (int t = 0; t < cfg.steps; ++t) {
        Tensor grad = g.input_gradient_bce(x, gt_mask, nullptr);
        double l1 = 0.0;
        for (size_t i = 0; i < grad.numel(); ++i) l1 += std::fabs(grad[i]);
        const float inv = l1 > 0.0 ? static_cast<float>(1.0 / l1) : 0.0f;
        for (size_t i = 0; i < acc.numel(); ++i) acc[i] = cfg.momentum * acc[i] + grad[i] * inv;
        x = signed_step(x, acc, step, image, cfg.epsilon);
    }
    return x;
}

std::filesystem::path advgan_pixel_train(const data::DatasetManifest& train_manifest,
                                         models::LocalizerNet& target, const models::ConcealerConfig& gen_cfg,
                                         const train::TrainConfig& cfg, const std::filesystem::path& run_dir) {
    models::ConcealerNet generator(gen_cfg);
    generator.init(cfg.seed);

    train::LoopOptions opts;
    opts.run_dir = run_dir;
    opts.update_supervisor = false;  // static target: the defining contrast
    opts.use_pretext = false;        // beta*Loss_adv + hinge only
    train::train_loop(generator, target, train_manifest, cfg, opts);

    const auto path = run_dir / "generator.bin";
    nlohmann::json extra;
    extra["trained_as"] = "advgan_pixel";
    models::save_concealer(path, generator, extra);
    return path;
}

std::vector<Tensor> advgan_pixel_attack(const std::filesystem::path& generator_ckpt,
                                        const std::vector<Tensor>& images) {
    return train::infer_anti(generator_ckpt, images);
}

}  // namespace sear::attacks
