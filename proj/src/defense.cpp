#include <cmath>

#include "sear/harness/harness.hpp"

namespace sear::harness {

models::LocalizerNet retrain_defense(const models::LocalizerNet& target, const AttackFn& attack,
                                     const data::DatasetManifest& train_manifest, const train::TrainConfig& cfg) {
    auto originals = train::load_all(train_manifest, cfg.input_size);
    if (originals.empty()) throw HarnessError("retrain_defense: empty manifest");

    // original plus attacked images, both with ground-truth masks
    std::vector<data::ForgerySample> pool = originals;
    for (const auto& s : originals) {
        data::ForgerySample adv;
        adv.id = s.id + "_attacked";
        adv.image = attack(s);
        adv.mask = s.mask;
        pool.push_back(std::move(adv));
    }

    models::LocalizerNet retrained = target;  // fine-tune a copy
    auto params = retrained.params();
    nn::Adam opt(cfg.learning_rate);
    Rng order_rng(Rng::derive(cfg.seed, 0xDEFE15E));

    std::vector<size_t> order(pool.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        order_rng.shuffle(order);
        for (size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const size_t end = std::min(order.size(), start + cfg.batch_size);
            const float inv_b = 1.0f / static_cast<float>(end - start);
            nn::zero_grad(params);
            double batch_bce = 0.0;
            for (size_t k = start; k < end; ++k) {
                const auto& s = pool[order[k]];
                Tensor prob = retrained.forward(s.image);
                batch_bce += losses::bce(prob, s.mask) * inv_b;
                Tensor dprob(prob.channels(), prob.height(), prob.width());
                losses::bce_grad(prob, s.mask, inv_b, dprob);
                retrained.backward(dprob);
            }
            if (!std::isfinite(batch_bce)) throw HarnessError("retrain_defense diverged (non-finite loss)");
            opt.step(params);
        }
    }
    return retrained;
}

}  // namespace sear::harness
