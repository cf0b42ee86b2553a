#include <algorithm>
#include <cmath>
#include <set>

#include "sear/harness/harness.hpp"

namespace sear::harness {

models::LocalizerNet distill_local_model(models::ForwardLocalizer& target,
                                         const data::DatasetManifest& distill_manifest,
                                         const std::vector<std::string>& target_train_ids,
                                         const models::LocalizerConfig& surrogate_cfg,
                                         const train::TrainConfig& cfg) {
    std::set<std::string> train_ids(target_train_ids.begin(), target_train_ids.end());
    for (const auto& e : distill_manifest.entries)
        if (train_ids.count(e.id))
            throw HarnessError("distillation manifest overlaps the target's training data at id '" + e.id + "'");

    const auto samples = train::load_all(distill_manifest, cfg.input_size);
    if (samples.empty()) throw HarnessError("distill_local_model: empty manifest");

    // teacher soft labels, computed once
    std::vector<Tensor> soft;
    soft.reserve(samples.size());
    for (const auto& s : samples) soft.push_back(target.forward(s.image));

    models::LocalizerNet student(surrogate_cfg);
    student.init(cfg.seed);
    auto params = student.params();
    nn::Adam opt(cfg.learning_rate);
    Rng order_rng(Rng::derive(cfg.seed, 0xD157111));

    std::vector<size_t> order(samples.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        order_rng.shuffle(order);
        for (size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const size_t end = std::min(order.size(), start + cfg.batch_size);
            const float inv_b = 1.0f / static_cast<float>(end - start);
            nn::zero_grad(params);
            double batch_bce = 0.0;
            for (size_t k = start; k < end; ++k) {
                const auto& s = samples[order[k]];
                Tensor prob = student.forward(s.image);
                batch_bce += losses::bce(prob, soft[order[k]]) * inv_b;
                Tensor dprob(prob.channels(), prob.height(), prob.width());
                losses::bce_grad(prob, soft[order[k]], inv_b, dprob);
                student.backward(dprob);
            }
            if (!std::isfinite(batch_bce)) throw HarnessError("distillation diverged (non-finite loss)");
            opt.step(params);
        }
    }
    return student;
}

double teacher_agreement_f1(models::ForwardLocalizer& teacher, models::LocalizerNet& student,
                            const std::vector<data::ForgerySample>& samples) {
    if (samples.empty()) throw HarnessError("teacher_agreement_f1: empty sample set");
    double sum = 0.0;
    for (const auto& s : samples) {
        Tensor t = metrics::binarize(teacher.forward(s.image));
        Tensor p = metrics::binarize(student.forward(s.image));
        sum += metrics::pixel_f1(p, t);
    }
    return sum / static_cast<double>(samples.size());
}

}  // namespace sear::harness
