#include <cmath>

#include "sear/data/resize.hpp"
#include "sear/metrics/metrics.hpp"
#include "sear/rng.hpp"
#include "sear/train/train.hpp"

namespace sear::train {

std::vector<data::ForgerySample> load_all(const data::DatasetManifest& manifest, int input_size) {
    std::vector<data::ForgerySample> out;
    out.reserve(manifest.size());
    for (const auto& e : manifest.entries) {
        data::ForgerySample s = data::load_sample(e);
        if (input_size > 0 && (s.image.height() != input_size || s.image.width() != input_size))
            s = data::resize_sample(s, input_size);
        out.push_back(std::move(s));
    }
    return out;
}

double mean_pixel_f1(models::LocalizerNet& net, const std::vector<data::ForgerySample>& samples) {
    if (samples.empty()) throw TrainError("mean_pixel_f1: empty sample set");
    double sum = 0.0;
    for (const auto& s : samples) sum += metrics::pixel_f1(metrics::binarize(net.forward(s.image)), s.mask);
    return sum / static_cast<double>(samples.size());
}

std::vector<EpochReport> pretrain_supervisor(models::LocalizerNet& net, const data::DatasetManifest& train,
                                             const data::DatasetManifest& heldout, const TrainConfig& cfg) {
    cfg.validate();
    if (train.size() == 0) throw TrainError("pretrain_supervisor: empty training set");

    const auto samples = load_all(train, cfg.input_size);
    const auto val = load_all(heldout, cfg.input_size);

    auto params = net.params();
    nn::Adam opt(cfg.learning_rate);
    Rng order_rng(Rng::derive(cfg.seed, 0xB47C4));

    std::vector<EpochReport> history;
    double best_f1 = -1.0;
    int best_epoch = -1;
    std::vector<std::vector<float>> best_params;

    std::vector<size_t> order(samples.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        order_rng.shuffle(order);
        double epoch_bce = 0.0;
        long batches = 0;
        for (size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const size_t end = std::min(order.size(), start + cfg.batch_size);
            const float inv_b = 1.0f / static_cast<float>(end - start);
            nn::zero_grad(params);
            double batch_bce = 0.0;
            for (size_t k = start; k < end; ++k) {
                const auto& s = samples[order[k]];
                Tensor prob = net.forward(s.image);
                batch_bce += losses::bce(prob, s.mask) * inv_b;
                Tensor dprob(prob.channels(), prob.height(), prob.width());
                losses::bce_grad(prob, s.mask, inv_b, dprob);
                net.backward(dprob);
            }
            if (!std::isfinite(batch_bce))
                throw TrainError("pretrain_supervisor: loss diverged (non-finite BCE) at epoch " +
                                 std::to_string(epoch));
            opt.step(params);
            epoch_bce += batch_bce;
            ++batches;
        }

        EpochReport rep;
        rep.epoch = epoch;
        rep.train_bce = epoch_bce / std::max(1L, batches);
        rep.val_f1 = val.empty() ? 0.0 : mean_pixel_f1(net, val);
        history.push_back(rep);

        if (rep.val_f1 > best_f1) {
            best_f1 = rep.val_f1;
            best_epoch = epoch;
            best_params.clear();
            for (const auto* p : params) best_params.push_back(p->w);
        } else if (epoch - best_epoch >= cfg.patience) {
            break;  // held-out F1 plateau
        }
    }

    if (!best_params.empty())
        for (size_t i = 0; i < params.size(); ++i) params[i]->w = best_params[i];
    return history;
}

}  // namespace sear::train
