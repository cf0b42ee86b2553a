#include <chrono>
#include <cmath>
#include <fstream>

#include "sear/train/train.hpp"

namespace sear::train {

using nlohmann::json;
namespace fs = std::filesystem;

json StepReport::to_json() const {
    return {{"iter", iteration},           {"loss_self", loss_self},
            {"loss_adv", loss_adv},        {"loss_concealer", loss_concealer},
            {"loss_supervisor", loss_supervisor}, {"loss_adv_post", loss_adv_post},
            {"ms", ms}};
}

StepReport StepReport::from_json(const json& j) {
    StepReport r;
    r.iteration = j.value("iter", 0L);
    r.loss_self = j.value("loss_self", 0.0);
    r.loss_adv = j.value("loss_adv", 0.0);
    r.loss_concealer = j.value("loss_concealer", 0.0);
    r.loss_supervisor = j.value("loss_supervisor", 0.0);
    r.loss_adv_post = j.value("loss_adv_post", 0.0);
    r.ms = j.value("ms", 0.0);
    return r;
}

namespace {

StepReport joint_step(models::ConcealerNet& concealer, models::LocalizerNet& supervisor,
                      std::span<const data::ForgerySample* const> batch, const losses::LossWeights& w,
                      nn::Adam& opt_c, nn::Adam& opt_s, bool use_pretext, bool update_supervisor) {
    if (batch.empty()) throw TrainError("sear_train_step: empty batch");
    const auto t0 = std::chrono::steady_clock::now();
    const float inv_b = 1.0f / static_cast<float>(batch.size());

    StepReport rep;
    std::vector<Tensor> anti_batch;
    anti_batch.reserve(batch.size());

    // phase 1 -- supervisor frozen. Its gradient buffers are used as
    // scratch for the input gradient and discarded before phase 2.
    auto cparams = concealer.params();
    nn::zero_grad(cparams);
    for (const data::ForgerySample* s : batch) {
        Tensor delta = concealer.forward(s->image);

        const double pre = use_pretext ? losses::pretext_loss(delta, s->mask) : 0.0;
        rep.loss_self += (pre + losses::hinge_loss(delta)) * inv_b;

        Tensor anti = models::compose_anti_image(s->image, delta);
        Tensor prob = supervisor.forward(anti);
        rep.loss_adv += losses::adversarial_loss(prob, s->mask) * inv_b;

        // d(beta * Loss_adv)/d prob = -beta * dBCE/d prob
        Tensor dprob(prob.channels(), prob.height(), prob.width());
        losses::bce_grad(prob, s->mask, -static_cast<float>(w.beta) * inv_b, dprob);
        Tensor danti = supervisor.backward(dprob);

        Tensor pass = models::compose_backward_mask(s->image, delta);
        Tensor ddelta(delta.channels(), delta.height(), delta.width());
        for (size_t i = 0; i < ddelta.numel(); ++i) ddelta[i] = danti[i] * pass[i];

        const float a = static_cast<float>(w.alpha) * inv_b;
        if (use_pretext) losses::pretext_loss_grad(delta, s->mask, a, ddelta);
        losses::hinge_loss_grad(delta, a, ddelta);

        concealer.backward(ddelta);
        anti_batch.push_back(std::move(anti));
    }
    if (!std::isfinite(rep.loss_self) || !std::isfinite(rep.loss_adv))
        throw TrainError("sear_train_step: non-finite concealer loss");
    rep.loss_concealer = losses::concealer_total(rep.loss_self, rep.loss_adv, w);
    opt_c.step(cparams);

    if (update_supervisor) {
        // phase 2 -- unfreeze; fresh predictions on this step's anti batch
        auto sparams = supervisor.params();
        nn::zero_grad(sparams);
        double bce_post = 0.0;
        for (size_t i = 0; i < anti_batch.size(); ++i) {
            Tensor prob = supervisor.forward(anti_batch[i]);
            bce_post += losses::bce(prob, batch[i]->mask) * inv_b;
            Tensor dprob(prob.channels(), prob.height(), prob.width());
            losses::bce_grad(prob, batch[i]->mask, static_cast<float>(w.lambda) * inv_b, dprob);
            supervisor.backward(dprob);
        }
        if (!std::isfinite(bce_post)) throw TrainError("sear_train_step: non-finite supervisor loss");
        rep.loss_adv_post = -bce_post;
        rep.loss_supervisor = losses::supervisor_total(rep.loss_adv_post, w);
        opt_s.step(sparams);
    } else {
        // static target: a recomputation on the unchanged supervisor would
        // reproduce the phase-1 predictions exactly, so reuse them
        rep.loss_adv_post = rep.loss_adv;
        rep.loss_supervisor = losses::supervisor_total(rep.loss_adv, w);
    }

    rep.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

}  // namespace

StepReport sear_train_step(models::ConcealerNet& concealer, models::LocalizerNet& supervisor,
                           std::span<const data::ForgerySample* const> batch, const losses::LossWeights& w,
                           nn::Adam& opt_concealer, nn::Adam& opt_supervisor, bool update_supervisor) {
    return joint_step(concealer, supervisor, batch, w, opt_concealer, opt_supervisor, true, update_supervisor);
}

namespace {

struct LoopState {
    long iter = 0;
    Rng order_rng{0};
    std::vector<size_t> order;
    size_t cursor = 0;
};

fs::path ckpt_path(const fs::path& run_dir, long iter) {
    return run_dir / ("ckpt_" + std::to_string(iter) + ".bin");
}

void save_joint(const fs::path& path, models::ConcealerNet& c, models::LocalizerNet& s, const LoopState& st,
                const nn::Adam& oc, const nn::Adam& os, bool final_flag) {
    json h;
    h["model"] = "sear-joint";
    h["concealer_config"] = models::concealer_config_to_json(c.config());
    h["localizer_config"] = models::localizer_config_to_json(s.config());
    h["iter"] = st.iter;
    h["rng"] = st.order_rng.state();
    h["order"] = st.order;
    h["cursor"] = st.cursor;
    h["adam_t_concealer"] = oc.step_count();
    h["adam_t_supervisor"] = os.step_count();
    h["final"] = final_flag;
    std::vector<nn::Param*> all = c.params();
    for (auto* p : s.params()) all.push_back(p);
    models::save_checkpoint(path, h, all, /*with_optimizer=*/true);
}

void load_joint(const fs::path& path, models::ConcealerNet& c, models::LocalizerNet& s, LoopState& st,
                nn::Adam& oc, nn::Adam& os) {
    std::vector<nn::Param*> all = c.params();
    for (auto* p : s.params()) all.push_back(p);
    json h = models::load_checkpoint(path, all, /*want_optimizer=*/true);
    st.iter = h.at("iter").get<long>();
    st.order_rng.restore(h.at("rng").get<std::string>());
    st.order = h.at("order").get<std::vector<size_t>>();
    st.cursor = h.at("cursor").get<size_t>();
    oc.set_step_count(h.at("adam_t_concealer").get<long>());
    os.set_step_count(h.at("adam_t_supervisor").get<long>());
}

long latest_checkpoint_iter(const fs::path& run_dir) {
    long best = -1;
    if (!fs::is_directory(run_dir)) return best;
    for (const auto& de : fs::directory_iterator(run_dir)) {
        const std::string name = de.path().filename().string();
        if (name.rfind("ckpt_", 0) == 0 && de.path().extension() == ".bin") {
            const std::string mid = name.substr(5, name.size() - 9);
            if (!mid.empty() && mid.find_first_not_of("0123456789") == std::string::npos)
                best = std::max(best, std::stol(mid));
        }
    }
    return best;
}

}  // namespace

std::vector<StepReport> train_loop(models::ConcealerNet& concealer, models::LocalizerNet& supervisor,
                                   const data::DatasetManifest& manifest, const TrainConfig& cfg,
                                   const LoopOptions& opts) {
    cfg.validate();
    const auto samples = load_all(manifest, cfg.input_size);
    if (samples.empty()) throw TrainError("train_loop: empty manifest");

    fs::create_directories(opts.run_dir);
    {
        json echo;
        echo["train"] = {{"learning_rate", cfg.learning_rate},
                         {"batch_size", cfg.batch_size},
                         {"max_iterations", cfg.max_iterations},
                         {"seed", cfg.seed},
                         {"checkpoint_interval", cfg.checkpoint_interval},
                         {"input_size", cfg.input_size},
                         {"weights",
                          {{"alpha", cfg.weights.alpha}, {"beta", cfg.weights.beta}, {"lambda", cfg.weights.lambda}}},
                         {"update_supervisor", opts.update_supervisor},
                         {"use_pretext", opts.use_pretext}};
        echo["concealer"] = models::concealer_config_to_json(concealer.config());
        echo["localizer"] = models::localizer_config_to_json(supervisor.config());
        std::ofstream(opts.run_dir / "config.json") << echo.dump(2) << "\n";
    }

    nn::Adam opt_c(cfg.learning_rate), opt_s(cfg.learning_rate);
    LoopState st;
    st.order_rng = Rng(Rng::derive(cfg.seed, 0x0DDE7));
    st.order.resize(samples.size());
    for (size_t i = 0; i < st.order.size(); ++i) st.order[i] = i;
    st.order_rng.shuffle(st.order);

    if (opts.resume) {
        const long last = latest_checkpoint_iter(opts.run_dir);
        if (last >= 0) load_joint(ckpt_path(opts.run_dir, last), concealer, supervisor, st, opt_c, opt_s);
    }

    std::ofstream log(opts.run_dir / "log.jsonl", std::ios::app);
    std::vector<StepReport> reports;

    while (st.iter < cfg.max_iterations) {
        std::vector<const data::ForgerySample*> batch;
        for (int b = 0; b < cfg.batch_size; ++b) {
            if (st.cursor >= st.order.size()) {
                st.order_rng.shuffle(st.order);
                st.cursor = 0;
            }
            batch.push_back(&samples[st.order[st.cursor++]]);
        }

        StepReport rep = joint_step(concealer, supervisor, batch, cfg.weights, opt_c, opt_s,
                                    opts.use_pretext, opts.update_supervisor);
        rep.iteration = ++st.iter;
        log << rep.to_json().dump() << "\n";
        log.flush();
        reports.push_back(rep);

        if (cfg.checkpoint_interval > 0 && st.iter % cfg.checkpoint_interval == 0)
            save_joint(ckpt_path(opts.run_dir, st.iter), concealer, supervisor, st, opt_c, opt_s, false);

        if (opts.eval_interval > 0 && opts.eval_hook && st.iter % opts.eval_interval == 0)
            if (opts.eval_hook(st.iter, concealer)) break;
    }

    save_joint(opts.run_dir / "ckpt_final.bin", concealer, supervisor, st, opt_c, opt_s, true);
    return reports;
}

std::vector<Tensor> infer_anti(models::ConcealerNet& net, const std::vector<Tensor>& images) {
    std::vector<Tensor> out;
    out.reserve(images.size());
    for (const Tensor& img : images) out.push_back(models::compose_anti_image(img, net.forward(img)));
    return out;
}

models::ConcealerNet load_concealer_for_inference(const fs::path& ckpt) {
    const json h = models::read_checkpoint_header(ckpt);
    const std::string model = h.value("model", "");
    if (model == "concealer") return models::load_concealer(ckpt);
    if (model == "sear-joint") {
        // read only the leading concealer parameters; no localizer object
        // is ever constructed on this path
        models::ConcealerNet net(models::concealer_config_from_json(h.at("concealer_config")));
        models::load_checkpoint_prefix(ckpt, net.params());
        return net;
    }
    throw TrainError("not a concealer-bearing checkpoint: " + ckpt.string());
}

std::vector<Tensor> infer_anti(const fs::path& concealer_ckpt, const std::vector<Tensor>& images) {
    models::ConcealerNet net = load_concealer_for_inference(concealer_ckpt);
    return infer_anti(net, images);
}

}  // namespace sear::train
