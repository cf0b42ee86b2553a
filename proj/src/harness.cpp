#include "sear/harness/harness.hpp"

#include <array>

namespace sear::harness {

AttackMethod attack_method_from_string(const std::string& s) {
    if (s == "identity") return AttackMethod::identity;
    if (s == "fgsm") return AttackMethod::fgsm;
    if (s == "bim") return AttackMethod::bim;
    if (s == "mim") return AttackMethod::mim;
    if (s == "sear") return AttackMethod::sear;
    if (s == "advgan") return AttackMethod::advgan;
    throw HarnessError("unknown attack method: " + s);
}

std::string to_string(AttackMethod m) {
    switch (m) {
        case AttackMethod::identity: return "identity";
        case AttackMethod::fgsm: return "fgsm";
        case AttackMethod::bim: return "bim";
        case AttackMethod::mim: return "mim";
        case AttackMethod::sear: return "sear";
        case AttackMethod::advgan: return "advgan";
    }
    return "?";
}

AttackFn make_attack(const AttackSpec& spec, models::GradLocalizer* white_box_model) {
    switch (spec.method) {
        case AttackMethod::identity:
            return [](const data::ForgerySample& s) { return s.image; };
        case AttackMethod::fgsm:
        case AttackMethod::bim:
        case AttackMethod::mim: {
            if (!white_box_model)
                throw HarnessError(to_string(spec.method) +
                                   " needs gradient access to a model; in black-box settings supply a "
                                   "distilled surrogate");
            models::GradLocalizer* m = white_box_model;
            const auto cfg = spec.config;
            if (spec.method == AttackMethod::fgsm)
                return [m, cfg](const data::ForgerySample& s) { return attacks::fgsm_attack(*m, s.image, s.mask, cfg); };
            if (spec.method == AttackMethod::bim)
                return [m, cfg](const data::ForgerySample& s) { return attacks::bim_attack(*m, s.image, s.mask, cfg); };
            return [m, cfg](const data::ForgerySample& s) { return attacks::mim_attack(*m, s.image, s.mask, cfg); };
        }
        case AttackMethod::sear:
        case AttackMethod::advgan: {
            if (spec.generator_ckpt.empty())
                throw HarnessError(to_string(spec.method) + " needs a generator checkpoint");
            auto net = std::make_shared<models::ConcealerNet>(
                train::load_concealer_for_inference(spec.generator_ckpt));
            return [net](const data::ForgerySample& s) {
                return models::compose_anti_image(s.image, net->forward(s.image));
            };
        }
    }
    throw HarnessError("unreachable");
}

metrics::EvalReport evaluate_attack(const AttackFn& attack, models::ForwardLocalizer& target,
                                    const data::DatasetManifest& test, const EvalOptions& opts) {
    const auto samples = train::load_all(test, opts.input_size);
    metrics::EvalReport rep;
    rep.attack = opts.attack_label;
    rep.model = opts.model_label;
    rep.setting = opts.setting_label;
    rep.dataset = opts.dataset_label;

    std::vector<std::array<Tensor, 5>> sheet;
    for (const auto& s : samples) {
        Tensor pred_ori = target.forward(s.image);
        Tensor anti = attack(s);
        Tensor pred_anti = target.forward(anti);
        Tensor bin_ori = metrics::binarize(pred_ori);
        Tensor bin_anti = metrics::binarize(pred_anti);

        metrics::EvalReport::Row row;
        row.id = s.id;
        row.f1_ori = metrics::pixel_f1(bin_ori, s.mask);
        row.f1_anti = metrics::pixel_f1(bin_anti, s.mask);
        row.f1_reverse = metrics::f1_reverse(bin_anti, s.mask);
        row.psnr = metrics::psnr(anti, s.image);
        row.ssim = metrics::ssim(anti, s.image);
        rep.rows.push_back(row);

        if (!opts.contact_sheet.empty() && static_cast<int>(sheet.size()) < opts.contact_sheet_rows)
            sheet.push_back({s.image, anti, bin_ori, bin_anti, s.mask});
    }
    rep.finalize();
    if (!opts.contact_sheet.empty() && !sheet.empty()) write_contact_sheet(opts.contact_sheet, sheet);
    return rep;
}

metrics::EvalReport whitebox_eval(const AttackSpec& spec, models::GradLocalizer& target,
                                  const data::DatasetManifest& test, const EvalOptions& opts) {
    return evaluate_attack(make_attack(spec, &target), target, test, opts);
}

metrics::EvalReport blackbox_eval(const AttackSpec& spec, models::GradLocalizer* surrogate,
                                  models::ForwardLocalizer& target, const data::DatasetManifest& test,
                                  const EvalOptions& opts) {
    models::ForwardOnlyView sealed(target);
    return evaluate_attack(make_attack(spec, surrogate), sealed, test, opts);
}

}  // namespace sear::harness
