#include "sear/nn/adam.hpp"

#include <cmath>

namespace sear::nn {

void Adam::step(const std::vector<Param*>& params) {
    ++t_;
    const float bc1 = 1.0f - std::pow(beta1_, static_cast<float>(t_));
    const float bc2 = 1.0f - std::pow(beta2_, static_cast<float>(t_));
    for (Param* p : params) {
        for (size_t i = 0; i < p->size(); ++i) {
            const float g = p->g[i];
            p->m[i] = beta1_ * p->m[i] + (1.0f - beta1_) * g;
            p->v[i] = beta2_ * p->v[i] + (1.0f - beta2_) * g * g;
            const float mhat = p->m[i] / bc1;
            const float vhat = p->v[i] / bc2;
            p->w[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
        }
    }
}

void Adam::reset(const std::vector<Param*>& params) {
    t_ = 0;
    for (Param* p : params) {
        std::fill(p->m.begin(), p->m.end(), 0.0f);
        std::fill(p->v.begin(), p->v.end(), 0.0f);
    }
}

void zero_grad(const std::vector<Param*>& params) {
    for (Param* p : params) std::fill(p->g.begin(), p->g.end(), 0.0f);
}

}  // namespace sear::nn
