#pragma once

#include <vector>

#include "sear/nn/layers.hpp"

namespace sear::nn {

// ADAM with bias correction. Moment buffers live in the Params; the
// optimizer owns only the step counter, so resetting for a new phase
// means zeroing moments and the counter.
class Adam {
public:
    explicit Adam(float lr = 2e-4f, float beta1 = 0.9f, float beta2 = 0.999f, float eps = 1e-8f)
        : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

    void step(const std::vector<Param*>& params);
    void reset(const std::vector<Param*>& params);  // fresh optimization problem

    float learning_rate() const { return lr_; }
    void set_learning_rate(float lr) { lr_ = lr; }
    long step_count() const { return t_; }
    void set_step_count(long t) { t_ = t; }

private:
    float lr_, beta1_, beta2_, eps_;
    long t_ = 0;
};

void zero_grad(const std::vector<Param*>& params);

}  // namespace sear::nn
