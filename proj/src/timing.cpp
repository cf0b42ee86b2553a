#include <chrono>

#include "sear/harness/harness.hpp"

namespace sear::harness {

double timing_benchmark(const AttackFn& attack, const std::vector<data::ForgerySample>& samples, int warmup) {
    if (samples.empty()) throw HarnessError("timing_benchmark: empty sample set");
    for (int i = 0; i < warmup; ++i) attack(samples[i % samples.size()]);

    double total = 0.0;
    for (const auto& s : samples) {
        const auto t0 = std::chrono::steady_clock::now();
        Tensor out = attack(s);
        total += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (out.numel() == 0) throw HarnessError("attack produced an empty image");
    }
    return total / static_cast<double>(samples.size());
}

}  // namespace sear::harness
