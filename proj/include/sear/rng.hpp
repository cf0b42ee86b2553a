#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>

namespace sear {

// Deterministic RNG. mt19937's raw output sequence is pinned by the C++
// standard; the std distributions are not, so we derive values from raw
// draws ourselves to get byte-identical datasets and weight init across
// compilers.
class Rng {
public:
    explicit Rng(uint64_t seed) : eng_(static_cast<uint32_t>(seed ^ (seed >> 32))) {}

    uint32_t next_u32() { return eng_(); }

    // in [0,1)
    float uniform() { return static_cast<float>(eng_() >> 8) * (1.0f / 16777216.0f); }
    double uniform_d() { return static_cast<double>(eng_() >> 8) * (1.0 / 16777216.0); }

    float uniform(float a, float b) { return a + (b - a) * uniform(); }

    // in [0,n)
    int uniform_int(int n) { return static_cast<int>(eng_() % static_cast<uint32_t>(n)); }

    // Box-Muller; consumes two draws per pair
    float normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        while (u1 <= 1e-12) u1 = uniform_d();
        double u2 = uniform_d();
        double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = static_cast<float>(r * std::sin(2.0 * M_PI * u2));
        have_spare_ = true;
        return static_cast<float>(r * std::cos(2.0 * M_PI * u2));
    }

    // Fisher-Yates
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[uniform_int(static_cast<int>(i))]);
    }

    std::string state() const {
        std::ostringstream os;
        os << eng_;
        return os.str();
    }
    void restore(const std::string& s) {
        std::istringstream is(s);
        is >> eng_;
        have_spare_ = false;
    }

    // stable per-index stream derivation (splitmix64 mix)
    static uint64_t derive(uint64_t seed, uint64_t salt) {
        uint64_t z = seed + 0x9e3779b97f4a7c15ull * (salt + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

private:
    std::mt19937 eng_;
    bool have_spare_ = false;
    float spare_ = 0.0f;
};

}  // namespace sear
