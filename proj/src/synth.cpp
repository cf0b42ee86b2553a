#include "sear/data/synth.hpp"

#include <cmath>

#include "sear/rng.hpp"

namespace sear::data {

namespace {

struct Wave {
    float kx, ky, phase, amp;
};

struct TextureParams {
    float base[3];
    std::vector<Wave> waves;
    float noise_amp;
    uint32_t noise_salt;
};

// integer pixel hash -> [-1,1], independent of the sample RNG stream
float hash_noise(int x, int y, uint32_t salt) {
    uint32_t h = static_cast<uint32_t>(x) * 0x9e3779b9u ^ static_cast<uint32_t>(y) * 0x85ebca6bu ^ salt;
    h ^= h >> 16;
    h *= 0x7feb352du;
    h ^= h >> 15;
    h *= 0x846ca68bu;
    h ^= h >> 16;
    return static_cast<float>(h >> 8) * (2.0f / 16777216.0f) - 1.0f;
}

TextureParams draw_texture(Rng& rng) {
    TextureParams t;
    for (float& b : t.base) b = rng.uniform(0.25f, 0.75f);
    int n_waves = 2 + rng.uniform_int(2);
    for (int i = 0; i < n_waves; ++i) {
        float theta = rng.uniform(0.0f, 2.0f * static_cast<float>(M_PI));
        float freq = rng.uniform(0.15f, 1.1f);
        t.waves.push_back({freq * std::cos(theta), freq * std::sin(theta),
                           rng.uniform(0.0f, 2.0f * static_cast<float>(M_PI)), rng.uniform(0.04f, 0.14f)});
    }
    t.noise_amp = rng.uniform(0.01f, 0.06f);
    t.noise_salt = rng.next_u32();
    return t;
}

float texture_value(const TextureParams& t, int x, int y, int c) {
    float v = t.base[c];
    for (const Wave& w : t.waves)
        v += w.amp * std::sin(w.kx * x + w.ky * y + w.phase * (1.0f + 0.37f * c));
    v += t.noise_amp * hash_noise(x, y, t.noise_salt + 101u * c);
    return std::min(1.0f, std::max(0.0f, v));
}

float param_distance(const TextureParams& a, const TextureParams& b) {
    float d = 0.0f;
    for (int c = 0; c < 3; ++c) d += std::fabs(a.base[c] - b.base[c]);
    return d;
}

}  // namespace

std::vector<ForgerySample> synth_toy_forgery(uint64_t seed, int size, int count) {
    if (size < 32) throw DataError("synth_toy_forgery: size must be >= 32");
    std::vector<ForgerySample> out;
    out.reserve(count);

    for (int i = 0; i < count; ++i) {
        Rng rng(Rng::derive(seed, static_cast<uint64_t>(i)));

        TextureParams bg = draw_texture(rng);
        TextureParams fg = draw_texture(rng);
        // keep the two textures visibly apart so the splice carries signal
        while (param_distance(bg, fg) < 0.35f) fg = draw_texture(rng);

        ForgerySample s;
        s.id = "toy_" + std::string(5 - std::to_string(i).size(), '0') + std::to_string(i);
        s.image = Tensor(3, size, size);
        s.mask = Tensor(1, size, size);
        for (int y = 0; y < size; ++y)
            for (int x = 0; x < size; ++x)
                for (int c = 0; c < 3; ++c) s.image.at(c, y, x) = texture_value(bg, x, y, c);

        // splice region: rectangle or ellipse with area fraction in [7%, 35%]
        const float total = static_cast<float>(size) * size;
        for (int attempt = 0;; ++attempt) {
            float frac = rng.uniform(0.07f, 0.35f);
            bool ellipse = attempt < 4 && rng.uniform() < 0.5f;
            s.mask.zero();
            long area = 0;
            if (ellipse) {
                float a = rng.uniform(0.18f, 0.45f) * size * 0.5f;
                float b = frac * total / (static_cast<float>(M_PI) * a);
                b = std::min(b, 0.45f * size * 0.5f);
                int cx = rng.uniform_int(size), cy = rng.uniform_int(size);
                cx = std::clamp(cx, static_cast<int>(a) + 1, size - static_cast<int>(a) - 2);
                cy = std::clamp(cy, static_cast<int>(b) + 1, size - static_cast<int>(b) - 2);
                for (int y = 0; y < size; ++y)
                    for (int x = 0; x < size; ++x) {
                        float dx = (x - cx) / a, dy = (y - cy) / b;
                        if (dx * dx + dy * dy <= 1.0f) {
                            s.mask.at(0, y, x) = 1.0f;
                            ++area;
                        }
                    }
            } else {
                int w = std::clamp(static_cast<int>(std::lround(rng.uniform(0.4f, 1.6f) * std::sqrt(frac) * size)),
                                   4, size - 2);
                int h = std::clamp(static_cast<int>(std::lround(frac * total / w)), 4, size - 2);
                int x0 = rng.uniform_int(size - w);
                int y0 = rng.uniform_int(size - h);
                for (int y = y0; y < y0 + h; ++y)
                    for (int x = x0; x < x0 + w; ++x) {
                        s.mask.at(0, y, x) = 1.0f;
                        ++area;
                    }
            }
            float got = static_cast<float>(area) / total;
            if (got >= 0.05f && got <= 0.40f) break;
        }

        for (int y = 0; y < size; ++y)
            for (int x = 0; x < size; ++x)
                if (s.mask.at(0, y, x) == 1.0f)
                    for (int c = 0; c < 3; ++c) s.image.at(c, y, x) = texture_value(fg, x, y, c);

        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace sear::data
