#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace signret {

/// Reproducible standard-normal stream shared by encoder and decoder.
///
/// Engine: std::mt19937_64 (its output sequence is fixed by the C++ standard).
/// Uniforms: the top 53 bits of one engine draw, scaled to [0, 1).
/// Normals: Marsaglia polar method on pairs of uniforms mapped to (-1, 1);
/// both values of an accepted pair are used, first v1*f then v2*f.
/// The std:: distributions are avoided because their algorithms are
/// implementation-defined.
class NormalStream {
public:
    static constexpr int kVersion = 1;

    explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double next() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        for (;;) {
            const double v1 = 2.0 * uniform() - 1.0;
            const double v2 = 2.0 * uniform() - 1.0;
            const double s = v1 * v1 + v2 * v2;
            if (s >= 1.0 || s == 0.0) continue;
            const double f = std::sqrt(-2.0 * std::log(s) / s);
            spare_ = v2 * f;
            has_spare_ = true;
            return v1 * f;
        }
    }

    std::uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace signret
