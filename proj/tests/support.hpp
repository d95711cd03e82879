#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

#include "signret/signret.hpp"

namespace testing_support {

using namespace signret;

inline PixelGrid random_grid(std::size_t rows, std::size_t cols, std::uint64_t seed, double lo = 0.0,
                             double hi = 255.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    PixelGrid g(rows, cols);
    for (double& v : g.values()) v = u(rng);
    return g;
}

/// Integer-valued image with smooth structure, edges and mild noise; a
/// stand-in for natural content where sign retrieval has something to use.
inline PixelGrid synthetic_scene(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 2.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double cx = u(rng) * cols, cy = u(rng) * rows, rad = (0.2 + 0.2 * u(rng)) * std::min(rows, cols);
    const double gx = 40.0 * (u(rng) - 0.5), gy = 40.0 * (u(rng) - 0.5);
    PixelGrid g(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            const double x = static_cast<double>(c) / cols, y = static_cast<double>(r) / rows;
            double v = 110.0 + gx * x + gy * y + 25.0 * std::sin(6.0 * x + 3.0 * y);
            if (std::hypot(c - cx, r - cy) < rad) v += 60.0;
            if (c > cols / 2 && r < rows / 3) v -= 45.0;
            g(r, c) = std::clamp(std::round(v + noise(rng)), 0.0, 255.0);
        }
    }
    return g;
}

inline std::string corpus_path(const std::string& name) { return std::string(SIGNRET_CORPUS_DIR) + "/" + name + ".pgm"; }

inline PixelGrid crop(const PixelGrid& g, std::size_t r0, std::size_t c0, std::size_t rows, std::size_t cols) {
    PixelGrid out(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) out(r, c) = g(r0 + r, c0 + c);
    return out;
}

}  // namespace testing_support
