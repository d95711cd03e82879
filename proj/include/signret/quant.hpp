#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>

#include "signret/errors.hpp"
#include "signret/grid.hpp"

namespace signret {

/// Standard JPEG luminance table (ITU-T T.81 Annex K, Table K.1), raster order.
inline constexpr std::array<int, 64> kJpegLuminance = {
    16, 11, 10, 16, 24,  40,  51,  61,  12, 12, 14, 19, 26,  58,  60,  55,
    14, 13, 16, 24, 40,  57,  69,  56,  14, 17, 22, 29, 51,  87,  80,  62,
    18, 22, 37, 56, 68,  109, 103, 77,  24, 35, 55, 64, 81,  104, 113, 92,
    49, 64, 78, 87, 103, 121, 120, 101, 72, 92, 95, 98, 112, 100, 103, 99};

struct QuantizerSpec {
    int quality = 50;
    std::array<int, 64> table{};

    int step(std::size_t u1, std::size_t u2) const { return table[u1 * kBlock + u2]; }
};

/// IJG quality scaling of the luminance table.
inline QuantizerSpec build_quantizer(int quality) {
    if (quality < 1 || quality > 100) {
        throw DomainError("quality " + std::to_string(quality) + " outside [1, 100]");
    }
    const long scale = quality < 50 ? 5000 / quality : 200 - 2L * quality;
    QuantizerSpec q;
    q.quality = quality;
    for (std::size_t i = 0; i < 64; ++i) {
        const long s = (kJpegLuminance[i] * scale + 50) / 100;
        q.table[i] = static_cast<int>(std::clamp(s, 1L, 255L));
    }
    return q;
}

/// Integer quantization index, rounding half away from zero.
inline std::int32_t quantize_level(double coefficient, int step) {
    return static_cast<std::int32_t>(std::round(coefficient / step));
}

inline CoefficientGrid quantize_dequantize(const CoefficientGrid& c, const QuantizerSpec& q) {
    require_block_multiple(c, "quantize_dequantize");
    CoefficientGrid out(c.rows(), c.cols());
    for (std::size_t r = 0; r < c.rows(); ++r) {
        for (std::size_t k = 0; k < c.cols(); ++k) {
            const int step = q.step(r % kBlock, k % kBlock);
            out(r, k) = static_cast<double>(quantize_level(c(r, k), step)) * step;
        }
    }
    return out;
}

}  // namespace signret
