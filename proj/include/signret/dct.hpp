#pragma once

#include <array>
#include <cmath>
#include <numbers>

#include "signret/grid.hpp"

namespace signret {

namespace detail {

// basis[u][i] = c(u) * cos((2i + 1) u pi / 16), c(0) = sqrt(1/8), c(u>0) = sqrt(2/8).
inline const std::array<std::array<double, kBlock>, kBlock>& dct_basis() {
    static const auto table = [] {
        std::array<std::array<double, kBlock>, kBlock> b{};
        for (std::size_t u = 0; u < kBlock; ++u) {
            const double scale = u == 0 ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0);
            for (std::size_t i = 0; i < kBlock; ++i) {
                b[u][i] = scale * std::cos((2.0 * i + 1.0) * u * std::numbers::pi / 16.0);
            }
        }
        return b;
    }();
    return table;
}

}  // namespace detail

/// Orthonormal 8x8 DCT-II of every block. `src` and `dst` are row-major
/// buffers of identical shape (rows, cols multiples of 8); they may not alias.
inline void block_dct_forward(const double* src, double* dst, std::size_t rows, std::size_t cols) {
    const auto& b = detail::dct_basis();
    double tmp[kBlock][kBlock];
    for (std::size_t r0 = 0; r0 < rows; r0 += kBlock) {
        for (std::size_t c0 = 0; c0 < cols; c0 += kBlock) {
            // rows of the block: tmp[i][v] = sum_j x[i][j] b[v][j]
            for (std::size_t i = 0; i < kBlock; ++i) {
                const double* x = src + (r0 + i) * cols + c0;
                for (std::size_t v = 0; v < kBlock; ++v) {
                    double s = 0.0;
                    for (std::size_t j = 0; j < kBlock; ++j) s += x[j] * b[v][j];
                    tmp[i][v] = s;
                }
            }
            for (std::size_t u = 0; u < kBlock; ++u) {
                double* y = dst + (r0 + u) * cols + c0;
                for (std::size_t v = 0; v < kBlock; ++v) {
                    double s = 0.0;
                    for (std::size_t i = 0; i < kBlock; ++i) s += b[u][i] * tmp[i][v];
                    y[v] = s;
                }
            }
        }
    }
}

inline void block_dct_inverse(const double* src, double* dst, std::size_t rows, std::size_t cols) {
    const auto& b = detail::dct_basis();
    double tmp[kBlock][kBlock];
    for (std::size_t r0 = 0; r0 < rows; r0 += kBlock) {
        for (std::size_t c0 = 0; c0 < cols; c0 += kBlock) {
            for (std::size_t u = 0; u < kBlock; ++u) {
                const double* y = src + (r0 + u) * cols + c0;
                for (std::size_t j = 0; j < kBlock; ++j) {
                    double s = 0.0;
                    for (std::size_t v = 0; v < kBlock; ++v) s += y[v] * b[v][j];
                    tmp[u][j] = s;
                }
            }
            for (std::size_t i = 0; i < kBlock; ++i) {
                double* x = dst + (r0 + i) * cols + c0;
                for (std::size_t j = 0; j < kBlock; ++j) {
                    double s = 0.0;
                    for (std::size_t u = 0; u < kBlock; ++u) s += b[u][i] * tmp[u][j];
                    x[j] = s;
                }
            }
        }
    }
}

inline CoefficientGrid dct2_forward(const PixelGrid& g) {
    require_block_multiple(g, "dct2_forward");
    CoefficientGrid c(g.rows(), g.cols());
    block_dct_forward(g.data(), c.data(), g.rows(), g.cols());
    return c;
}

inline PixelGrid dct2_inverse(const CoefficientGrid& c) {
    require_block_multiple(c, "dct2_inverse");
    PixelGrid g(c.rows(), c.cols());
    block_dct_inverse(c.data(), g.data(), c.rows(), c.cols());
    return g;
}

/// Zig-zag scan: kZigZag[k] is the in-block raster index (8*u1 + u2) of the
/// k-th coefficient in low-to-high frequency order.
inline constexpr std::array<std::uint8_t, 64> kZigZag = {
    0,  1,  8,  16, 9,  2,  3,  10, 17, 24, 32, 25, 18, 11, 4,  5,
    12, 19, 26, 33, 40, 48, 41, 34, 27, 20, 13, 6,  7,  14, 21, 28,
    35, 42, 49, 56, 57, 50, 43, 36, 29, 22, 15, 23, 30, 37, 44, 51,
    58, 59, 52, 45, 38, 31, 39, 46, 53, 60, 61, 54, 47, 55, 62, 63};

}  // namespace signret
