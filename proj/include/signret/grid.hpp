#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "signret/errors.hpp"

namespace signret {

inline constexpr std::size_t kBlock = 8;

/// Dense row-major 2D array. `Tag` makes otherwise identical planes distinct
/// types so a magnitude plane cannot be passed where pixels are expected.
template <typename T, typename Tag>
class Plane {
public:
    using value_type = T;

    Plane() = default;
    Plane(std::size_t rows, std::size_t cols, T fill = T{})
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    T& operator[](std::size_t i) { return data_[i]; }
    const T& operator[](std::size_t i) const { return data_[i]; }

    std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::span<T> values() { return data_; }
    std::span<const T> values() const { return data_; }

    T* data() noexcept { return data_.data(); }
    const T* data() const noexcept { return data_.data(); }

    template <typename OtherTag>
    bool same_shape(const Plane<T, OtherTag>& o) const noexcept {
        return rows_ == o.rows() && cols_ == o.cols();
    }

    bool operator==(const Plane&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

struct PixelTag {};
struct CoefficientTag {};
struct MagnitudeTag {};
struct SignTag {};
struct DcTag {};

/// Spatial-domain image; 0..255 on ingest, real-valued inside the solver.
using PixelGrid = Plane<double, PixelTag>;
/// Per-block orthonormal DCT coefficients, stored in place: entry
/// (8*b1 + u1, 8*b2 + u2) is frequency (u1, u2) of block (b1, b2).
using CoefficientGrid = Plane<double, CoefficientTag>;
/// |coefficient| bounds; the only coefficient data the solver may read.
using MagnitudePlane = Plane<double, MagnitudeTag>;
/// +1, -1, or 0 where the paired magnitude is zero.
using SignPlane = Plane<std::int8_t, SignTag>;
/// Signed DC value per block, shape (rows/8, cols/8). Transmitted, never retrieved.
using DcPlane = Plane<double, DcTag>;

template <typename A, typename B>
void require_same_shape(const A& a, const B& b, const char* where) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw ShapeError(std::string(where) + ": shape mismatch " + std::to_string(a.rows()) +
                         "x" + std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) +
                         "x" + std::to_string(b.cols()));
    }
}

template <typename P>
void require_block_multiple(const P& p, const char* where) {
    if (p.rows() == 0 || p.cols() == 0 || p.rows() % kBlock != 0 || p.cols() % kBlock != 0) {
        throw ShapeError(std::string(where) + ": dimensions " + std::to_string(p.rows()) + "x" +
                         std::to_string(p.cols()) + " are not positive multiples of 8");
    }
}

inline bool is_dc(std::size_t r, std::size_t c) noexcept {
    return r % kBlock == 0 && c % kBlock == 0;
}

}  // namespace signret
