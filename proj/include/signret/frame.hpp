#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "signret/errors.hpp"
#include "signret/grid.hpp"

namespace signret {

/// Orthonormal two-channel filter bank described by its low-pass decomposition
/// filter; the high-pass filter is the quadrature mirror g[k] = (-1)^k h[L-1-k].
struct WaveletFilter {
    std::string name;
    std::vector<double> lowpass;

    std::vector<double> highpass() const {
        const std::size_t n = lowpass.size();
        std::vector<double> g(n);
        for (std::size_t k = 0; k < n; ++k) g[k] = (k % 2 == 0 ? 1.0 : -1.0) * lowpass[n - 1 - k];
        return g;
    }
};

/// Symlet with 12 taps (6 vanishing moments), decomposition low-pass.
/// Values as tabulated by PyWavelets for `sym6` (pywt.Wavelet("sym6").dec_lo);
/// they satisfy sum h = sqrt(2) and the double-shift orthogonality to ~1e-12.
inline WaveletFilter symlet12() {
    return {"sym6",
            {0.015404109327027373, 0.0034907120842174702, -0.11799011114819057,
             -0.048311742585633, 0.4910559419267466, 0.787641141030194, 0.3379294217276218,
             -0.07263752278646252, -0.021060292512300564, 0.04472490177066578,
             0.0017677118642428036, -0.007800708325034148}};
}

/// Undecimated frame coefficients. Subbands are stored level by level as
/// (low-high, high-low, high-high) details, then the final low-low band;
/// every subband has the full image shape.
struct FrameCoefficients {
    std::size_t rows = 0;
    std::size_t cols = 0;
    int levels = 0;
    std::vector<std::vector<double>> subbands;

    std::size_t subband_count() const noexcept { return subbands.size(); }
    std::vector<double>& approximation() { return subbands.back(); }

    double squared_norm() const {
        double s = 0.0;
        for (const auto& b : subbands)
            for (double v : b) s += v * v;
        return s;
    }
};

inline int max_frame_levels(std::size_t rows, std::size_t cols) {
    int j = 0;
    while ((std::size_t{1} << (j + 1)) <= std::min(rows, cols) && rows % (std::size_t{1} << (j + 1)) == 0 &&
           cols % (std::size_t{1} << (j + 1)) == 0) {
        ++j;
    }
    return j;
}

/// Translation-invariant (a trous) separable wavelet frame with periodic
/// boundaries. Filters at level j are upsampled by 2^j and scaled by 1/sqrt(2)
/// so that analysis is an isometry and synthesis is its adjoint (a Parseval
/// frame: synthesis(analysis(x)) == x).
///
/// Owns scratch buffers, so one instance must not be shared across threads.
class UndecimatedFrame {
public:
    UndecimatedFrame(std::size_t rows, std::size_t cols, int levels,
                     const WaveletFilter& filter = symlet12())
        : rows_(rows), cols_(cols), levels_(levels) {
        if (rows == 0 || cols == 0) throw ShapeError("frame: empty image");
        if (levels < 1 || levels > max_frame_levels(rows, cols)) {
            throw DomainError("frame: " + std::to_string(levels) + " levels not supported for " +
                              std::to_string(rows) + "x" + std::to_string(cols) + " (max " +
                              std::to_string(max_frame_levels(rows, cols)) + ")");
        }
        if (filter.lowpass.size() < 2) throw DomainError("frame: filter too short");
        const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
        for (double v : filter.lowpass) lo_.push_back(v * inv_sqrt2);
        for (double v : filter.highpass()) hi_.push_back(v * inv_sqrt2);
        const std::size_t n = rows * cols;
        approx_.resize(n);
        row_lo_.resize(n);
        row_hi_.resize(n);
        const std::size_t max_span = (lo_.size() - 1) << (levels - 1);
        ext_.resize(cols + max_span);
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    int levels() const noexcept { return levels_; }
    std::size_t subband_count() const noexcept { return 3 * static_cast<std::size_t>(levels_) + 1; }

    FrameCoefficients make_coefficients() const {
        FrameCoefficients fc;
        fc.rows = rows_;
        fc.cols = cols_;
        fc.levels = levels_;
        fc.subbands.assign(subband_count(), std::vector<double>(rows_ * cols_, 0.0));
        return fc;
    }

    void analysis(std::span<const double> x, FrameCoefficients& out) {
        check_coefficients(out);
        if (x.size() != rows_ * cols_) throw ShapeError("frame analysis: input size mismatch");
        std::copy(x.begin(), x.end(), approx_.begin());
        for (int j = 0; j < levels_; ++j) {
            const std::size_t step = std::size_t{1} << j;
            filter_rows_forward(approx_, row_lo_, row_hi_, step);
            auto& d_lh = out.subbands[3 * j];
            auto& d_hl = out.subbands[3 * j + 1];
            auto& d_hh = out.subbands[3 * j + 2];
            filter_cols_forward(row_lo_, lo_, approx_, step);
            filter_cols_forward(row_lo_, hi_, d_lh, step);
            filter_cols_forward(row_hi_, lo_, d_hl, step);
            filter_cols_forward(row_hi_, hi_, d_hh, step);
        }
        out.approximation() = approx_;
    }

    void synthesis(const FrameCoefficients& in, std::span<double> x) {
        check_coefficients(in);
        if (x.size() != rows_ * cols_) throw ShapeError("frame synthesis: output size mismatch");
        approx_ = in.subbands.back();
        for (int j = levels_ - 1; j >= 0; --j) {
            const std::size_t step = std::size_t{1} << j;
            std::fill(row_lo_.begin(), row_lo_.end(), 0.0);
            std::fill(row_hi_.begin(), row_hi_.end(), 0.0);
            filter_cols_adjoint(approx_, lo_, row_lo_, step);
            filter_cols_adjoint(in.subbands[3 * j], hi_, row_lo_, step);
            filter_cols_adjoint(in.subbands[3 * j + 1], lo_, row_hi_, step);
            filter_cols_adjoint(in.subbands[3 * j + 2], hi_, row_hi_, step);
            filter_rows_adjoint(row_lo_, row_hi_, approx_, step);
        }
        std::copy(approx_.begin(), approx_.end(), x.begin());
    }

private:
    void check_coefficients(const FrameCoefficients& fc) const {
        if (fc.rows != rows_ || fc.cols != cols_ || fc.levels != levels_ ||
            fc.subbands.size() != subband_count()) {
            throw ShapeError("frame: coefficient layout does not match the transform");
        }
        for (const auto& b : fc.subbands) {
            if (b.size() != rows_ * cols_) throw ShapeError("frame: subband size mismatch");
        }
    }

    // lo[i] = sum_k h[k] x[(i - k*step) mod n] along each row; same for hi with g.
    void filter_rows_forward(const std::vector<double>& src, std::vector<double>& lo,
                             std::vector<double>& hi, std::size_t step) {
        const std::size_t n = cols_;
        const std::size_t taps = lo_.size();
        const std::size_t pad = (taps - 1) * step;
        double* ext = ext_.data();
        for (std::size_t r = 0; r < rows_; ++r) {
            const double* x = src.data() + r * n;
            for (std::size_t p = 0; p < n + pad; ++p) ext[p] = x[(p + n * (pad / n + 1) - pad) % n];
            double* yl = lo.data() + r * n;
            double* yh = hi.data() + r * n;
            std::fill(yl, yl + n, 0.0);
            std::fill(yh, yh + n, 0.0);
            for (std::size_t k = 0; k < taps; ++k) {
                const double* e = ext + pad - k * step;
                const double hk = lo_[k];
                const double gk = hi_[k];
                for (std::size_t i = 0; i < n; ++i) {
                    yl[i] += hk * e[i];
                    yh[i] += gk * e[i];
                }
            }
        }
    }

    // x[i] = sum_k h[k] lo[(i + k*step) mod n] + g[k] hi[(i + k*step) mod n].
    void filter_rows_adjoint(const std::vector<double>& lo, const std::vector<double>& hi,
                             std::vector<double>& dst, std::size_t step) {
        const std::size_t n = cols_;
        const std::size_t taps = lo_.size();
        const std::size_t pad = (taps - 1) * step;
        double* ext = ext_.data();
        for (std::size_t r = 0; r < rows_; ++r) {
            double* x = dst.data() + r * n;
            std::fill(x, x + n, 0.0);
            for (int pass = 0; pass < 2; ++pass) {
                const double* y = (pass == 0 ? lo : hi).data() + r * n;
                const auto& f = pass == 0 ? lo_ : hi_;
                for (std::size_t p = 0; p < n + pad; ++p) ext[p] = y[p % n];
                for (std::size_t k = 0; k < taps; ++k) {
                    const double* e = ext + k * step;
                    const double fk = f[k];
                    for (std::size_t i = 0; i < n; ++i) x[i] += fk * e[i];
                }
            }
        }
    }

    // dst row i = sum_k f[k] src row ((i - k*step) mod rows).
    void filter_cols_forward(const std::vector<double>& src, const std::vector<double>& f,
                             std::vector<double>& dst, std::size_t step) const {
        const std::size_t n = cols_;
        const std::size_t m = rows_;
        const std::size_t wrap = m * ((f.size() * step) / m + 1);
        for (std::size_t i = 0; i < m; ++i) {
            double* y = dst.data() + i * n;
            std::fill(y, y + n, 0.0);
            for (std::size_t k = 0; k < f.size(); ++k) {
                const double* x = src.data() + ((i + wrap - k * step) % m) * n;
                const double fk = f[k];
                for (std::size_t c = 0; c < n; ++c) y[c] += fk * x[c];
            }
        }
    }

    // dst row i += sum_k f[k] src row ((i + k*step) mod rows).
    void filter_cols_adjoint(const std::vector<double>& src, const std::vector<double>& f,
                             std::vector<double>& dst, std::size_t step) const {
        const std::size_t n = cols_;
        const std::size_t m = rows_;
        for (std::size_t i = 0; i < m; ++i) {
            double* y = dst.data() + i * n;
            for (std::size_t k = 0; k < f.size(); ++k) {
                const double* x = src.data() + ((i + k * step) % m) * n;
                const double fk = f[k];
                for (std::size_t c = 0; c < n; ++c) y[c] += fk * x[c];
            }
        }
    }

    std::size_t rows_;
    std::size_t cols_;
    int levels_;
    std::vector<double> lo_;
    std::vector<double> hi_;
    std::vector<double> approx_;
    std::vector<double> row_lo_;
    std::vector<double> row_hi_;
    std::vector<double> ext_;
};

inline FrameCoefficients frame_analysis(const PixelGrid& g, int levels,
                                        const WaveletFilter& filter = symlet12()) {
    UndecimatedFrame frame(g.rows(), g.cols(), levels, filter);
    auto fc = frame.make_coefficients();
    frame.analysis(g.values(), fc);
    return fc;
}

inline PixelGrid frame_synthesis(const FrameCoefficients& fc, const WaveletFilter& filter = symlet12()) {
    UndecimatedFrame frame(fc.rows, fc.cols, fc.levels, filter);
    PixelGrid g(fc.rows, fc.cols);
    frame.synthesis(fc, g.values());
    return g;
}

}  // namespace signret
