#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "signret/dct.hpp"
#include "signret/errors.hpp"
#include "signret/frame.hpp"
#include "signret/grid.hpp"
#include "signret/rng.hpp"

namespace signret {

struct SolverConfig {
    double lambda = 1.0;
    double mu = 10.0;
    int theta_max = 200;
    int gamma_max = 3;
    std::uint64_t seed = 0;
    int levels = 3;

    // lambda == 0 is accepted: it turns the l1 step into the identity.
    void validate() const {
        if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw DomainError("lambda must be >= 0");
        if (!(mu > 0.0) || !std::isfinite(mu)) throw DomainError("mu must be > 0");
        if (theta_max < 1) throw DomainError("theta_max must be >= 1");
        if (gamma_max < 1) throw DomainError("gamma_max must be >= 1");
        if (levels < 1) throw DomainError("levels must be >= 1");
    }
};

/// |coefficient| at every position (DC included).
inline MagnitudePlane magnitudes_of(const CoefficientGrid& c) {
    MagnitudePlane m(c.rows(), c.cols());
    for (std::size_t i = 0; i < c.size(); ++i) m[i] = std::abs(c[i]);
    return m;
}

inline DcPlane dc_of(const CoefficientGrid& c) {
    require_block_multiple(c, "dc_of");
    DcPlane dc(c.rows() / kBlock, c.cols() / kBlock);
    for (std::size_t b1 = 0; b1 < dc.rows(); ++b1)
        for (std::size_t b2 = 0; b2 < dc.cols(); ++b2) dc(b1, b2) = c(b1 * kBlock, b2 * kBlock);
    return dc;
}

/// sgn with the +1 tie-break at zero; 0 only where the bound is zero.
inline std::int8_t sign_with_bound(double value, double bound) {
    if (bound == 0.0) return 0;
    return value < 0.0 ? std::int8_t{-1} : std::int8_t{1};
}

inline SignPlane signs_of(const CoefficientGrid& c) {
    SignPlane s(c.rows(), c.cols());
    for (std::size_t i = 0; i < c.size(); ++i) s[i] = c[i] == 0.0 ? 0 : (c[i] < 0.0 ? -1 : 1);
    return s;
}

/// Anchor image: standard normals from NormalStream(seed), raster order.
inline PixelGrid make_anchor(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    PixelGrid phi(rows, cols);
    NormalStream rng(seed);
    for (double& v : phi.values()) v = rng.next();
    return phi;
}

inline double soft_threshold(double v, double lambda) {
    if (v > lambda) return v - lambda;
    if (v < -lambda) return v + lambda;
    return 0.0;
}

namespace detail {

inline void prox_l1_inplace(UndecimatedFrame& frame, FrameCoefficients& scratch, std::span<const double> z,
                            double lambda, std::span<double> out) {
    frame.analysis(z, scratch);
    for (auto& band : scratch.subbands)
        for (double& v : band) v = soft_threshold(v, lambda);
    frame.synthesis(scratch, out);
}

inline void anchor_step_inplace(std::span<double> f, std::span<const double> phi, double inv_mu) {
    for (std::size_t i = 0; i < f.size(); ++i) f[i] += inv_mu * phi[i];
}

// `work` receives the DCT of `g`; `out` the projected image. `out` may alias `g`.
inline void project_box_inplace(std::span<const double> g, const MagnitudePlane& mags, const DcPlane& dc,
                                std::span<double> work, std::span<double> out) {
    const std::size_t rows = mags.rows();
    const std::size_t cols = mags.cols();
    block_dct_forward(g.data(), work.data(), rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        double* t = work.data() + r * cols;
        const double* m = mags.data() + r * cols;
        for (std::size_t c = 0; c < cols; ++c) t[c] = std::clamp(t[c], -m[c], m[c]);
        if (r % kBlock == 0) {
            for (std::size_t c = 0; c < cols; c += kBlock) t[c] = dc(r / kBlock, c / kBlock);
        }
    }
    block_dct_inverse(work.data(), out.data(), rows, cols);
}

}  // namespace detail

/// Psi^T { sgn(Psi z) (|Psi z| - lambda)_+ }.
inline PixelGrid prox_l1(const PixelGrid& z, double lambda, int levels,
                         const WaveletFilter& filter = symlet12()) {
    if (!(lambda >= 0.0)) throw DomainError("prox_l1: lambda must be >= 0");
    UndecimatedFrame frame(z.rows(), z.cols(), levels, filter);
    auto scratch = frame.make_coefficients();
    PixelGrid out(z.rows(), z.cols());
    detail::prox_l1_inplace(frame, scratch, z.values(), lambda, out.values());
    return out;
}

/// f + (1/mu) phi.
inline PixelGrid anchor_step(const PixelGrid& f, const PixelGrid& phi, double mu) {
    require_same_shape(f, phi, "anchor_step");
    if (!(mu > 0.0)) throw DomainError("anchor_step: mu must be > 0");
    PixelGrid g = f;
    detail::anchor_step_inplace(g.values(), phi.values(), 1.0 / mu);
    return g;
}

/// Euclidean projection onto { z : |DCT(z)_AC| <= mags, DCT(z)_DC = dc }.
inline PixelGrid project_box(const PixelGrid& g, const MagnitudePlane& mags, const DcPlane& dc) {
    require_same_shape(g, mags, "project_box");
    require_block_multiple(g, "project_box");
    if (dc.rows() != g.rows() / kBlock || dc.cols() != g.cols() / kBlock) {
        throw ShapeError("project_box: DC plane does not match the block grid");
    }
    PixelGrid out(g.rows(), g.cols());
    std::vector<double> work(g.size());
    detail::project_box_inplace(g.values(), mags, dc, work, out.values());
    return out;
}

/// ret_sgn: sign of each DCT coefficient of z, 0 where the bound is 0.
inline SignPlane extract_signs(const PixelGrid& z, const MagnitudePlane& mags) {
    require_same_shape(z, mags, "extract_signs");
    const CoefficientGrid t = dct2_forward(z);
    SignPlane s(z.rows(), z.cols());
    for (std::size_t i = 0; i < t.size(); ++i) s[i] = sign_with_bound(t[i], mags[i]);
    return s;
}

/// 1 - (2/pi) arccos(<x, phi> / (|x| |phi|)).
inline double alpha_constant(std::span<const double> x, std::span<const double> phi) {
    if (x.size() != phi.size()) throw ShapeError("alpha_constant: size mismatch");
    double xy = 0.0, xx = 0.0, yy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        xy += x[i] * phi[i];
        xx += x[i] * x[i];
        yy += phi[i] * phi[i];
    }
    if (xx == 0.0 || yy == 0.0) throw DomainError("alpha_constant: zero vector");
    const double cosine = std::clamp(xy / (std::sqrt(xx) * std::sqrt(yy)), -1.0, 1.0);
    return 1.0 - 2.0 / std::numbers::pi * std::acos(cosine);
}

inline double alpha_constant(const PixelGrid& x, const PixelGrid& phi) {
    require_same_shape(x, phi, "alpha_constant");
    return alpha_constant(x.values(), phi.values());
}

/// Called after each cascade with (cascade index starting at 1, anchor used
/// by that cascade, its solution z*).
using CascadeObserver = std::function<void(int, const PixelGrid&, const PixelGrid&)>;

/// Cascaded Fienup iteration for the l1-regularized sign-retrieval problem.
///
/// Each cascade starts from z = project_box(phi) and repeats
///   f = prox_l1(z), g = f + phi / mu, z = project_box(g)
/// theta_max times; the next cascade uses phi = z*. The first anchor is
/// make_anchor(seed). All loops run in a fixed order, so a given
/// (magnitudes, DC, config) always yields bit-identical output.
class FienupSolver {
public:
    FienupSolver(std::size_t rows, std::size_t cols, const SolverConfig& cfg,
                 const WaveletFilter& filter = symlet12())
        : cfg_(cfg), frame_((cfg.validate(), rows), cols, cfg.levels, filter),
          scratch_(frame_.make_coefficients()), f_(rows * cols), work_(rows * cols) {}

    PixelGrid solve(const MagnitudePlane& mags, const DcPlane& dc, const CascadeObserver& observer = {}) {
        return solve_from(make_anchor(mags.rows(), mags.cols(), cfg_.seed), mags, dc, observer);
    }

    /// Same iteration with a caller-supplied first anchor.
    PixelGrid solve_from(PixelGrid phi, const MagnitudePlane& mags, const DcPlane& dc,
                         const CascadeObserver& observer = {}) {
        if (mags.rows() != frame_.rows() || mags.cols() != frame_.cols()) {
            throw ShapeError("fienup_solve: magnitude plane does not match solver shape");
        }
        require_same_shape(phi, mags, "fienup_solve");
        if (dc.rows() != mags.rows() / kBlock || dc.cols() != mags.cols() / kBlock) {
            throw ShapeError("fienup_solve: DC plane does not match the block grid");
        }
        for (double m : mags.values()) {
            if (!(m >= 0.0)) throw DomainError("fienup_solve: magnitudes must be >= 0");
        }
        const double inv_mu = 1.0 / cfg_.mu;
        PixelGrid z(mags.rows(), mags.cols());
        for (int gamma = 1; gamma <= cfg_.gamma_max; ++gamma) {
            detail::project_box_inplace(phi.values(), mags, dc, work_, z.values());
            for (int theta = 1; theta <= cfg_.theta_max; ++theta) {
                detail::prox_l1_inplace(frame_, scratch_, z.values(), cfg_.lambda, f_);
                detail::anchor_step_inplace(f_, phi.values(), inv_mu);
                detail::project_box_inplace(f_, mags, dc, work_, z.values());
            }
            if (observer) observer(gamma, phi, z);
            phi = z;
        }
        return z;
    }

    const SolverConfig& config() const noexcept { return cfg_; }

private:
    SolverConfig cfg_;
    UndecimatedFrame frame_;
    FrameCoefficients scratch_;
    std::vector<double> f_;
    std::vector<double> work_;
};

inline PixelGrid fienup_solve(const MagnitudePlane& mags, const DcPlane& dc, const SolverConfig& cfg,
                              const CascadeObserver& observer = {}) {
    FienupSolver solver(mags.rows(), mags.cols(), cfg);
    return solver.solve(mags, dc, observer);
}

}  // namespace signret
