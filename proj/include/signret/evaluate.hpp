#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "signret/arith.hpp"
#include "signret/codec.hpp"
#include "signret/metrics.hpp"
#include "signret/rng.hpp"

namespace signret {

/// Baseline magnitudes and DC with AC signs taken from `signs`, rounded and
/// clamped for display.
inline PixelGrid reconstruct_with_signs(const CoefficientGrid& baseline, const SignPlane& signs) {
    require_same_shape(baseline, signs, "reconstruct_with_signs");
    CoefficientGrid c = baseline;
    for (std::size_t r = 0; r < c.rows(); ++r) {
        for (std::size_t k = 0; k < c.cols(); ++k) {
            if (is_dc(r, k)) continue;
            c(r, k) = std::abs(baseline(r, k)) * signs(r, k);
        }
    }
    PixelGrid g = dct2_inverse(c);
    for (double& v : g.values()) v = to_display_sample(v);
    return g;
}

/// Independent equiprobable sign for every nonzero AC (zeros stay zero).
inline SignPlane random_signs(const SignPlane& pattern, std::uint64_t seed) {
    NormalStream rng(seed);
    SignPlane s = pattern;
    for (std::size_t r = 0; r < s.rows(); ++r) {
        for (std::size_t k = 0; k < s.cols(); ++k) {
            if (is_dc(r, k) || s(r, k) == 0) continue;
            s(r, k) = rng.uniform() < 0.5 ? std::int8_t{1} : std::int8_t{-1};
        }
    }
    return s;
}

/// Rate and quality figures for one set of retrieved signs.
struct SignEvaluation {
    std::size_t sign_count = 0;
    double one_fraction = 0.0;
    double entropy_bpp = 0.0;
    double coded_bpp = 0.0;
    double accuracy = 1.0;
    double psnr_db = 0.0;  ///< retrieved-sign-only reconstruction vs baseline
};

inline SignEvaluation evaluate_signs(const CoefficientGrid& baseline, const SignPlane& truth, const SignPlane& retrieved) {
    SignEvaluation ev;
    const ResidualPlane e = compute_residual(truth, retrieved);
    const std::size_t n_pixels = baseline.size();
    ev.sign_count = e.size();
    ev.one_fraction = e.size() == 0 ? 0.0 : static_cast<double>(e.ones()) / static_cast<double>(e.size());
    ev.accuracy = 1.0 - ev.one_fraction;
    ev.entropy_bpp = residual_entropy_bpp(e, n_pixels);
    ev.coded_bpp = 8.0 * static_cast<double>(arith_encode_bits(e.bits).size()) / static_cast<double>(n_pixels);
    ev.psnr_db = psnr(reconstruct_with_signs(baseline, retrieved), reconstruct_with_signs(baseline, truth));
    return ev;
}

}  // namespace signret
