#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "signret/codec.hpp"
#include "signret/errors.hpp"
#include "signret/grid.hpp"

namespace signret {

/// H2(p) in bits, with H2(0) = H2(1) = 0.
inline double binary_entropy(double p) {
    if (p <= 0.0 || p >= 1.0) return 0.0;
    return -(p * std::log2(p) + (1.0 - p) * std::log2(1.0 - p));
}

/// Zeroth-order empirical entropy of the residual, in bits per image pixel.
inline double residual_entropy_bpp(const ResidualPlane& e, std::size_t n_pixels) {
    if (n_pixels == 0) throw DomainError("residual_entropy_bpp: n_pixels must be > 0");
    if (e.size() == 0) return 0.0;
    const double p = static_cast<double>(e.ones()) / static_cast<double>(e.size());
    return static_cast<double>(e.size()) * binary_entropy(p) / static_cast<double>(n_pixels);
}

/// Fraction of nonzero AC positions whose signs agree.
inline double sign_accuracy(const SignPlane& truth, const SignPlane& retrieved) {
    const ResidualPlane e = compute_residual(truth, retrieved);
    if (e.size() == 0) return 1.0;
    return 1.0 - static_cast<double>(e.ones()) / static_cast<double>(e.size());
}

/// 10 log10(255^2 / MSE); +infinity when the images are identical.
inline double psnr(const PixelGrid& a, const PixelGrid& b) {
    require_same_shape(a, b, "psnr");
    if (a.empty()) throw ShapeError("psnr: empty images");
    double se = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        se += d * d;
    }
    if (se == 0.0) return std::numeric_limits<double>::infinity();
    const double mse = se / static_cast<double>(a.size());
    return 10.0 * std::log10(255.0 * 255.0 / mse);
}

/// One CSV row of a sweep. `method` is "sr" for the retrieval codec and "raw"
/// for the 1-bit-per-sign baseline (gamma 0, p 0.5, PSNR of random signs).
struct EvalRecord {
    std::string image;
    std::string method = "sr";
    int quality = 0;
    int gamma = 0;
    std::size_t sign_count = 0;
    double one_fraction = 0.0;
    double entropy_bpp = 0.0;
    double coded_bpp = 0.0;
    double accuracy = 0.0;
    double psnr_db = 0.0;
    std::vector<double> alphas;
    double seconds = 0.0;

    static std::string csv_header() {
        return "image,method,quality,gamma,sign_count,one_fraction,entropy_bpp,coded_bpp,accuracy,psnr_db,alpha,"
               "seconds";
    }

    /// `alpha` is the per-cascade list joined with ';'. PSNR +inf prints "inf".
    std::string csv_row() const {
        std::string alpha;
        for (std::size_t i = 0; i < alphas.size(); ++i) {
            if (i > 0) alpha += ';';
            alpha += fmt(alphas[i]);
        }
        return image + "," + method + "," + std::to_string(quality) + "," + std::to_string(gamma) + "," +
               std::to_string(sign_count) + "," + fmt(one_fraction) + "," + fmt(entropy_bpp) + "," + fmt(coded_bpp) +
               "," + fmt(accuracy) + "," + (std::isinf(psnr_db) ? std::string("inf") : fmt(psnr_db)) + "," + alpha +
               "," + fmt(seconds, "%.3f");
    }

private:
    static std::string fmt(double v, const char* spec = "%.6f") {
        char buf[64];
        std::snprintf(buf, sizeof buf, spec, v);
        return buf;
    }
};

}  // namespace signret
