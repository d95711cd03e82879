#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <vector>

#include "signret/arith.hpp"
#include "signret/bitio.hpp"
#include "signret/dct.hpp"
#include "signret/errors.hpp"
#include "signret/grid.hpp"
#include "signret/image.hpp"
#include "signret/quant.hpp"
#include "signret/solver.hpp"

namespace signret {

// ---------------------------------------------------------------------------
// Residual plane

/// Sign-correction bits, one per nonzero AC coefficient in canonical order
/// (blocks in raster order, zig-zag inside a block). 0 = retrieved sign is
/// right, 1 = flip it.
struct ResidualPlane {
    std::vector<std::uint8_t> bits;

    std::size_t size() const noexcept { return bits.size(); }
    std::size_t ones() const {
        std::size_t n = 0;
        for (auto b : bits) n += b;
        return n;
    }
    bool operator==(const ResidualPlane&) const = default;
};

/// Visits (row, col) of every AC position in canonical order.
template <typename P, typename F>
void for_each_ac_canonical(const P& plane, F&& visit) {
    for (std::size_t r0 = 0; r0 < plane.rows(); r0 += kBlock) {
        for (std::size_t c0 = 0; c0 < plane.cols(); c0 += kBlock) {
            for (std::size_t k = 1; k < 64; ++k) {
                visit(r0 + kZigZag[k] / kBlock, c0 + kZigZag[k] % kBlock);
            }
        }
    }
}

inline std::size_t count_nonzero_ac(const MagnitudePlane& mags) {
    std::size_t n = 0;
    for_each_ac_canonical(mags, [&](std::size_t r, std::size_t c) { n += mags(r, c) != 0.0; });
    return n;
}

/// XOR of true and retrieved signs under +1 -> 0, -1 -> 1.
inline ResidualPlane compute_residual(const SignPlane& truth, const SignPlane& retrieved) {
    require_same_shape(truth, retrieved, "compute_residual");
    require_block_multiple(truth, "compute_residual");
    ResidualPlane e;
    for_each_ac_canonical(truth, [&](std::size_t r, std::size_t c) {
        const auto t = truth(r, c);
        const auto s = retrieved(r, c);
        if ((t == 0) != (s == 0)) {
            throw ProtocolError("compute_residual: zero patterns differ at (" + std::to_string(r) + ", " +
                                std::to_string(c) + ")");
        }
        if (t != 0) e.bits.push_back(t != s ? 1 : 0);
    });
    return e;
}

inline SignPlane apply_residual(const SignPlane& retrieved, const ResidualPlane& e) {
    require_block_multiple(retrieved, "apply_residual");
    std::size_t needed = 0;
    for_each_ac_canonical(retrieved, [&](std::size_t r, std::size_t c) { needed += retrieved(r, c) != 0; });
    if (needed != e.size()) {
        throw ProtocolError("apply_residual: " + std::to_string(e.size()) + " residual bits for " +
                            std::to_string(needed) + " nonzero AC coefficients");
    }
    SignPlane out = retrieved;
    std::size_t i = 0;
    for_each_ac_canonical(out, [&](std::size_t r, std::size_t c) {
        if (out(r, c) == 0) return;
        if (e.bits[i++] != 0) out(r, c) = static_cast<std::int8_t>(-out(r, c));
    });
    return out;
}

// ---------------------------------------------------------------------------
// Quantization levels and their lossless payload

struct LevelTag {};
/// Integer quantization indices in block-in-place layout.
using LevelPlane = Plane<std::int32_t, LevelTag>;

inline LevelPlane quantize_levels(const CoefficientGrid& c, const QuantizerSpec& q) {
    LevelPlane lv(c.rows(), c.cols());
    for (std::size_t r = 0; r < c.rows(); ++r)
        for (std::size_t k = 0; k < c.cols(); ++k) lv(r, k) = quantize_level(c(r, k), q.step(r % kBlock, k % kBlock));
    return lv;
}

/// level * step, i.e. the reconstruction grid (y~ when signs are the true ones).
inline CoefficientGrid dequantize_levels(const LevelPlane& lv, const QuantizerSpec& q) {
    CoefficientGrid c(lv.rows(), lv.cols());
    for (std::size_t r = 0; r < lv.rows(); ++r)
        for (std::size_t k = 0; k < lv.cols(); ++k)
            c(r, k) = static_cast<double>(lv(r, k)) * q.step(r % kBlock, k % kBlock);
    return c;
}

/// Per block, raster order: se(DC - previous DC), ue(#nonzero AC), then for
/// every nonzero AC in zig-zag order ue(zero run before it), ue(|level| - 1).
/// AC signs are not written.
inline std::vector<std::uint8_t> encode_magnitude_payload(const LevelPlane& lv) {
    require_block_multiple(lv, "encode_magnitude_payload");
    BitWriter w;
    std::int64_t prev_dc = 0;
    for (std::size_t r0 = 0; r0 < lv.rows(); r0 += kBlock) {
        for (std::size_t c0 = 0; c0 < lv.cols(); c0 += kBlock) {
            const std::int64_t dc = lv(r0, c0);
            w.put_se(dc - prev_dc);
            prev_dc = dc;
            std::uint64_t nonzero = 0;
            for (std::size_t k = 1; k < 64; ++k) nonzero += lv(r0 + kZigZag[k] / kBlock, c0 + kZigZag[k] % kBlock) != 0;
            w.put_ue(nonzero);
            std::uint64_t run = 0;
            for (std::size_t k = 1; k < 64; ++k) {
                const std::int64_t v = lv(r0 + kZigZag[k] / kBlock, c0 + kZigZag[k] % kBlock);
                if (v == 0) {
                    ++run;
                    continue;
                }
                w.put_ue(run);
                w.put_ue(static_cast<std::uint64_t>(v < 0 ? -v : v) - 1);
                run = 0;
            }
        }
    }
    return w.finish();
}

/// Inverse of encode_magnitude_payload; AC levels come back non-negative.
inline LevelPlane decode_magnitude_payload(std::span<const std::uint8_t> bytes, std::size_t rows, std::size_t cols) {
    LevelPlane lv(rows, cols);
    BitReader in(bytes);
    std::int64_t prev_dc = 0;
    constexpr std::int64_t kLevelLimit = std::int64_t{1} << 30;
    for (std::size_t r0 = 0; r0 < rows; r0 += kBlock) {
        for (std::size_t c0 = 0; c0 < cols; c0 += kBlock) {
            const std::int64_t dc = prev_dc + in.get_se();
            if (dc > kLevelLimit || dc < -kLevelLimit) throw ProtocolError("magnitude payload: DC level out of range");
            lv(r0, c0) = static_cast<std::int32_t>(dc);
            prev_dc = dc;
            const std::uint64_t nonzero = in.get_ue();
            if (nonzero > 63) throw ProtocolError("magnitude payload: more than 63 AC coefficients in a block");
            std::size_t k = 1;
            for (std::uint64_t n = 0; n < nonzero; ++n) {
                const std::uint64_t run = in.get_ue();
                if (run > 63 || k + run > 63) throw ProtocolError("magnitude payload: zero run leaves the block");
                k += run;
                const std::uint64_t level = in.get_ue() + 1;
                if (level > static_cast<std::uint64_t>(kLevelLimit)) throw ProtocolError("magnitude payload: AC level out of range");
                lv(r0 + kZigZag[k] / kBlock, c0 + kZigZag[k] % kBlock) = static_cast<std::int32_t>(level);
                ++k;
            }
        }
    }
    if (!in.at_padding()) throw ProtocolError("magnitude payload: trailing data");
    return lv;
}

// ---------------------------------------------------------------------------
// Bitstream container

inline constexpr std::array<char, 4> kMagic = {'S', 'R', 'C', '1'};
inline constexpr std::uint8_t kFormatVersion = 1;

struct BitstreamHeader {
    std::uint8_t version = kFormatVersion;
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    std::uint8_t quality = 50;
    std::uint8_t gamma = 1;
    std::uint16_t theta = 200;
    double lambda = 1.0;
    double mu = 10.0;
    std::uint8_t levels = 3;
    std::uint64_t seed = 0;

    SolverConfig solver_config() const {
        SolverConfig cfg;
        cfg.lambda = lambda;
        cfg.mu = mu;
        cfg.theta_max = theta;
        cfg.gamma_max = gamma;
        cfg.levels = levels;
        cfg.seed = seed;
        return cfg;
    }

    bool operator==(const BitstreamHeader& o) const {
        // bitwise comparison keeps NaN payloads and signed zeros distinct
        return version == o.version && width == o.width && height == o.height && quality == o.quality &&
               gamma == o.gamma && theta == o.theta &&
               std::bit_cast<std::uint64_t>(lambda) == std::bit_cast<std::uint64_t>(o.lambda) &&
               std::bit_cast<std::uint64_t>(mu) == std::bit_cast<std::uint64_t>(o.mu) && levels == o.levels &&
               seed == o.seed;
    }
};

struct Bitstream {
    BitstreamHeader header;
    std::vector<std::uint8_t> magnitude_payload;
    std::uint64_t residual_bit_count = 0;
    std::vector<std::uint8_t> residual_payload;

    bool operator==(const Bitstream&) const = default;
};

namespace detail {

class LeWriter {
public:
    void u8(std::uint8_t v) { out_.push_back(v); }
    void u16(std::uint16_t v) { le(v, 2); }
    void u32(std::uint32_t v) { le(v, 4); }
    void u64(std::uint64_t v) { le(v, 8); }
    void f64(double v) { le(std::bit_cast<std::uint64_t>(v), 8); }
    void bytes(std::span<const std::uint8_t> b) { out_.insert(out_.end(), b.begin(), b.end()); }
    std::vector<std::uint8_t> take() { return std::move(out_); }

private:
    void le(std::uint64_t v, int n) {
        for (int i = 0; i < n; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    std::vector<std::uint8_t> out_;
};

class LeReader {
public:
    explicit LeReader(std::span<const std::uint8_t> b) : b_(b) {}
    std::uint8_t u8() { return static_cast<std::uint8_t>(le(1, "u8")); }
    std::uint16_t u16() { return static_cast<std::uint16_t>(le(2, "u16")); }
    std::uint32_t u32() { return static_cast<std::uint32_t>(le(4, "u32")); }
    std::uint64_t u64() { return le(8, "u64"); }
    double f64() { return std::bit_cast<double>(le(8, "f64")); }
    std::vector<std::uint8_t> bytes(std::uint64_t n, const char* what) {
        if (n > b_.size() - pos_) {
            throw FormatError(std::string("bitstream truncated in ") + what + ": need " + std::to_string(n) +
                              " bytes, " + std::to_string(b_.size() - pos_) + " left");
        }
        std::vector<std::uint8_t> out(b_.begin() + static_cast<std::ptrdiff_t>(pos_),
                                      b_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
        pos_ += n;
        return out;
    }
    std::size_t remaining() const noexcept { return b_.size() - pos_; }

private:
    std::uint64_t le(int n, const char* what) {
        if (b_.size() - pos_ < static_cast<std::size_t>(n)) {
            throw FormatError(std::string("bitstream truncated reading ") + what + " at byte " + std::to_string(pos_));
        }
        std::uint64_t v = 0;
        for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(b_[pos_ + i]) << (8 * i);
        pos_ += n;
        return v;
    }
    std::span<const std::uint8_t> b_;
    std::size_t pos_ = 0;
};

}  // namespace detail

/// Layout (little-endian): "SRC1" | version u8 | width u32 | height u32 |
/// quality u8 | gamma u8 | theta u16 | lambda f64 | mu f64 | levels u8 |
/// seed u64 | magnitude length u64 + bytes | residual bit count u64 |
/// residual length u64 + bytes.
inline std::vector<std::uint8_t> compose(const Bitstream& s) {
    detail::LeWriter w;
    for (char c : kMagic) w.u8(static_cast<std::uint8_t>(c));
    const auto& h = s.header;
    w.u8(h.version);
    w.u32(h.width);
    w.u32(h.height);
    w.u8(h.quality);
    w.u8(h.gamma);
    w.u16(h.theta);
    w.f64(h.lambda);
    w.f64(h.mu);
    w.u8(h.levels);
    w.u64(h.seed);
    w.u64(s.magnitude_payload.size());
    w.bytes(s.magnitude_payload);
    w.u64(s.residual_bit_count);
    w.u64(s.residual_payload.size());
    w.bytes(s.residual_payload);
    return w.take();
}

inline Bitstream parse(std::span<const std::uint8_t> bytes) {
    detail::LeReader r(bytes);
    for (char c : kMagic) {
        if (r.remaining() == 0 || r.u8() != static_cast<std::uint8_t>(c)) throw FormatError("bad magic, expected \"SRC1\"");
    }
    Bitstream s;
    auto& h = s.header;
    h.version = r.u8();
    if (h.version != kFormatVersion) {
        throw FormatError("unsupported bitstream version " + std::to_string(h.version) + " (this build reads version " +
                          std::to_string(kFormatVersion) + ")");
    }
    h.width = r.u32();
    h.height = r.u32();
    h.quality = r.u8();
    h.gamma = r.u8();
    h.theta = r.u16();
    h.lambda = r.f64();
    h.mu = r.f64();
    h.levels = r.u8();
    h.seed = r.u64();
    s.magnitude_payload = r.bytes(r.u64(), "magnitude payload");
    s.residual_bit_count = r.u64();
    s.residual_payload = r.bytes(r.u64(), "residual payload");
    if (r.remaining() != 0) throw FormatError("bitstream has " + std::to_string(r.remaining()) + " trailing bytes");
    return s;
}

// ---------------------------------------------------------------------------
// Encoder / decoder

/// Encoder-side diagnostics; none of this is written to the stream.
struct EncodeReport {
    CoefficientGrid baseline;             ///< y~, the quantize-dequantize grid
    SignPlane true_signs;
    SignPlane retrieved_signs;            ///< after the last cascade
    std::vector<SignPlane> cascade_signs; ///< retrieved signs after cascade 1..gamma
    std::vector<double> cascade_alpha;    ///< alpha of each cascade's anchor, AC part
    ResidualPlane residual;
    std::size_t sign_count = 0;
};

struct EncodeResult {
    Bitstream stream;
    EncodeReport report;
};

struct DecodeResult {
    BitstreamHeader header;
    CoefficientGrid coefficients;  ///< reassembled signed coefficients
    SignPlane retrieved_signs;     ///< solver output before residual correction
    PixelGrid reconstruction;      ///< inverse DCT, real-valued, unclamped
    PixelGrid display;             ///< rounded and clamped to [0, 255]
};

/// Removes every block's DC term, leaving the part of an image the anchor
/// actually steers.
inline PixelGrid ac_component(const PixelGrid& g) {
    CoefficientGrid c = dct2_forward(g);
    for (std::size_t r = 0; r < c.rows(); r += kBlock)
        for (std::size_t k = 0; k < c.cols(); k += kBlock) c(r, k) = 0.0;
    return dct2_inverse(c);
}

/// Alpha of an anchor against a reference image, measured on AC parts only
/// (DC is pinned and identical for every feasible iterate).
inline double anchor_alpha(const PixelGrid& reference_ac, const PixelGrid& phi) {
    const PixelGrid phi_ac = ac_component(phi);
    double nx = 0.0, np = 0.0;
    for (double v : reference_ac.values()) nx += v * v;
    for (double v : phi_ac.values()) np += v * v;
    if (nx == 0.0 || np == 0.0) return 0.0;
    return alpha_constant(reference_ac, phi_ac);
}

inline void validate_header_ranges(const SolverConfig& cfg, int quality) {
    cfg.validate();
    if (quality < 1 || quality > 100) throw DomainError("quality must be in [1, 100]");
    if (cfg.gamma_max > 255) throw DomainError("gamma does not fit the header (max 255)");
    if (cfg.theta_max > 65535) throw DomainError("theta does not fit the header (max 65535)");
    if (cfg.levels > 255) throw DomainError("levels does not fit the header");
}

inline EncodeResult encode(const PixelGrid& image, int quality, const SolverConfig& cfg) {
    require_block_multiple(image, "encode");
    validate_header_ranges(cfg, quality);
    if (image.rows() > 0xFFFFFFFFULL || image.cols() > 0xFFFFFFFFULL) throw DomainError("image too large");

    const QuantizerSpec q = build_quantizer(quality);
    const LevelPlane levels = quantize_levels(dct2_forward(image), q);

    EncodeResult result;
    auto& rep = result.report;
    rep.baseline = dequantize_levels(levels, q);
    rep.true_signs = signs_of(rep.baseline);
    const MagnitudePlane mags = magnitudes_of(rep.baseline);
    const DcPlane dc = dc_of(rep.baseline);
    rep.sign_count = count_nonzero_ac(mags);

    const PixelGrid baseline_ac = ac_component(dct2_inverse(rep.baseline));
    FienupSolver solver(image.rows(), image.cols(), cfg);
    const PixelGrid z = solver.solve(mags, dc, [&](int, const PixelGrid& phi, const PixelGrid& zc) {
        rep.cascade_alpha.push_back(anchor_alpha(baseline_ac, phi));
        rep.cascade_signs.push_back(extract_signs(zc, mags));
    });
    rep.retrieved_signs = rep.cascade_signs.back();
    rep.residual = compute_residual(rep.true_signs, rep.retrieved_signs);

    auto& s = result.stream;
    s.header.width = static_cast<std::uint32_t>(image.cols());
    s.header.height = static_cast<std::uint32_t>(image.rows());
    s.header.quality = static_cast<std::uint8_t>(quality);
    s.header.gamma = static_cast<std::uint8_t>(cfg.gamma_max);
    s.header.theta = static_cast<std::uint16_t>(cfg.theta_max);
    s.header.lambda = cfg.lambda;
    s.header.mu = cfg.mu;
    s.header.levels = static_cast<std::uint8_t>(cfg.levels);
    s.header.seed = cfg.seed;
    s.magnitude_payload = encode_magnitude_payload(levels);
    s.residual_bit_count = rep.residual.size();
    s.residual_payload = arith_encode_bits(rep.residual.bits);
    return result;
}

inline DecodeResult decode(const Bitstream& s) {
    const auto& h = s.header;
    if (h.version != kFormatVersion) {
        throw FormatError("unsupported bitstream version " + std::to_string(h.version) + " (this build reads version " +
                          std::to_string(kFormatVersion) + ")");
    }
    if (h.width == 0 || h.height == 0 || h.width % kBlock != 0 || h.height % kBlock != 0) {
        throw ProtocolError("header dimensions " + std::to_string(h.width) + "x" + std::to_string(h.height) +
                            " are not positive multiples of 8");
    }
    if (h.quality < 1 || h.quality > 100) throw ProtocolError("header quality out of range");
    const SolverConfig cfg = h.solver_config();
    try {
        cfg.validate();
    } catch (const DomainError& e) {
        throw ProtocolError(std::string("header solver parameters invalid: ") + e.what());
    }
    if (cfg.levels > max_frame_levels(h.height, h.width)) throw ProtocolError("header levels too deep for image");

    const QuantizerSpec q = build_quantizer(h.quality);
    const LevelPlane levels = decode_magnitude_payload(s.magnitude_payload, h.height, h.width);
    const CoefficientGrid unsigned_grid = dequantize_levels(levels, q);
    const MagnitudePlane mags = magnitudes_of(unsigned_grid);
    const DcPlane dc = dc_of(unsigned_grid);

    const std::size_t expected = count_nonzero_ac(mags);
    if (s.residual_bit_count != expected) {
        throw ProtocolError("residual bit count " + std::to_string(s.residual_bit_count) + " does not match " +
                            std::to_string(expected) + " nonzero AC magnitudes");
    }

    DecodeResult out;
    out.header = h;
    const PixelGrid z = fienup_solve(mags, dc, cfg);
    out.retrieved_signs = extract_signs(z, mags);
    ResidualPlane e;
    e.bits = arith_decode_bits(s.residual_payload, expected);
    const SignPlane signs = apply_residual(out.retrieved_signs, e);

    out.coefficients = CoefficientGrid(h.height, h.width);
    for (std::size_t i = 0; i < out.coefficients.size(); ++i) out.coefficients[i] = signs[i] * mags[i];
    for (std::size_t b1 = 0; b1 < dc.rows(); ++b1)
        for (std::size_t b2 = 0; b2 < dc.cols(); ++b2) out.coefficients(b1 * kBlock, b2 * kBlock) = dc(b1, b2);
    out.reconstruction = dct2_inverse(out.coefficients);
    out.display = out.reconstruction;
    for (double& v : out.display.values()) v = to_display_sample(v);
    return out;
}

inline DecodeResult decode(std::span<const std::uint8_t> bytes) { return decode(parse(bytes)); }

}  // namespace signret
