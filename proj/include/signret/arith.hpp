#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "signret/bitio.hpp"
#include "signret/errors.hpp"

namespace signret {

/// Single adaptive context: counts start at (1, 1) and the coded symbol's
/// count is incremented after every bit (Laplace estimator).
class AdaptiveBitModel {
public:
    std::uint64_t zeros() const noexcept { return c0_; }
    std::uint64_t total() const noexcept { return c0_ + c1_; }

    void update(bool bit) {
        (bit ? c1_ : c0_) += 1;
        if (total() > kMaxTotal) {
            c0_ = (c0_ + 1) / 2;
            c1_ = (c1_ + 1) / 2;
        }
    }

private:
    // Keeps total well below the 2^30 lower bound of the coder range.
    static constexpr std::uint64_t kMaxTotal = std::uint64_t{1} << 28;
    std::uint64_t c0_ = 1;
    std::uint64_t c1_ = 1;
};

namespace detail {
inline constexpr std::uint64_t kTop = 0xFFFFFFFFULL;
inline constexpr std::uint64_t kHalf = 0x80000000ULL;
inline constexpr std::uint64_t kQuarter = 0x40000000ULL;
inline constexpr std::uint64_t kThreeQuarters = 0xC0000000ULL;
}  // namespace detail

/// 32-bit integer arithmetic coder (carry-less, with pending-bit handling).
/// finish() writes all 32 bits of `low`, so a decoder never reads past the
/// payload; any truncation surfaces as DecodeError.
class BinaryArithmeticEncoder {
public:
    void encode(bool bit) {
        const std::uint64_t range = high_ - low_ + 1;
        const std::uint64_t split = low_ + range * model_.zeros() / model_.total() - 1;
        if (bit) {
            low_ = split + 1;
        } else {
            high_ = split;
        }
        model_.update(bit);
        for (;;) {
            if (high_ < detail::kHalf) {
                emit(false);
            } else if (low_ >= detail::kHalf) {
                emit(true);
                low_ -= detail::kHalf;
                high_ -= detail::kHalf;
            } else if (low_ >= detail::kQuarter && high_ < detail::kThreeQuarters) {
                ++pending_;
                low_ -= detail::kQuarter;
                high_ -= detail::kQuarter;
            } else {
                break;
            }
            low_ = 2 * low_;
            high_ = 2 * high_ + 1;
        }
        ++symbols_;
    }

    std::vector<std::uint8_t> finish() {
        if (symbols_ == 0) return {};
        emit(((low_ >> 31) & 1U) != 0);
        out_.put_bits(low_, 31);
        return out_.finish();
    }

private:
    void emit(bool bit) {
        out_.put(bit);
        for (; pending_ > 0; --pending_) out_.put(!bit);
    }

    AdaptiveBitModel model_;
    BitWriter out_;
    std::uint64_t low_ = 0;
    std::uint64_t high_ = detail::kTop;
    std::uint64_t pending_ = 0;
    std::uint64_t symbols_ = 0;
};

class BinaryArithmeticDecoder {
public:
    explicit BinaryArithmeticDecoder(std::span<const std::uint8_t> bytes) : in_(bytes) {
        value_ = in_.get_bits(32);
    }

    bool decode() {
        const std::uint64_t range = high_ - low_ + 1;
        const std::uint64_t split = low_ + range * model_.zeros() / model_.total() - 1;
        const bool bit = value_ > split;
        if (bit) {
            low_ = split + 1;
        } else {
            high_ = split;
        }
        model_.update(bit);
        for (;;) {
            if (high_ < detail::kHalf) {
                // nothing to subtract
            } else if (low_ >= detail::kHalf) {
                low_ -= detail::kHalf;
                high_ -= detail::kHalf;
                value_ -= detail::kHalf;
            } else if (low_ >= detail::kQuarter && high_ < detail::kThreeQuarters) {
                low_ -= detail::kQuarter;
                high_ -= detail::kQuarter;
                value_ -= detail::kQuarter;
            } else {
                break;
            }
            low_ = 2 * low_;
            high_ = 2 * high_ + 1;
            value_ = 2 * value_ + (in_.get() ? 1 : 0);
        }
        return bit;
    }

    /// Only byte padding may remain once every symbol is decoded.
    void expect_end() const {
        if (!in_.at_padding()) throw DecodeError("arithmetic payload has trailing data");
    }

private:
    AdaptiveBitModel model_;
    BitReader in_;
    std::uint64_t low_ = 0;
    std::uint64_t high_ = detail::kTop;
    std::uint64_t value_ = 0;
};

inline std::vector<std::uint8_t> arith_encode_bits(std::span<const std::uint8_t> bits) {
    BinaryArithmeticEncoder enc;
    for (std::uint8_t b : bits) enc.encode(b != 0);
    return enc.finish();
}

inline std::vector<std::uint8_t> arith_decode_bits(std::span<const std::uint8_t> bytes, std::size_t count) {
    if (count == 0) {
        if (!bytes.empty()) throw DecodeError("arithmetic payload present for zero symbols");
        return {};
    }
    BinaryArithmeticDecoder dec(bytes);
    std::vector<std::uint8_t> bits(count);
    for (auto& b : bits) b = dec.decode() ? 1 : 0;
    dec.expect_end();
    return bits;
}

}  // namespace signret
