#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "signret/errors.hpp"

namespace signret {

/// MSB-first bit packer.
class BitWriter {
public:
    void put(bool bit) {
        acc_ = static_cast<std::uint8_t>((acc_ << 1) | (bit ? 1 : 0));
        if (++fill_ == 8) {
            bytes_.push_back(acc_);
            acc_ = 0;
            fill_ = 0;
        }
        ++count_;
    }

    void put_bits(std::uint64_t value, int n) {
        for (int i = n - 1; i >= 0; --i) put(((value >> i) & 1U) != 0);
    }

    /// Unsigned Exp-Golomb (order 0).
    void put_ue(std::uint64_t v) {
        const std::uint64_t x = v + 1;
        int len = 0;
        while ((x >> len) > 1) ++len;
        for (int i = 0; i < len; ++i) put(false);
        put_bits(x, len + 1);
    }

    /// Signed Exp-Golomb: 0, 1, -1, 2, -2, ...
    void put_se(std::int64_t v) {
        put_ue(v > 0 ? 2 * static_cast<std::uint64_t>(v) - 1 : 2 * static_cast<std::uint64_t>(-v));
    }

    std::uint64_t bit_count() const noexcept { return count_; }

    /// Pads the last byte with zeros.
    std::vector<std::uint8_t> finish() {
        if (fill_ > 0) {
            bytes_.push_back(static_cast<std::uint8_t>(acc_ << (8 - fill_)));
            acc_ = 0;
            fill_ = 0;
        }
        return std::move(bytes_);
    }

private:
    std::vector<std::uint8_t> bytes_;
    std::uint8_t acc_ = 0;
    int fill_ = 0;
    std::uint64_t count_ = 0;
};

class BitReader {
public:
    explicit BitReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    bool get() {
        if (pos_ >= bytes_.size() * 8) throw DecodeError("bit reader: payload exhausted");
        const bool bit = ((bytes_[pos_ / 8] >> (7 - pos_ % 8)) & 1U) != 0;
        ++pos_;
        return bit;
    }

    std::uint64_t get_bits(int n) {
        std::uint64_t v = 0;
        for (int i = 0; i < n; ++i) v = (v << 1) | (get() ? 1U : 0U);
        return v;
    }

    std::uint64_t get_ue() {
        int zeros = 0;
        while (!get()) {
            if (++zeros > 62) throw DecodeError("Exp-Golomb prefix too long");
        }
        const std::uint64_t rest = get_bits(zeros);
        return ((std::uint64_t{1} << zeros) | rest) - 1;
    }

    std::int64_t get_se() {
        const std::uint64_t k = get_ue();
        return (k & 1U) != 0 ? static_cast<std::int64_t>((k + 1) / 2) : -static_cast<std::int64_t>(k / 2);
    }

    std::uint64_t position() const noexcept { return pos_; }
    std::uint64_t size_bits() const noexcept { return bytes_.size() * 8; }

    /// True when only zero padding (< 8 bits) remains.
    bool at_padding() const {
        if (size_bits() - pos_ >= 8) return false;
        for (std::uint64_t p = pos_; p < size_bits(); ++p) {
            if ((bytes_[p / 8] >> (7 - p % 8)) & 1U) return false;
        }
        return true;
    }

private:
    std::span<const std::uint8_t> bytes_;
    std::uint64_t pos_ = 0;
};

}  // namespace signret
