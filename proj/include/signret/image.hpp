#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <vector>

#include "signret/errors.hpp"
#include "signret/grid.hpp"

namespace signret {

namespace detail {

class PgmHeaderReader {
public:
    explicit PgmHeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::size_t pos() const noexcept { return pos_; }

    void expect_magic() {
        if (bytes_.size() < 2) throw ParseError("PGM: file too short for magic number", pos_);
        if (bytes_[0] != 'P' || bytes_[1] != '5') throw ParseError("PGM: magic is not P5", 0);
        pos_ = 2;
    }

    unsigned long read_uint(const char* field) {
        skip_space_and_comments();
        if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) {
            throw ParseError(std::string("PGM: expected ") + field, pos_);
        }
        unsigned long v = 0;
        while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
            v = v * 10 + (bytes_[pos_] - '0');
            if (v > 1'000'000'000UL) throw ParseError(std::string("PGM: ") + field + " too large", pos_);
            ++pos_;
        }
        return v;
    }

    // Exactly one whitespace byte separates maxval from the raster.
    void expect_single_space() {
        if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
            throw ParseError("PGM: expected whitespace before raster", pos_);
        }
        ++pos_;
    }

private:
    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            if (std::isspace(bytes_[pos_])) {
                ++pos_;
            } else if (bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
    }

    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses a binary 8-bit PGM and crops it (top-left anchored) down to the
/// nearest multiple of 8 in each dimension.
inline PixelGrid parse_pgm(std::span<const std::uint8_t> bytes) {
    detail::PgmHeaderReader in(bytes);
    in.expect_magic();
    const auto width = in.read_uint("width");
    const auto height = in.read_uint("height");
    const auto maxval = in.read_uint("maxval");
    if (width == 0 || height == 0) throw ParseError("PGM: zero dimension", in.pos());
    if (maxval == 0) throw ParseError("PGM: maxval must be positive", in.pos());
    if (maxval > 255) {
        throw UnsupportedDepthError("PGM: maxval " + std::to_string(maxval) +
                                    " needs 16-bit samples; only 8-bit PGM is supported");
    }
    in.expect_single_space();

    const std::size_t need = static_cast<std::size_t>(width) * height;
    if (bytes.size() - in.pos() < need) {
        throw ParseError("PGM: raster truncated, expected " + std::to_string(need) + " bytes",
                         bytes.size());
    }

    const std::size_t rows = height / kBlock * kBlock;
    const std::size_t cols = width / kBlock * kBlock;
    if (rows == 0 || cols == 0) {
        throw ShapeError("PGM: image " + std::to_string(width) + "x" + std::to_string(height) +
                         " is smaller than one 8x8 block");
    }

    PixelGrid g(rows, cols);
    const std::uint8_t* raster = bytes.data() + in.pos();
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) g(r, c) = raster[r * width + c];
    }
    return g;
}

inline std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open '" + path.string() + "'");
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

inline void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write '" + path.string() + "'");
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw Error("write failed for '" + path.string() + "'");
}

inline PixelGrid load_image(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw Error("no such file '" + path.string() + "'");
    const auto bytes = read_file_bytes(path);
    try {
        return parse_pgm(bytes);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.detail(), e.offset());
    }
}

/// Rounds to nearest and clamps to [0, 255].
inline std::uint8_t to_display_sample(double v) {
    return static_cast<std::uint8_t>(std::clamp(std::round(v), 0.0, 255.0));
}

/// "P5\n<w> <h>\n255\n" followed by the raw raster.
inline std::vector<std::uint8_t> format_pgm(const PixelGrid& g) {
    const std::string header =
        "P5\n" + std::to_string(g.cols()) + " " + std::to_string(g.rows()) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.reserve(out.size() + g.size());
    for (double v : g.values()) out.push_back(to_display_sample(v));
    return out;
}

inline void save_image(const std::filesystem::path& path, const PixelGrid& g) {
    write_file_bytes(path, format_pgm(g));
}

/// Non-owning 8x8 window into a PixelGrid. The grid must outlive the view.
class BlockView {
public:
    BlockView(const PixelGrid& grid, std::size_t b1, std::size_t b2)
        : grid_(&grid), b1_(b1), b2_(b2) {}

    std::size_t b1() const noexcept { return b1_; }
    std::size_t b2() const noexcept { return b2_; }

    double operator()(std::size_t i1, std::size_t i2) const {
        return (*grid_)(b1_ * kBlock + i1, b2_ * kBlock + i2);
    }

private:
    const PixelGrid* grid_;
    std::size_t b1_;
    std::size_t b2_;
};

/// Blocks in raster order: (0,0), (0,1), ..., (1,0), ...
inline std::vector<BlockView> split_blocks(const PixelGrid& g) {
    require_block_multiple(g, "split_blocks");
    const std::size_t nb1 = g.rows() / kBlock;
    const std::size_t nb2 = g.cols() / kBlock;
    std::vector<BlockView> blocks;
    blocks.reserve(nb1 * nb2);
    for (std::size_t b1 = 0; b1 < nb1; ++b1) {
        for (std::size_t b2 = 0; b2 < nb2; ++b2) blocks.emplace_back(g, b1, b2);
    }
    return blocks;
}

inline PixelGrid merge_blocks(std::span<const BlockView> blocks, std::size_t rows, std::size_t cols) {
    if (rows == 0 || cols == 0 || rows % kBlock != 0 || cols % kBlock != 0) {
        throw ShapeError("merge_blocks: target shape is not a multiple of 8");
    }
    const std::size_t nb2 = cols / kBlock;
    const std::size_t expected = rows / kBlock * nb2;
    if (blocks.size() != expected) {
        throw ShapeError("merge_blocks: got " + std::to_string(blocks.size()) + " blocks, shape " +
                         std::to_string(rows) + "x" + std::to_string(cols) + " needs " +
                         std::to_string(expected));
    }
    PixelGrid g(rows, cols);
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        const std::size_t b1 = k / nb2;
        const std::size_t b2 = k % nb2;
        for (std::size_t i1 = 0; i1 < kBlock; ++i1) {
            for (std::size_t i2 = 0; i2 < kBlock; ++i2) {
                g(b1 * kBlock + i1, b2 * kBlock + i2) = blocks[k](i1, i2);
            }
        }
    }
    return g;
}

}  // namespace signret
