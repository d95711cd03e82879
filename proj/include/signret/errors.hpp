#pragma once

#include <stdexcept>
#include <string>

namespace signret {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file; carries the byte offset where parsing stopped.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : Error(what + " (at byte offset " + std::to_string(offset) + ")"), detail_(what), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }
    /// Message without the offset suffix.
    const std::string& detail() const noexcept { return detail_; }

private:
    std::string detail_;
    std::size_t offset_;
};

class UnsupportedDepthError : public Error {
public:
    using Error::Error;
};

class ShapeError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

/// Bitstream payloads disagree with each other (counts, zero patterns).
class ProtocolError : public Error {
public:
    using Error::Error;
};

/// Bad magic or version in a stream header.
class FormatError : public Error {
public:
    using Error::Error;
};

/// Arithmetic or Exp-Golomb payload ended before the expected symbols.
class DecodeError : public Error {
public:
    using Error::Error;
};

}  // namespace signret
