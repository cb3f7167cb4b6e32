#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cmech {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed potential text. `position()` is the byte offset of the offending token.
class SyntaxError : public Error {
public:
    SyntaxError(const std::string& what, std::size_t position)
        : Error(what + " (at position " + std::to_string(position) + ")"), position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

/// A construct that is not an entire function of z (branch cuts, poles).
class UnsupportedFunction : public Error {
public:
    UnsupportedFunction(const std::string& what, std::size_t position)
        : Error(what + " (at position " + std::to_string(position) +
                "); only entire potentials are supported, functions with branch cuts or poles "
                "need special care along the trajectory and are rejected"),
          position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

class OverflowError : public Error {
public:
    using Error::Error;
};

class NotFound : public Error {
public:
    using Error::Error;
};

/// Raised when |alpha|^2 - a*b = 1, where the structure matrix is singular.
class DegenerateStructure : public Error {
public:
    using Error::Error;
};

class DivisionByZero : public Error {
public:
    using Error::Error;
};

class GridMismatch : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace cmech
