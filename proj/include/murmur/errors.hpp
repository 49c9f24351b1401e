#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace murmur {

/// Argument outside the mathematical domain of an operation (n = 0, D = 2 mod 4, poles, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A request that would exceed a configured memory budget, overflow 64-bit
/// arithmetic, or needs a table larger than the one supplied.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Quadrature or series that failed to converge. Carries the last two
/// estimates so callers can report how far apart they were.
class NumericError : public std::runtime_error {
public:
    NumericError(const std::string& what, double previous, double last)
        : std::runtime_error(what + " (last estimates " + std::to_string(previous) + ", " +
                             std::to_string(last) + ")"),
          message_(what),
          previous_(previous),
          last_(last) {}

    /// The message without the appended estimates.
    const std::string& message() const noexcept { return message_; }

    double previous() const noexcept { return previous_; }
    double last() const noexcept { return last_; }

private:
    std::string message_;
    double previous_;
    double last_;
};

/// Malformed external data. `index` is the 0-based record (or line) that failed.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t index, const std::string& unit = "record")
        : std::runtime_error(what + " (" + unit + " " + std::to_string(index) + ")"), index_(index) {}

    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

}  // namespace murmur
