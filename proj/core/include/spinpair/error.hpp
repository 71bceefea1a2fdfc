#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace spinpair {

/// Bad user input: malformed files, unknown labels, out-of-range options.
/// The CLI maps this family to exit code 2.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Text-format error carrying the 1-based line where parsing stopped.
class ParseError : public InputError {
public:
    ParseError(std::size_t line, const std::string& what)
        : InputError("line " + std::to_string(line) + ": " + what), line_(line) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Numerical or capacity failure. The CLI maps this family to exit code 3.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Two positions that must differ coincide (r = 0 in a 1/r^3 coupling).
class DegenerateGeometry : public NumericError {
public:
    using NumericError::NumericError;
};

/// Problem too large for the exact propagator.
class CapacityError : public NumericError {
public:
    using NumericError::NumericError;
};

/// Coherence curve never reached the threshold needed for a T2 estimate.
class InsufficientDecay : public NumericError {
public:
    InsufficientDecay(double min_value, double threshold)
        : NumericError("insufficient decay: curve minimum " + std::to_string(min_value) +
                       " never drops below " + std::to_string(threshold)),
          min_value_(min_value) {}

    [[nodiscard]] double min_value() const noexcept { return min_value_; }

private:
    double min_value_;
};

}  // namespace spinpair
