#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace metacombine {

// Two grid distributions whose steps or origins cannot be combined.
class IncompatibleGridError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Convolving an atom at +inf with an atom at -inf is undefined.
class InvalidConvolutionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// FFT roundoff exceeded the documented clamping budget.
class NumericDegradationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The grid cannot resolve the requested quantile; suggested_n() hints at a
// grid size that should.
class ResolutionError : public std::runtime_error {
public:
    ResolutionError(const std::string& what, std::size_t suggested_n)
        : std::runtime_error(what), suggested_n_(suggested_n) {}
    std::size_t suggested_n() const noexcept { return suggested_n_; }

private:
    std::size_t suggested_n_;
};

}  // namespace metacombine
