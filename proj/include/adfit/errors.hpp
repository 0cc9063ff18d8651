#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace adfit {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed model or program construction: arity mismatch, shape mismatch,
/// out-of-range ids, invalid specs.
class InvalidModelError : public Error {
public:
    using Error::Error;
};

/// Numerical-domain violation (log of a non-positive value, division by
/// zero, non-finite objective). `index()` identifies the offending node,
/// statement, parameter or bin, depending on context.
class NumericalDomainError : public Error {
public:
    NumericalDomainError(const std::string& what, std::size_t index)
        : Error(what), index_(index) {}

    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

/// Line search exhausted its backtracking budget without satisfying the
/// sufficient-decrease condition.
class LineSearchError : public Error {
public:
    using Error::Error;
};

} // namespace adfit
