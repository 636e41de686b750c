#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace zblow {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Field samples contain NaN or Inf.
class InvalidField : public Error {
public:
    using Error::Error;
};

/// Evaluation requested outside the domain where a quantity exists.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Quadrature results disagree with their closed forms beyond tolerance.
class QuadratureError : public Error {
public:
    using Error::Error;
};

/// A resampling request mapped nodes outside the source grid.
class TruncationError : public Error {
public:
    TruncationError(const std::string& what, std::size_t outside)
        : Error(what), outside_count(outside) {}
    std::size_t outside_count;
};

/// Malformed or inconsistent scenario configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace zblow
