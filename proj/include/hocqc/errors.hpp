#pragma once

#include <stdexcept>
#include <string>

namespace hocqc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    /// Short machine-readable tag, e.g. "range", "domain", "config".
    virtual const char* kind() const noexcept { return "error"; }
};

/// Bond offset outside the interaction range, or derivative order out of bounds.
class RangeError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "range"; }
};

/// Pair potential evaluated outside its domain (e.g. r <= 0 for Lennard-Jones).
class DomainError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "domain"; }
};

/// Invalid system, decomposition, mesh or experiment setup.
class ConfigError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "config"; }
};

/// Singular or indefinite linear system, eigen-solver failure.
class NumericalError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "numerical"; }
};

}  // namespace hocqc
