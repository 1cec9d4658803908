#pragma once

#include <stdexcept>
#include <string>

namespace schottky {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file or configuration (CLI exit code 2).
class ParseError : public Error {
public:
    using Error::Error;
};

/// Input parsed but describes invalid Schottky geometry (CLI exit code 1).
class GeometryError : public Error {
public:
    using Error::Error;
};

/// A request the library declines to carry out (CLI exit code 3).
class RefusalError : public Error {
public:
    RefusalError(std::string reason, const std::string& what)
        : Error(what), reason_(std::move(reason)) {}

    const std::string& reason() const noexcept { return reason_; }

private:
    std::string reason_;
};

/// Branch-cut violations, non-finite samples, non-convergence.
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace schottky
