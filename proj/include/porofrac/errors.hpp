#pragma once

#include <stdexcept>
#include <string>

namespace porofrac {

/// Base class for all errors thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A value passed to an operation violates its preconditions.
class InvalidArgumentError : public Error {
public:
    using Error::Error;
};

/// A mesh entity is degenerate or inverted.
class InvalidGeometryError : public Error {
public:
    using Error::Error;
};

/// An input file could not be parsed; carries the offending line number.
class MalformedFileError : public Error {
public:
    MalformedFileError(const std::string& what, int line)
        : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

/// A scenario configuration is inconsistent; the message names the key path.
class ConfigurationError : public Error {
public:
    using Error::Error;
};

/// A Newton solve exhausted its iteration budget.
class ConvergenceFailure : public Error {
public:
    ConvergenceFailure(const std::string& field, double time, int iterations, double residual)
        : Error("field '" + field + "' failed to converge at t=" + std::to_string(time) +
                " s after " + std::to_string(iterations) +
                " iterations (residual " + std::to_string(residual) + ")"),
          field_(field), time_(time), residual_(residual) {}
    const std::string& field() const { return field_; }
    double time() const { return time_; }
    double residual() const { return residual_; }

private:
    std::string field_;
    double time_;
    double residual_;
};

/// The factorized system is singular or indefinite.
class SingularSystemError : public Error {
public:
    using Error::Error;
};

/// Filesystem read/write failure.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace porofrac
