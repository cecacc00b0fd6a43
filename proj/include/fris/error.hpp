#pragma once

#include <stdexcept>
#include <string>

namespace fris {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the documented domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Matrix is asymmetric or has an eigenvalue below the clamping tolerance.
class NotPsdError : public Error {
public:
    using Error::Error;
};

/// Moment matching on a matrix with vanishing second-order trace.
class DegenerateFitError : public Error {
public:
    using Error::Error;
};

/// Invalid or unparsable configuration; `field()` names the offending key.
class ConfigError : public Error {
public:
    ConfigError(std::string field, const std::string& what)
        : Error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class IoError : public Error {
public:
    using Error::Error;
};

namespace detail {

inline void require(bool condition, const char* message) {
    if (!condition) throw DomainError(message);
}

} // namespace detail
} // namespace fris
