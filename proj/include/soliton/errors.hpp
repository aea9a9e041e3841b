#pragma once

#include <stdexcept>
#include <string>

namespace soliton {

/// Argument outside the domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Evaluation too close to a pole. Carries where and how close.
class PoleError : public DomainError {
public:
    PoleError(const std::string& what, double x, double distance, double lambda = 0.0)
        : DomainError(what), x_(x), distance_(distance), lambda_(lambda) {}

    double x() const noexcept { return x_; }
    double distance() const noexcept { return distance_; }
    double lambda() const noexcept { return lambda_; }

private:
    double x_;
    double distance_;
    double lambda_;
};

/// Integral that does not exist (e.g. R_F with two zero arguments).
class DivergenceError : public DomainError {
public:
    using DomainError::DomainError;
};

/// u+λ changes sign between the phase reference point and the query point.
class PoleCrossingError : public DomainError {
public:
    PoleCrossingError(const std::string& what, double x_cross)
        : DomainError(what), x_cross_(x_cross) {}
    double x_cross() const noexcept { return x_cross_; }

private:
    double x_cross_;
};

/// Real-mode evaluation requested where the result is not real.
class BranchError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Path-integrated surface depends on the path.
class CompatibilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Requested combination has no implementation (e.g. no printed closed form).
class UnsupportedError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Configuration text that cannot be parsed.  line 0 means no source position.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& what, int line, int column)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ", column " + std::to_string(column) +
                                            ": " + what
                                      : what),
          line_(line), column_(column) {}
    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    int line_;
    int column_;
};

}  // namespace soliton
