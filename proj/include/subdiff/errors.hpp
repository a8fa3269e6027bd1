#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace subdiff {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Caller violated a documented precondition (sizes, ranges, resolvable modes).
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A sampled time profile does not cover the requested interval.
class CoverageError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// Numerical procedure failed to reach its requested accuracy.
class AccuracyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid run configuration; `field` is a dotted path into the config.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& what)
        : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// The snapshot violates the solvability condition on one or more null modes.
class NoSolutionError : public std::runtime_error {
public:
    NoSolutionError(const std::string& what, std::vector<std::size_t> modes)
        : std::runtime_error(what), modes_(std::move(modes)) {}
    /// Positions (in SpectralCoeffs order) of the violating modes.
    const std::vector<std::size_t>& modes() const noexcept { return modes_; }

private:
    std::vector<std::size_t> modes_;
};

}  // namespace subdiff
