#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace nhqfi {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A documented precondition was violated (shape, Hermiticity, normalization).
class ContractError : public Error {
public:
    using Error::Error;
};

class IndexError : public ContractError {
public:
    using ContractError::ContractError;
};

/// Closed-form expression requested outside the unbroken phase.
class PhaseDomainError : public Error {
public:
    using Error::Error;
};

/// Raised when eigenvalues coalesce (exceptional point) and no eigenbasis exists.
class DefectiveMatrixError : public Error {
public:
    DefectiveMatrixError(const std::string& what, double min_gap)
        : Error(what), min_gap_(min_gap) {}
    double min_gap() const noexcept { return min_gap_; }

private:
    double min_gap_;
};

/// ⟨ψ̃|ψ⟩ vanished; the pair cannot be normalized.
class SelfOrthogonalError : public Error {
public:
    SelfOrthogonalError(const std::string& what, double overlap)
        : Error(what), overlap_(overlap) {}
    double overlap() const noexcept { return overlap_; }

private:
    double overlap_;
};

/// Integrator diagnostics: trace drift, lost positivity.
class IntegrationError : public Error {
public:
    using Error::Error;
};

class DecayUnderflowError : public Error {
public:
    using Error::Error;
};

/// Malformed or invalid run configuration.
class ConfigError : public Error {
public:
    ConfigError(const std::string& what, std::string field = {}, std::optional<int> line = {})
        : Error(what), field_(std::move(field)), line_(line) {}
    const std::string& field() const noexcept { return field_; }
    std::optional<int> line() const noexcept { return line_; }

private:
    std::string field_;
    std::optional<int> line_;
};

}  // namespace nhqfi
