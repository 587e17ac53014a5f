#pragma once

#include <stdexcept>
#include <string>

namespace aesa {

/// Input outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Invalid configuration value; the message starts with the field path.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(const std::string& field, const std::string& what)
        : std::invalid_argument(field + ": " + what), field_(field) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Factorisation or inversion failure inside the filter.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caller broke an operation's precondition (ordering, lifecycle).
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// A trace or dataset is truncated or inconsistent.
class IntegrityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace aesa
