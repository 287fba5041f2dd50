#pragma once

#include <stdexcept>
#include <string>

namespace autoint {

/// Invalid configuration: derivative order above the ceiling, bad optimizer
/// settings, unknown config keys.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caller misuse, e.g. input arity mismatch.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Evaluation outside a model's or oracle's valid domain.
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Division by a kernel that vanishes at the query point.
class SingularKernelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Requested feature outside what the engine supports.
class UnsupportedError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-finite loss during optimisation.
class TrainingError : public std::runtime_error {
public:
    TrainingError(const std::string& what, long epoch)
        : std::runtime_error(what), epoch_(epoch) {}
    long epoch() const noexcept { return epoch_; }

private:
    long epoch_;
};

} // namespace autoint
