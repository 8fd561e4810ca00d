#pragma once

#include <stdexcept>
#include <string>

namespace spibb {

/// Iterative solver exceeded its iteration budget before reaching tolerance.
struct NonConvergenceError : std::runtime_error {
    explicit NonConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

/// A cycle of undiscounted states was detected; values would not converge.
struct InvalidDiscountError : std::runtime_error {
    explicit InvalidDiscountError(const std::string& what) : std::runtime_error(what) {}
};

/// A state/action path is not well formed for the given model.
struct MalformedPathError : std::runtime_error {
    explicit MalformedPathError(const std::string& what) : std::runtime_error(what) {}
};

/// Two objects that must agree in shape do not.
struct DimensionMismatchError : std::runtime_error {
    explicit DimensionMismatchError(const std::string& what) : std::runtime_error(what) {}
};

/// Input data violates a documented precondition.
struct InvalidInputError : std::runtime_error {
    explicit InvalidInputError(const std::string& what) : std::runtime_error(what) {}
};

/// Argument outside the mathematical domain of a function.
struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

/// A search bracket could not be established.
struct InfeasibleError : std::runtime_error {
    explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

struct UnknownEnvError : std::runtime_error {
    explicit UnknownEnvError(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidParametersError : std::runtime_error {
    explicit InvalidParametersError(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidEpsilonError : std::runtime_error {
    explicit InvalidEpsilonError(const std::string& what) : std::runtime_error(what) {}
};

struct EmptyInputError : std::runtime_error {
    explicit EmptyInputError(const std::string& what) : std::runtime_error(what) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace spibb
