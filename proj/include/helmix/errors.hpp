#pragma once

#include <stdexcept>
#include <string>

namespace helmix {

enum class ErrorKind {
    config,
    domain,
    degenerate_state,
    model_invalid,
    ill_posed,
    assumption,
    not_subgradient,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

// Thrown for malformed configuration files, missing keys or unreadable tables.
struct ConfigError : Error {
    explicit ConfigError(const std::string& w) : Error(ErrorKind::config, w) {}
};

// A state lies outside the declared domain of a model (names the violated threshold).
struct DomainError : Error {
    explicit DomainError(const std::string& w) : Error(ErrorKind::domain, w) {}
};

struct DegenerateStateError : Error {
    explicit DegenerateStateError(const std::string& w) : Error(ErrorKind::degenerate_state, w) {}
};

// The constitutive data contradict a structural requirement (e.g. volume not decreasing in p).
struct ModelInvalidError : Error {
    explicit ModelInvalidError(const std::string& w) : Error(ErrorKind::model_invalid, w) {}
};

// The pressure is not a function of the densities at this point (incompressible behaviour).
struct IllPosedError : Error {
    explicit IllPosedError(const std::string& w) : Error(ErrorKind::ill_posed, w) {}
};

struct AssumptionViolation : Error {
    explicit AssumptionViolation(const std::string& w) : Error(ErrorKind::assumption, w) {}
};

struct NotASubgradientError : Error {
    explicit NotASubgradientError(const std::string& w) : Error(ErrorKind::not_subgradient, w) {}
};

}  // namespace helmix
