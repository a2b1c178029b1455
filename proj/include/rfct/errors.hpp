#pragma once

#include <stdexcept>
#include <string>

namespace rfct {

/// Parameter set violates a model invariant (detected at construction).
class InvalidParameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Argument outside the domain of a map (e.g. inverting theta outside (theta_r, theta_s)).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Iterative method stopped without meeting its tolerance.
class NonConvergence : public std::runtime_error {
public:
    NonConvergence(const std::string& what, double final_norm, int iterations)
        : std::runtime_error(what), final_norm_(final_norm), iterations_(iterations) {}

    double final_norm() const noexcept { return final_norm_; }
    int iterations() const noexcept { return iterations_; }

private:
    double final_norm_;
    int iterations_;
};

/// Time step could not be completed even at the minimum step size.
class StepFailed : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Text input could not be parsed; carries the 1-based line number.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, int line)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

    int line() const noexcept { return line_; }

private:
    int line_;
};

/// Structurally invalid input (mesh invariants etc.).
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Two inputs that must be mutually consistent are not.
class ConsistencyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace rfct
