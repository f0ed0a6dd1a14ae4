#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pilotguard {

/// Bad input: wrong dimensions, out-of-range parameters, malformed config.
class ParameterError : public std::invalid_argument {
public:
    explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

/// Base for failures that come out of the numerical kernels rather than from
/// user input. The CLI maps these to exit code 2.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

class NotPsdError : public NumericalError {
public:
    NotPsdError(std::size_t pivot, const std::string& what)
        : NumericalError(what), pivot_(pivot) {}

    std::size_t pivot() const noexcept { return pivot_; }

private:
    std::size_t pivot_;
};

class SingularError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class DomainError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// N^2 sigma_H^2 < trace(M1): no real scaling satisfies the trace constraint.
class AlphaInfeasibleError : public NumericalError {
public:
    AlphaInfeasibleError(double target, double trace_m1, const std::string& what)
        : NumericalError(what), target_(target), trace_m1_(trace_m1) {}

    double target() const noexcept { return target_; }
    double trace_m1() const noexcept { return trace_m1_; }

private:
    double target_;
    double trace_m1_;
};

class InsufficientEntropyError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class DegenerateError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

} // namespace pilotguard
