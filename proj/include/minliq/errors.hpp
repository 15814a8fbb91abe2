#pragma once

#include <stdexcept>
#include <string>

namespace minliq {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A parameter inequality required for a finite lower bound (or a positive
// variance process) does not hold. `which` names the inequality.
class AssumptionViolated : public Error {
public:
    AssumptionViolated(std::string which, const std::string& detail)
        : Error("assumption violated: " + which + " (" + detail + ")"), which_(std::move(which)) {}
    const std::string& which() const noexcept { return which_; }

private:
    std::string which_;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class UnsupportedExponent : public Error {
public:
    explicit UnsupportedExponent(double p_hat)
        : Error("canonical scaling requires p_hat = 2, got " + std::to_string(p_hat)) {}
};

class InstabilityDetected : public Error {
public:
    using Error::Error;
};

class NoConvergence : public Error {
public:
    NoConvergence(double last_delta, const std::string& detail)
        : Error("truncation schedule exhausted: " + detail), last_delta_(last_delta) {}
    double last_delta() const noexcept { return last_delta_; }

private:
    double last_delta_;
};

class GridMismatch : public Error {
public:
    using Error::Error;
};

class NoTrades : public Error {
public:
    NoTrades() : Error("no trades on path: A is undefined") {}
};

class InsufficientData : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace minliq
