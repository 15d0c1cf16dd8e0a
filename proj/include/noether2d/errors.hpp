#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace noether2d {

// Base for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Expression text could not be parsed; offset() is the byte position of the
// first offending character.
class ExprParseError : public Error {
public:
    ExprParseError(const std::string& msg, std::size_t offset)
        : Error(msg + " (offset " + std::to_string(offset) + ")"), offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

// Unbound variable or domain violation during expression evaluation.
class ExprEvalError : public Error {
public:
    using Error::Error;
};

// Adaptive quadrature failed to converge (near-singular integrand).
class QuadratureError : public Error {
public:
    QuadratureError(const std::string& msg, double a, double b)
        : Error(msg), a_(a), b_(b) {}
    double interval_lo() const { return a_; }
    double interval_hi() const { return b_; }

private:
    double a_, b_;
};

// Invalid symmetry data, profile data or scenario input.
class ValidationError : public Error {
public:
    using Error::Error;
};

// Field evaluated outside its admissible region (excluded disc, window).
class FieldDomainError : public Error {
public:
    using Error::Error;
};

// ODE integration failed (step-size underflow, window exit).
class IntegrationError : public Error {
public:
    IntegrationError(const std::string& msg, double t) : Error(msg), t_(t) {}
    double time() const { return t_; }

private:
    double t_;
};

}  // namespace noether2d
