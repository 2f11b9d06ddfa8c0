#ifndef DIVHJB_ERRORS_HPP
#define DIVHJB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace divhjb {

/// Argument outside the mathematical domain of an operation (negative
/// consumption, non-positive marginal value, x <= 0 for an asymptote, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Rejected model parameters or configuration.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class NotSupportedError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class RangeError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// Non-finite intermediate or other numerical breakdown.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The ODE denominator vanished; carries the offending derivative value.
class SingularityError : public NumericError {
public:
    SingularityError(const std::string& what, double vx)
        : NumericError(what), vx_(vx) {}
    double vx() const noexcept { return vx_; }

private:
    double vx_;
};

class DegenerateDesignError : public NumericError {
public:
    using NumericError::NumericError;
};

class NoDescentError : public NumericError {
public:
    using NumericError::NumericError;
};

} // namespace divhjb

#endif // DIVHJB_ERRORS_HPP
