#ifndef CHERNOFF_ERRORS_HPP
#define CHERNOFF_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace chernoff {

// Error hierarchy used across the library.  Each class corresponds to one
// failure mode so callers (and tests) can catch precisely what they expect.

// A function evaluator returned a non-finite value.
class EvaluationError : public std::runtime_error {
public:
    explicit EvaluationError(const std::string& msg) : std::runtime_error(msg) {}
};

// An argument lies outside the mathematical domain of the operation.
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& msg) : std::domain_error(msg) {}
};

// Matrix or vector dimensions do not match.
class ShapeError : public std::invalid_argument {
public:
    explicit ShapeError(const std::string& msg) : std::invalid_argument(msg) {}
};

// A computation would overflow the double range.
class RangeError : public std::range_error {
public:
    explicit RangeError(const std::string& msg) : std::range_error(msg) {}
};

// A documented precondition of an operation does not hold.
class PreconditionError : public std::logic_error {
public:
    explicit PreconditionError(const std::string& msg) : std::logic_error(msg) {}
};

// The inputs lack a declared capability (typically a derivative order).
class CapabilityError : public std::logic_error {
public:
    explicit CapabilityError(const std::string& msg) : std::logic_error(msg) {}
};

// An evaluation point escaped the trusted extension region of a grid.
class WindowError : public std::runtime_error {
public:
    WindowError(const std::string& msg, int step = -1)
        : std::runtime_error(msg), step_index(step) {}
    int step_index;  // iteration step that triggered the escape, -1 if n/a
};

// Too few usable data points for a fit.
class InsufficientDataError : public std::runtime_error {
public:
    explicit InsufficientDataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed configuration input; message carries a JSON pointer to the
// offending field.
class UsageError : public std::runtime_error {
public:
    explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

// A reference solver failed to reach its requested accuracy.
class OracleAccuracyError : public std::runtime_error {
public:
    OracleAccuracyError(const std::string& msg, double achieved_accuracy)
        : std::runtime_error(msg), achieved(achieved_accuracy) {}
    double achieved;
};

}  // namespace chernoff

#endif
