#ifndef CCL_ERRORS_HPP_
#define CCL_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace ccl {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string &what) : std::runtime_error(what) {}
};

/// A caller-supplied parameter is out of its documented range.
class InvalidParameterError : public Error {
public:
    using Error::Error;
};

/// Input data violates an invariant (non-finite values, duplicate ids, ...).
class InvalidInputError : public Error {
public:
    using Error::Error;
};

/// Input is structurally valid but numerically degenerate (e.g. all kNN
/// distances are zero, so no weight bandwidth can be calibrated).
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

/// An iterative solve did not reach its tolerance; carries the last residual.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string &what, double residual)
        : Error(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

/// A covariance matrix has (numerically) zero eigenvalues.
class RankDeficiencyError : public Error {
public:
    RankDeficiencyError(const std::string &what, int null_dimensions)
        : Error(what), null_dimensions_(null_dimensions) {}
    int null_dimensions() const { return null_dimensions_; }

private:
    int null_dimensions_;
};

/// File parsing / serialization failure. The message names the offending
/// row (CSV) or byte offset (binary).
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace ccl

#endif // CCL_ERRORS_HPP_
