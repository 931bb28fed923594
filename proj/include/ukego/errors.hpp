#pragma once

#include <stdexcept>
#include <string>

namespace ukego {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller-side contract was violated (bad sizes, out-of-range options).
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// An argument lies outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// The correlation matrix could not be factorized even with the largest nugget.
class IllConditionedError : public Error {
public:
    IllConditionedError(const std::string& what, double nugget)
        : Error(what), nugget_(nugget) {}
    double nugget() const noexcept { return nugget_; }

private:
    double nugget_;
};

/// F^T R^-1 F is singular (trend matrix without full column rank).
class SingularTrendError : public Error {
public:
    using Error::Error;
};

/// Responses carry no variance, so standardization is undefined.
class DegenerateResponseError : public Error {
public:
    using Error::Error;
};

}  // namespace ukego
