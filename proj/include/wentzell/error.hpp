#pragma once

#include <stdexcept>
#include <string>

namespace wentzell {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed expression text. `position` is a 0-based character offset.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::size_t position)
        : Error(msg + " at position " + std::to_string(position)), position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

/// Expression evaluation failure (unbound variable, domain error).
class EvalError : public Error {
public:
    using Error::Error;
};

/// Bad configuration text or a violated model assumption.
class ModelError : public Error {
public:
    using Error::Error;
};

/// Numerical failure: singular systems, non-convergence, non-finite values.
class NumericError : public Error {
public:
    using Error::Error;
};

} // namespace wentzell
