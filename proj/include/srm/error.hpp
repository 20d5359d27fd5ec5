#pragma once

#include <stdexcept>
#include <string>

namespace srm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input violates a documented invariant (negative citation, bad lambda...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Operation is not defined for this combination of inputs.
class UnsupportedError : public Error {
public:
    using Error::Error;
};

class InsufficientDataError : public Error {
public:
    using Error::Error;
};

/// Unknown index name, missing table column or missing gamma entry.
class LookupError : public Error {
public:
    using Error::Error;
};

/// Malformed CSV/JSON input. `line` is 1-based, 0 when not applicable.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

} // namespace srm
