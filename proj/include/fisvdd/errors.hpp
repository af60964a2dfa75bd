#pragma once

#include <stdexcept>
#include <string>

namespace fisvdd {

// Base class for everything thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid caller input: dimension mismatch, non-finite values, bad
// hyperparameters, out-of-range indices, empty burn-in.
class InputError : public Error {
public:
    using Error::Error;
};

// A matrix update would be numerically degenerate (Schur complement at or
// below beta_min, or a vanishing pivot during shrinking).
class IllConditionedError : public Error {
public:
    using Error::Error;
};

// Internal state no longer satisfies the model invariants. Indicates a bug
// or corrupted state, not bad input.
class InvariantError : public Error {
public:
    using Error::Error;
};

// Malformed text input (CSV or model file). Carries a 1-based line number
// when one is known; line == 0 means "not line-specific".
class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::size_t line = 0)
        : Error(line > 0 ? msg + " (line " + std::to_string(line) + ")" : msg),
          line_(line) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

// Model file declares a format_version this build does not understand.
class VersionError : public Error {
public:
    using Error::Error;
};

// Model file parsed but fails its integrity checks.
class CorruptModelError : public Error {
public:
    using Error::Error;
};

// The exact reference solver could not produce a consistent solution.
class OracleError : public Error {
public:
    using Error::Error;
};

// Filesystem failure, with the offending path in the message.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace fisvdd
