#pragma once

#include <stdexcept>
#include <string>

namespace dcoflow {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Unknown port or coflow id.
class LookupError : public Error {
public:
    using Error::Error;
};

// A caller broke an operation's precondition (empty set, j not in S, ...).
class PreconditionError : public Error {
public:
    using Error::Error;
};

// Invalid model data: bad ports, non-positive volume, bad weights.
class InputError : public Error {
public:
    using Error::Error;
};

// Invalid generator / scheduler / experiment configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Malformed trace, JSON or LP text. Carries the offending line when known.
class ParseError : public Error {
public:
    ParseError(const std::string& what, int line = 0)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    int line() const noexcept { return line_; }

private:
    int line_;
};

// An exhaustive oracle was asked to handle an instance beyond its limit.
class SizeError : public Error {
public:
    using Error::Error;
};

}  // namespace dcoflow
