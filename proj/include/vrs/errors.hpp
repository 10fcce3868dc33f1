#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vrs {

// Base for every error raised by the library. Subclasses map onto the CLI exit
// codes (see cli/exit_codes.hpp).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Vector/matrix shapes disagree with a model or parameter layout.
class ShapeError : public Error {
public:
    using Error::Error;
};

// A value lies outside the support (e.g. a non-binary unit).
class DomainError : public Error {
public:
    using Error::Error;
};

// A documented precondition was violated by the caller.
class PreconditionError : public Error {
public:
    using Error::Error;
};

// Rejection sampler gave up after max_attempts proposals.
class BudgetExhausted : public Error {
public:
    BudgetExhausted(std::size_t attempts, const std::string& context)
        : Error("sampler budget exhausted after " + std::to_string(attempts) + " attempts" +
                (context.empty() ? "" : " (" + context + ")")),
          attempts_(attempts) {}

    std::size_t attempts() const noexcept { return attempts_; }

private:
    std::size_t attempts_;
};

// Non-finite values where finite ones are required.
class NumericError : public Error {
public:
    using Error::Error;
};

// Exact enumeration refused (space too large) or oracle function misbehaved.
class OracleError : public Error {
public:
    using Error::Error;
};

// Malformed input file. Carries the byte offset where parsing failed.
class FormatError : public Error {
public:
    FormatError(const std::string& what, std::size_t offset)
        : Error(what + " at byte offset " + std::to_string(offset)), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace vrs
