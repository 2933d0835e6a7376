#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace scgid {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Unknown vertex name.
class LookupError : public Error {
public:
    using Error::Error;
};

// A value violates a graph, walk or forest invariant.
class StructuralError : public Error {
public:
    using Error::Error;
};

// Ill-formed call arguments (overlapping sets, bad rule id, bad window).
class ArgumentError : public Error {
public:
    using Error::Error;
};

// A documented precondition of the operation does not hold.
class ContractError : public Error {
public:
    using Error::Error;
};

class RewriteError : public Error {
public:
    using Error::Error;
};

// A search or enumeration guard was exceeded.
class ResourceError : public Error {
public:
    using Error::Error;
};

// No compatible full-time graph exists for the requested window.
class InfeasibleError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& message)
        : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
          line_(line),
          column_(column),
          message_(message) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }
    const std::string& message() const noexcept { return message_; }

private:
    std::size_t line_;
    std::size_t column_;
    std::string message_;
};

}  // namespace scgid
