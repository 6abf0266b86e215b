#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace atlh {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Syntax error in formula or model text; positions are 1-based.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::size_t line, std::size_t column)
        : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
          line_(line), column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// Structurally invalid formula (empty or duplicated beta set, etc).
class FormulaError : public Error {
public:
    using Error::Error;
};

/// Model validation failure or reference to an unknown agent/state/action/proposition.
class ModelError : public Error {
public:
    using Error::Error;
};

/// A configured size or search cap was exceeded.
class CapExceeded : public Error {
public:
    using Error::Error;
};

} // namespace atlh
