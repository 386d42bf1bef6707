#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hcif {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnboundVariable : public Error {
public:
    explicit UnboundVariable(const std::string& name) : Error("unbound variable: " + name) {}
};

class UnknownLocation : public Error {
public:
    explicit UnknownLocation(const std::string& name) : Error("unknown location: " + name) {}
};

class UnsupportedReset : public Error {
public:
    explicit UnsupportedReset(const std::string& what) : Error("unsupported reset form: " + what) {}
};

class InconsistentDynamics : public Error {
public:
    explicit InconsistentDynamics(const std::string& var)
        : Error("inconsistent dynamics for variable " + var) {}
};

class InvalidDuration : public Error {
public:
    using Error::Error;
};

class SortError : public Error {
public:
    using Error::Error;
};

class FlattenError : public Error {
public:
    using Error::Error;
};

class SyntaxError : public Error {
public:
    SyntaxError(std::size_t line, std::size_t column, const std::string& message)
        : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
          line_(line), column_(column) {}

    [[nodiscard]] std::size_t line() const { return line_; }
    [[nodiscard]] std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

} // namespace hcif
