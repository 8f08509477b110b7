#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace memepop {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Invalid parameter or input outside an operation's domain.
class DomainError : public Error {
public:
    using Error::Error;
};

// Input is well-formed but carries no usable signal (all-zero ratios, constant samples).
class DegenerateError : public Error {
public:
    using Error::Error;
};

} // namespace memepop
