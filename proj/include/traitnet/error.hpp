#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace traitnet {

// Error classes partition CLI exit codes: usage/config, data/parse, numeric.
class Error : public std::runtime_error {
public:
    enum class Kind { config, parse, lookup, numeric, degenerate, size, unsupported };

    Error(Kind kind, std::string message)
        : std::runtime_error(std::move(message)), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(std::string message) : Error(Kind::config, std::move(message)) {}
};

// Carries a 1-based row number when the failing input line is known.
class ParseError : public Error {
public:
    explicit ParseError(std::string message, std::size_t row = 0)
        : Error(Kind::parse, row ? "row " + std::to_string(row) + ": " + message
                                 : std::move(message)),
          row_(row) {}

    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

class LookupError : public Error {
public:
    explicit LookupError(std::string message) : Error(Kind::lookup, std::move(message)) {}
};

class NumericError : public Error {
public:
    explicit NumericError(std::string message) : Error(Kind::numeric, std::move(message)) {}
};

// Undefined result (zero eligible edges, all-missing attribute, sd == 0 null).
class DegenerateError : public Error {
public:
    explicit DegenerateError(std::string message) : Error(Kind::degenerate, std::move(message)) {}
};

class SizeError : public Error {
public:
    explicit SizeError(std::string message) : Error(Kind::size, std::move(message)) {}
};

class UnsupportedError : public Error {
public:
    explicit UnsupportedError(std::string message) : Error(Kind::unsupported, std::move(message)) {}
};

}  // namespace traitnet
