#pragma once

#include <stdexcept>
#include <string>

namespace mfgp {

// Bad run parameters, malformed config files, unusable CLI flags. CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Unreadable or malformed input data, degenerate datasets. CLI exit code 3.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// S-expression syntax errors; carries the character offset of the offending token.
class ParseError : public DataError {
public:
    ParseError(const std::string& what, std::size_t position)
        : DataError(what + " (at position " + std::to_string(position) + ")"), pos(position) {}
    std::size_t pos;
};

// Model applied to data whose columns do not cover the model's schema.
class SchemaError : public DataError {
public:
    explicit SchemaError(const std::string& what) : DataError(what) {}
};

} // namespace mfgp
