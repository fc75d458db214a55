#pragma once

#include <stdexcept>
#include <string>

namespace flowgraph {

/// Invalid configuration or command-line value. CLI exit code 1.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input header does not match the configured schema. CLI exit code 1.
class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or out-of-contract data rows. CLI exit code 2.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace flowgraph
