#pragma once

#include <stdexcept>
#include <string>

namespace fracsob {

// Maps to CLI exit code 2 / FS_ERR_CONFIG.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Maps to CLI exit code 3 / FS_ERR_NUMERIC.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fracsob
