#pragma once

#include <stdexcept>
#include <string>

namespace hefs {

// Bad input data: unreadable files, malformed cells, degenerate label sets.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Invalid parameters or flag combinations.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace hefs
