#pragma once

#include <stdexcept>
#include <string>

namespace dida {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad configuration: invalid values, unknown keys, unreadable config files.
struct ConfigError : Error {
    using Error::Error;
};

// Filesystem / serialization failures outside of config handling.
struct IoError : Error {
    using Error::Error;
};

} // namespace dida
