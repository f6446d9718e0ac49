#pragma once

#include <stdexcept>
#include <string>

namespace mlst {

// Size/complexity guard tripped (exit code 3 at the CLI).
class guard_error : public std::runtime_error {
public:
    explicit guard_error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed or inconsistent input data (exit code 4 at the CLI).
class data_error : public std::runtime_error {
public:
    explicit data_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mlst
