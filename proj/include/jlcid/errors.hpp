#pragma once

#include <stdexcept>
#include <string>

namespace jlcid {

// Bad run configuration (CLI/config file/spec construction).
struct config_error : std::runtime_error {
  explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or inconsistent input data.
struct data_error : std::runtime_error {
  explicit data_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-finite or otherwise invalid numerical state at a given parameter
// value. The optimizer's line search catches this and retreats.
struct numeric_error : std::runtime_error {
  explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace jlcid
