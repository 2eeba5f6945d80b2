#pragma once

#include <stdexcept>
#include <string>

namespace cmpgen {

// Bad configuration, bad arguments, or violated input contracts.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Files that cannot be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cmpgen
