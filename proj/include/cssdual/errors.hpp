#pragma once

#include <stdexcept>
#include <string>

namespace cssdual {

// Malformed input: bad indices, length mismatches, invalid parameters.
class validation_error : public std::runtime_error {
 public:
  explicit validation_error(const std::string& what) : std::runtime_error(what) {}
};

// Work refused because it would exceed a configured cap (enumeration,
// dense dimension, exact spin count). Fail loudly rather than hang.
class resource_error : public std::runtime_error {
 public:
  explicit resource_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cssdual
