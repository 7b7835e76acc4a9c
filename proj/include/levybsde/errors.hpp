#pragma once

#include <stdexcept>
#include <string>

namespace levybsde {

// Raised when a user-supplied configuration is invalid or violates a
// precondition required for the requested computation (e.g. a time step too
// coarse for the fixed-point solve to contract).  The CLI maps this family
// to exit code 2; programming errors keep using std::logic_error.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace levybsde
