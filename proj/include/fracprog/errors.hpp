#pragma once

#include <stdexcept>
#include <string>

namespace fracprog {

// Argument outside the admissible range of an operation (scale, level, kappa, ...).
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// A documented precondition on the *data* does not hold (density, support, normalization).
class PreconditionError : public std::runtime_error {
 public:
  PreconditionError(std::string module, const std::string& what)
      : std::runtime_error(module + ": " + what), module_(std::move(module)) {}
  const std::string& module() const noexcept { return module_; }

 private:
  std::string module_;
};

// Malformed user input: family strings, config files, CLI flags.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Requested work does not fit the memory budget.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fracprog
