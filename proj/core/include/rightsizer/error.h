#pragma once

#include <stdexcept>
#include <string>

namespace rightsizer {

// Malformed configuration, catalog, trace or schedule. The CLI maps this to
// exit code 2.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// Failure while the event loop is running. The CLI maps this to exit code 1.
class SimulationError : public std::runtime_error {
 public:
  explicit SimulationError(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace rightsizer
