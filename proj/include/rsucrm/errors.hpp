#pragma once

#include <stdexcept>
#include <string>

namespace rsucrm {

// Queueing delay requested at or beyond the service rate.
struct SaturationError : std::runtime_error {
  explicit SaturationError(const std::string& what) : std::runtime_error(what) {}
};

// The demand cannot be carried by any admissible placement/routing.
struct InfeasibleError : std::runtime_error {
  explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

// Instance falls outside the guarded envelope of the exhaustive solver.
struct GuardError : std::runtime_error {
  explicit GuardError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rsucrm
