#pragma once

#include <stdexcept>
#include <string>

namespace pcnet {

// Bad data or invariant violations in user input (CLI exit code 2).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical estimation failures: non-convergence, singular matrices,
// too many failed bootstrap replicates (CLI exit code 3).
class EstimationError : public std::runtime_error {
 public:
  explicit EstimationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid option combinations, e.g. alpha below the 2/n_boots floor
// (CLI exit code 1).
class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace pcnet
