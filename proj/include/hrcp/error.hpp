#pragma once

#include <stdexcept>
#include <string>

namespace hrcp {

/// Malformed or inconsistent user input (files, configuration, arguments).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical routine failed: non-finite density, optimizer or root-finder
/// breakdown, too many non-convergent Monte Carlo replicates.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hrcp
