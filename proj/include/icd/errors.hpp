#pragma once

#include <stdexcept>
#include <string>

namespace icd {

// Malformed arguments: out-of-range ids, shape mismatches, empty inputs.
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

// The graph or partition has no edges / zero-volume communities / isolated
// nodes where the requested quantity is undefined.
class DegenerateError : public std::domain_error {
 public:
  explicit DegenerateError(const std::string& what) : std::domain_error(what) {}
};

class GenerationError : public std::runtime_error {
 public:
  explicit GenerationError(const std::string& what) : std::runtime_error(what) {}
};

class StateError : public std::logic_error {
 public:
  explicit StateError(const std::string& what) : std::logic_error(what) {}
};

class TrainingDivergedError : public std::runtime_error {
 public:
  TrainingDivergedError(const std::string& what, int epoch)
      : std::runtime_error(what), epoch_(epoch) {}
  int epoch() const { return epoch_; }

 private:
  int epoch_;
};

class CapabilityError : public std::runtime_error {
 public:
  explicit CapabilityError(const std::string& what) : std::runtime_error(what) {}
};

class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace icd
