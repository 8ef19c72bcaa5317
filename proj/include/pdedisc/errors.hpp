#pragma once

#include <stdexcept>
#include <string>

namespace pdedisc {

/// Invalid user-facing configuration (bad field values, unknown kinds).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A request exceeds what the engine supports (e.g. jet order > 4).
class CapabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mismatched dimensions between coupled containers.
class ShapeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument values (out-of-range sizes, fractions, domains).
class ArgumentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite value produced by a numeric sweep. Carries the tape node
/// index when the failure was located inside a graph.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg, long node_index = -1)
      : std::runtime_error(msg), node_index_(node_index) {}
  long node_index() const noexcept { return node_index_; }

 private:
  long node_index_;
};

/// Time stepper blew up; carries the offending step.
class InstabilityError : public std::runtime_error {
 public:
  InstabilityError(const std::string& msg, long step)
      : std::runtime_error(msg), step_(step) {}
  long step() const noexcept { return step_; }

 private:
  long step_;
};

}  // namespace pdedisc
