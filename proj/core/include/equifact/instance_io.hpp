#pragma once

#include "equifact/group_model.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>

namespace equifact {

/// Raised on malformed instance files. `where` names the offending field
/// (with a line number when one is known); what() carries the full message.
class InstanceError : public std::runtime_error {
 public:
  InstanceError(std::string where, const std::string& message)
      : std::runtime_error(where + ": " + message), where_(std::move(where)) {}

  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

struct InstanceOptions {
  int levels = 8;
  double tol = 1e-8;
  std::uint64_t seed = 0;
  int samples = 100000;
  int word_radius = 6;
};

/// One loaded problem instance: the probability space, the group system with
/// its representation and action, the equivariant map and run options.
struct Instance {
  std::string name;
  FiniteProbSpace space;
  GroupSystem group;
  EquivariantMap T;
  InstanceOptions options;
};

/// Parses and validates an instance file. Every module-level invariant is
/// checked here: weight positivity and normalization, homomorphism laws,
/// weight preservation, and the covariance of T (residual <= 1e-10).
/// `word_radius_override`, when positive, replaces the file's word-ball
/// radius.
Instance load_instance(const std::string& path, int word_radius_override = 0);

}  // namespace equifact
