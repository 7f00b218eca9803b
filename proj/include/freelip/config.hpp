#pragma once

#include <cstddef>

namespace freelip {

// All numeric tolerances in one place.
struct Tolerances {
  // Triangle-inequality slack allowed during validation (absolute).
  double validation_slack = 1e-12;
  // Molecule coefficients below this magnitude are pruned (absolute).
  double coefficient_prune = 1e-13;
  // Flow feasibility / certificate reconstruction (absolute).
  double flow_feasibility = 1e-9;
  // Two costs closer than this (relative) are considered equal.
  double cost_relative = 1e-9;
  // Tree flows below flow_snap * total mass are treated as exactly zero.
  // Concave costs blow up tiny noise: (1e-12)^0.25 = 1e-3.
  double flow_snap = 1e-12;
  // Strong duality gap and cross-solver agreement (absolute).
  double duality_gap = 1e-7;
  // Lipschitz slack for dual witnesses (relative).
  double lipschitz_slack = 1e-9;
};

struct SolverOptions {
  Tolerances tol{};
  // method=auto uses forest-exact up to this many points.
  std::size_t exact_threshold = 9;
  // forest-exact refuses beyond this many points.
  std::size_t exact_hard_cap = 12;
  // Worker threads for enumeration; 0 means one.
  std::size_t threads = 1;
  // Local search.
  unsigned long long seed = 0;
  std::size_t restarts = 8;
};

}  // namespace freelip
