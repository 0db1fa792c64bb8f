#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "relblow/gas.hpp"

namespace relblow {

// One named check: `relation` states the identity/inequality being verified,
// `max_residual` the worst sampled deviation against `tolerance`.
struct CheckResult {
  std::string name;
  std::string relation;
  std::size_t samples = 0;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct IdentitySuiteResult {
  std::vector<CheckResult> checks;
  bool all_pass = false;

  std::string to_json() const;   // stable key order, no timestamps
  std::string to_table() const;  // human-readable summary
};

// Closed-form / finite-difference identity checks over randomized admissible
// states. Deterministic for a fixed (seed, n_samples); a check without a
// relation string is reported as failed.
IdentitySuiteResult run_identity_suite(const GasParams& gas, std::uint64_t seed,
                                       int n_samples);

// Solver-mediated checks: characteristic constancy and conserved-quantity
// drift under refinement, gradient upper bounds, rate-scale inequality
// sampling, the density lower-bound product, and tracer conservation.
struct DynamicsConfig {
  GasParams gas;        // gamma in (1,3) exercises every check
  int cells = 192;      // coarsest resolution; refinements double it
  int levels = 3;       // number of resolutions
  double t_end = 0.6;   // smooth-phase horizon
};

IdentitySuiteResult run_dynamics_suite(const DynamicsConfig& cfg);

}  // namespace relblow
