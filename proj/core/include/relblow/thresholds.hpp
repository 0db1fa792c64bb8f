#pragma once

#include <cstddef>
#include <vector>

#include "relblow/gas.hpp"
#include "relblow/riemann_non.hpp"

namespace relblow {

// psi(rho) = int_0^rho inf_{|S|<=B} c^2 sqrt(dP/dsigma)/(c^2 sigma + P) dsigma.
// Strictly increasing, psi(0) = 0, unbounded.
double psi_lower_gap(double rho, const GasParams& gas, double tol = 1e-10);

// Inverse of psi (monotone root-find).
double psi_inverse(double value, const GasParams& gas, double tol = 1e-10);

// Result of a refined grid maximization: per-round values plus convergence.
struct GridMaxCertificate {
  std::vector<double> by_round;
  bool converged = false;
  double final_rel_change = 0.0;
};

// Psi(kappa) = max over [0,kappa] x [-B,B] of 2 sqrt(dP/drho) / (z - w).
double Psi_gap_ratio_max(double kappa, const GasParams& gas,
                         GridMaxCertificate* cert = nullptr);

// E(c,B): density where the sound speed reaches c at S = B (closed form).
// Infinite for gamma <= 2.
double sonic_density_sup(const GasParams& gas);

// K(c,B) = sup |a| / (z - w) over [0, E) x [-B, B].
double coupling_bound_K(const GasParams& gas, GridMaxCertificate* cert = nullptr);

// Sup norms of the initial profiles feeding the a-priori bounds.
struct DataBounds {
  double sup_abs_w0 = 0.0;
  double sup_abs_z0 = 0.0;
  double tv_S0 = 0.0;        // discrete total variation of S0
  double inf_gap = 0.0;      // inf (z0 - w0)
  double theta1_max = 0.0;   // sup |eta0 / nt0|
  double theta2_max = 0.0;   // sup |(dxxS0 - (eta0/nt0) dx nt0)/nt0^2|
};

// The a-priori constants: V = exp(K TV), U1/U2, max|w|/max|z|, M2 and the
// sound-speed assumption margin Psi(M2) (max|z|+max|w|)/2 < c.
struct CriteriaConstants {
  double K = 0.0;
  double V = 1.0;
  double U1 = 0.0;
  double U2 = 0.0;
  double max_w = 0.0;
  double max_z = 0.0;
  double M2 = 0.0;
  double E = 0.0;  // +inf for gamma <= 2
  double assumption_lhs = 0.0;
  double assumption_margin = 0.0;  // c - lhs
  bool assumption_ok = false;
};

CriteriaConstants criteria_constants(const DataBounds& data, const GasParams& gas);

// N1/N2 search options. The coarse grid is refined around the top cells until
// the suprema move by less than refine_tol.
struct ThresholdOpts {
  int grid_n = 33;
  double refine_tol = 0.005;
  int max_rounds = 6;
  double gap_floor_frac = 1e-4;
  int sweep_steps = 192;
};

struct ThresholdCertificate {
  std::vector<double> n1_by_round;
  std::vector<double> n2_by_round;
  bool converged = false;
  std::size_t skipped_states = 0;  // degenerate n_t-partial exclusions
};

struct ThresholdResult {
  double N1 = 0.0;
  double N2 = 0.0;
  ThresholdCertificate cert;
};

// Compression thresholds: suprema over the box |w| <= max_w, |z| <= max_z,
// |S| <= B (intersected with the admissible wedge) of
//   sqrt( (2/A)(|a3|^2/(2A) + |a4|) ),  A = dlam3/dw e^{-h}
// and the 2-family analogue. The conserved-quantity axes enter linearly/
// quadratically, so their sup is attained at the corners (theta1_max,
// theta2_max) and the search is three-dimensional.
ThresholdResult compression_thresholds(const GasParams& gas, double max_w, double max_z,
                                       double theta1_max, double theta2_max, double eps,
                                       const ThresholdOpts& opts = {});

}  // namespace relblow
