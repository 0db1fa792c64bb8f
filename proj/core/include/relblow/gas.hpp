#pragma once

#include "relblow/errors.hpp"

namespace relblow {

// Physical and model constants shared by every module.
//
// gamma : adiabatic exponent (> 1)
// c     : light speed in code units (configurable; admissibility windows scale with it)
// k     : isentropic pressure constant, P = k^2 rho^gamma
// R     : gas constant of the full polytropic law, Cv = R/(gamma-1)
// B     : entropy magnitude bound, |S| <= B
struct GasParams {
  double gamma = 2.0;
  double c = 1.0;
  double k = 1.0;
  double R = 1.0;
  double B = 1.0;

  double cv() const { return R / (gamma - 1.0); }
  double c2() const { return c * c; }

  void validate() const {
    if (!(gamma > 1.0)) throw domain_error("GasParams: gamma must be > 1");
    if (!(c > 0.0)) throw domain_error("GasParams: c must be > 0");
    if (!(k > 0.0)) throw domain_error("GasParams: k must be > 0");
    if (!(R > 0.0)) throw domain_error("GasParams: R must be > 0");
    if (!(B >= 0.0)) throw domain_error("GasParams: B must be >= 0");
  }
};

// Relative tolerance of the implicit EOS root (see eos.hpp).
inline constexpr double tol_eos = 1e-12;

// Densities below this are treated as vacuum by the weight functions.
inline constexpr double default_rho_floor = 1e-12;

}  // namespace relblow
