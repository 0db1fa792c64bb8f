#pragma once

#include <span>

#include "relblow/gas.hpp"

namespace relblow {

// One evaluated EOS state. n solves the implicit relation
//   n^gamma exp(S/Cv) + c^2 (n - rho) = 0
// and P = (gamma-1) n^gamma exp(S/Cv).
struct EosPoint {
  double rho = 0.0;
  double S = 0.0;
  double n = 0.0;
  double P = 0.0;
};

// First and second pressure derivatives in (rho, S), plus the rest-mass
// density derivatives, all in closed form through n(rho, S).
struct EosDerivs {
  double dP_drho = 0.0;
  double dP_dS = 0.0;
  double d2P_drhodS = 0.0;
  double d2P_drho2 = 0.0;
  double dn_drho = 0.0;
  double dn_dS = 0.0;
  bool second_deriv_singular = false;  // d2P_drho2 diverges at rho = 0 for gamma < 2
};

// Barotropic law P = k^2 rho^gamma.
double pressure_isentropic(double rho, const GasParams& gas);

// Unique root n in [0, rho] of the implicit relation; exact 0 at rho = 0.
double rest_mass_density(double rho, double S, const GasParams& gas);

// Full polytropic pressure P(rho, S) via rest_mass_density.
double pressure_full(double rho, double S, const GasParams& gas);

EosPoint eos_point(double rho, double S, const GasParams& gas);

// Closed-form derivative pack. At rho = 0 the finite limits are returned and
// second_deriv_singular marks the gamma < 2 divergence of d2P/drho2.
EosDerivs eos_derivatives(double rho, double S, const GasParams& gas);

// Log-log slope fits of P, dP/drho, dP/dS, d2P/drhodS over a decreasing
// density sequence; the small-rho orders are gamma, gamma-1, gamma, gamma-1.
struct AsymptoticOrders {
  double slope_P = 0.0;
  double slope_dP_drho = 0.0;
  double slope_dP_dS = 0.0;
  double slope_d2P_drhodS = 0.0;
};

AsymptoticOrders asymptotic_orders_check(const GasParams& gas,
                                         std::span<const double> rho_sequence,
                                         double S = 0.0);

}  // namespace relblow
