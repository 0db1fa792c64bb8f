#pragma once

#include <span>
#include <utility>
#include <vector>

#include "relblow/gas.hpp"

namespace relblow {

// Riemann invariants of the 2x2 barotropic system. z - w >= 0, vacuum iff
// z == w; the admissible wedge keeps the sound speed below c.
struct RiemannPairIso {
  double w = 0.0;
  double z = 0.0;
  double gap() const { return z - w; }
};

// Spatial gradients and their weighted versions xi = e^{h1} dz/dx,
// zeta = e^{h2} dw/dx. Signs of (xi, zeta) match (alpha, beta).
struct GradientStateIso {
  double alpha = 0.0;  // dz/dx
  double beta = 0.0;   // dw/dx
  double xi = 0.0;
  double zeta = 0.0;
};

struct WeightsIso {
  double h1 = 0.0;
  double h2 = 0.0;
};

struct LambdaPartialsIso {
  double dl1_dw = 0.0;
  double dl1_dz = 0.0;
  double dl2_dw = 0.0;
  double dl2_dz = 0.0;
};

// Largest admissible invariant gap: (4 c sqrt(g) / (g-1)) Arctan(1/sqrt(g)).
double admissible_gap_max_iso(const GasParams& gas);

// Sound speed sqrt(P') = k sqrt(gamma) rho^{(gamma-1)/2}.
double sound_speed_iso(double rho, const GasParams& gas);

// Closed-form invariant gap z - w for the barotropic law.
double riemann_gap_iso(double rho, const GasParams& gas);

// Same gap by direct quadrature of the defining integral (reference path).
double riemann_gap_iso_quadrature(double rho, const GasParams& gas, double tol = 1e-12);

RiemannPairIso to_riemann_iso(double rho, double u, const GasParams& gas);
std::pair<double, double> from_riemann_iso(const RiemannPairIso& pair, const GasParams& gas);

// lambda1 = (u - s)/(1 - u s / c^2), lambda2 = (u + s)/(1 + u s / c^2).
std::pair<double, double> eigenvalues_iso(double rho, double u, const GasParams& gas);
std::pair<double, double> eigenvalues_iso(const RiemannPairIso& pair, const GasParams& gas);

// Closed-form integrating weights; requires 0 < z - w < admissible max.
WeightsIso weights_h1_h2(const RiemannPairIso& pair, const GasParams& gas);

// Eigenvalue partials in the (w, z) coordinates, via the H1/H2 closed forms.
LambdaPartialsIso lambda_partials_iso(const RiemannPairIso& pair, const GasParams& gas);

// Y = (y/sqrt(1+y^2))^{(3-g)/(2g-2)} (1+y^2)^{(g+1)/(4g-4)}, y = k rho^{(g-1)/2}/c.
// Scale of the Riccati damping coefficient; > 1 for gamma >= 3.
double quantity_Y(double rho, const GasParams& gas);

// Riccati damping rates e^{-h1} dlambda1/dw and e^{-h2} dlambda2/dz.
double riccati_rate_1(const RiemannPairIso& pair, const GasParams& gas);
double riccati_rate_2(const RiemannPairIso& pair, const GasParams& gas);

GradientStateIso gradient_state_iso(const RiemannPairIso& pair, double dz_dx, double dw_dx,
                                    const GasParams& gas);

// 1/xi(t) = 1/xi(0) + integral of the damping rate along the characteristic.
// rate[i] is the damping coefficient sampled at time t[i]; composite
// trapezoidal accumulation. t_star < 0 means no predicted zero crossing.
struct RiccatiReconstruction {
  std::vector<double> inv_xi;
  double t_star = -1.0;
};

RiccatiReconstruction riccati_reciprocal_integral(double xi0, std::span<const double> t,
                                                  std::span<const double> rate);

}  // namespace relblow
