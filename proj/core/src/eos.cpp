#include "relblow/eos.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "relblow/errors.hpp"
#include "relblow/numerics.hpp"

namespace relblow {

double pressure_isentropic(double rho, const GasParams& gas) {
  if (rho < 0.0) throw domain_error("pressure_isentropic: rho < 0");
  return gas.k * gas.k * std::pow(rho, gas.gamma);
}

double rest_mass_density(double rho, double S, const GasParams& gas) {
  if (rho < 0.0) throw domain_error("rest_mass_density: rho < 0");
  if (std::abs(S) > gas.B * (1.0 + 1e-12))
    throw domain_error("rest_mass_density: |S| exceeds entropy bound B");
  if (rho == 0.0) return 0.0;

  const double E = std::exp(S / gas.cv());
  const double c2 = gas.c2();
  const double g = gas.gamma;

  // G(n) = n^g E + c^2 (n - rho), strictly increasing on [0, rho]:
  // G(0) = -c^2 rho < 0, G(rho) = rho^g E > 0.
  auto G = [&](double n) { return std::pow(n, g) * E + c2 * (n - rho); };
  auto dG = [&](double n) { return g * std::pow(n, g - 1.0) * E + c2; };

  const double ftol = tol_eos * std::max(1.0, c2 * rho);
  double n = num::bracketed_newton(G, dG, 0.0, rho, 0.0, ftol);
  return n;
}

double pressure_full(double rho, double S, const GasParams& gas) {
  return eos_point(rho, S, gas).P;
}

EosPoint eos_point(double rho, double S, const GasParams& gas) {
  EosPoint pt;
  pt.rho = rho;
  pt.S = S;
  pt.n = rest_mass_density(rho, S, gas);
  pt.P = (gas.gamma - 1.0) * std::pow(pt.n, gas.gamma) * std::exp(S / gas.cv());
  return pt;
}

EosDerivs eos_derivatives(double rho, double S, const GasParams& gas) {
  if (rho < 0.0) throw domain_error("eos_derivatives: rho < 0");
  const double g = gas.gamma;
  const double c2 = gas.c2();
  const double cv = gas.cv();
  const double E = std::exp(S / cv);

  EosDerivs d;
  if (rho == 0.0) {
    d.dn_drho = 1.0;
    // dP/drho, dP/dS, d2P/drhodS all vanish; d2P/drho2 ~ n^{gamma-2}.
    if (g < 2.0) {
      d.second_deriv_singular = true;
      d.d2P_drho2 = std::numeric_limits<double>::infinity();
    } else if (g == 2.0) {
      d.d2P_drho2 = g * (g - 1.0) * (g - 1.0) * E;  // c^6/(c^2)^3 = 1
    }
    return d;
  }

  const double n = rest_mass_density(rho, S, gas);
  const double x = std::pow(n, g - 1.0) * E;  // n^{gamma-1} exp(S/Cv)
  const double den = g * x + c2;

  d.dn_drho = c2 / den;
  d.dn_dS = -(std::pow(n, g) * E) / (cv * den);
  d.dP_drho = c2 * g * (g - 1.0) * x / den;
  d.dP_dS = c2 * (g - 1.0) * std::pow(n, g) * E / (cv * den);
  d.d2P_drhodS = c2 * c2 * g * (g - 1.0) * x * (c2 + x) / (cv * den * den * den);
  d.d2P_drho2 =
      c2 * c2 * c2 * g * (g - 1.0) * (g - 1.0) * std::pow(n, g - 2.0) * E / (den * den * den);
  return d;
}

AsymptoticOrders asymptotic_orders_check(const GasParams& gas,
                                         std::span<const double> rho_sequence, double S) {
  if (rho_sequence.size() < 4)
    throw domain_error("asymptotic_orders_check: need at least 4 densities");
  for (std::size_t i = 0; i < rho_sequence.size(); ++i) {
    if (!(rho_sequence[i] > 0.0))
      throw domain_error("asymptotic_orders_check: densities must be positive");
    if (i > 0 && !(rho_sequence[i] < rho_sequence[i - 1]))
      throw domain_error("asymptotic_orders_check: sequence must be decreasing");
  }
  if (rho_sequence.front() / rho_sequence.back() < 1e3)
    throw domain_error("asymptotic_orders_check: sequence must span >= 3 decades");

  std::vector<double> P, dPdr, dPdS, d2PdrdS;
  P.reserve(rho_sequence.size());
  for (double r : rho_sequence) {
    P.push_back(pressure_full(r, S, gas));
    EosDerivs d = eos_derivatives(r, S, gas);
    dPdr.push_back(d.dP_drho);
    dPdS.push_back(std::abs(d.dP_dS));
    d2PdrdS.push_back(std::abs(d.d2P_drhodS));
  }
  std::vector<double> rs(rho_sequence.begin(), rho_sequence.end());
  AsymptoticOrders out;
  out.slope_P = num::loglog_slope(rs, P);
  out.slope_dP_drho = num::loglog_slope(rs, dPdr);
  out.slope_dP_dS = num::loglog_slope(rs, dPdS);
  out.slope_d2P_drhodS = num::loglog_slope(rs, d2PdrdS);
  return out;
}

}  // namespace relblow
