#pragma once

// Internal: full EOS evaluation at one (rho, S), shared by the weight and
// threshold machinery.

#include <cmath>

#include "relblow/eos.hpp"
#include "relblow/gas.hpp"

namespace relblow::detail {

struct SigmaState {
  double rho = 0.0;
  double S = 0.0;
  double n = 0.0;
  double P = 0.0;
  double dPdr = 0.0;
  double dPdS = 0.0;
  double d2PdrdS = 0.0;
  double d2Pdr2 = 0.0;
  double dndr = 0.0;
  double dndS = 0.0;
  double s = 0.0;     // sound speed sqrt(dP/drho)
  double dFdr = 0.0;  // c^2 s / (c^2 rho + P)
};

inline SigmaState sigma_state(double rho, double S, const GasParams& gas) {
  SigmaState st;
  st.rho = rho;
  st.S = S;
  EosPoint pt = eos_point(rho, S, gas);
  st.n = pt.n;
  st.P = pt.P;
  EosDerivs d = eos_derivatives(rho, S, gas);
  st.dPdr = d.dP_drho;
  st.dPdS = d.dP_dS;
  st.d2PdrdS = d.d2P_drhodS;
  st.d2Pdr2 = d.d2P_drho2;
  st.dndr = d.dn_drho;
  st.dndS = d.dn_dS;
  st.s = std::sqrt(st.dPdr);
  st.dFdr = gas.c2() * st.s / (gas.c2() * rho + st.P);
  return st;
}

// d/dS of dF/drho at fixed rho, closed form.
inline double dS_of_dFdr(const SigmaState& st, const GasParams& gas) {
  const double c2 = gas.c2();
  const double den = c2 * st.rho + st.P;
  return c2 * st.d2PdrdS / (2.0 * st.s * den) - c2 * st.s * st.dPdS / (den * den);
}

// da/drho closed form: a = -dF/dS + c^2 dP/dS / ((P + rho c^2) sqrt(dP/drho)).
inline double da_drho_closed(const SigmaState& st, const GasParams& gas) {
  const double c2 = gas.c2();
  const double den = st.P + st.rho * c2;
  const double t1 = -dS_of_dFdr(st, gas);
  const double t2 = c2 * st.d2PdrdS / (den * st.s);
  const double t3 = -c2 * st.dPdS * (st.dPdr + c2) / (den * den * st.s);
  const double t4 = -c2 * st.dPdS * st.d2Pdr2 / (2.0 * den * st.dPdr * st.s);
  return t1 + t2 + t3 + t4;
}

}  // namespace relblow::detail
