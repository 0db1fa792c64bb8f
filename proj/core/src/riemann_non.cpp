#include "relblow/riemann_non.hpp"

#include <cmath>

#include "eos_state.hpp"
#include "gap_sweep.hpp"
#include "relblow/errors.hpp"
#include "relblow/numerics.hpp"

namespace relblow {

using detail::SigmaState;
using detail::sigma_state;

namespace {

void check_state(double rho, double u, double S, const GasParams& gas) {
  if (rho < 0.0) throw domain_error("riemann_non: rho < 0");
  if (!(std::abs(u) < gas.c)) throw domain_error("riemann_non: |u| >= c");
  if (std::abs(S) > gas.B * (1.0 + 1e-12))
    throw domain_error("riemann_non: |S| exceeds entropy bound B");
}

double log_velocity_factor(double u, const GasParams& gas) {
  return std::log((gas.c + u) / (gas.c - u));
}

}  // namespace

double F_half_gap(double rho, double S, const GasParams& gas, double tol) {
  if (rho < 0.0) throw domain_error("F_half_gap: rho < 0");
  if (rho == 0.0) return 0.0;
  const double p = 2.0 / (gas.gamma - 1.0);
  auto f = [&](double tau) {
    const double sigma = std::pow(tau, p);
    SigmaState st = sigma_state(sigma, S, gas);
    return st.dFdr * p * std::pow(tau, p - 1.0);
  };
  return num::integrate(f, 0.0, std::pow(rho, 1.0 / p), tol, tol);
}

double dF_drho(double rho, double S, const GasParams& gas) {
  return sigma_state(rho, S, gas).dFdr;
}

double dF_dS(double rho, double S, const GasParams& gas, double tol) {
  if (rho < 0.0) throw domain_error("dF_dS: rho < 0");
  if (rho == 0.0) return 0.0;
  const double p = 2.0 / (gas.gamma - 1.0);
  auto f = [&](double tau) {
    const double sigma = std::pow(tau, p);
    SigmaState st = sigma_state(sigma, S, gas);
    return detail::dS_of_dFdr(st, gas) * p * std::pow(tau, p - 1.0);
  };
  return num::integrate(f, 0.0, std::pow(rho, 1.0 / p), tol, tol);
}

double d2F_drhodS(double rho, double S, const GasParams& gas) {
  return detail::dS_of_dFdr(sigma_state(rho, S, gas), gas);
}

double rho_from_gap(double half_gap, double S, const GasParams& gas, double tol) {
  if (half_gap < 0.0) throw domain_error("rho_from_gap: negative half gap");
  if (half_gap == 0.0) return 0.0;
  double hi = 1.0;
  while (F_half_gap(hi, S, gas) < half_gap) {
    hi *= 4.0;
    if (hi > 1e12) throw numerical_error("rho_from_gap: half gap beyond the EOS range");
  }
  auto f = [&](double r) { return F_half_gap(r, S, gas) - half_gap; };
  auto df = [&](double r) { return dF_drho(r, S, gas); };
  return num::bracketed_newton(f, df, 0.0, hi, 0.0, tol * std::max(1.0, half_gap));
}

double coupling_a(double rho, double S, const GasParams& gas, double tol) {
  if (rho < 0.0) throw domain_error("coupling_a: rho < 0");
  if (rho == 0.0) return 0.0;
  const double c2 = gas.c2();
  const double p = 2.0 / (gas.gamma - 1.0);
  auto f = [&](double tau) {
    const double sigma = std::pow(tau, p);
    SigmaState st = sigma_state(sigma, S, gas);
    const double den = c2 * sigma + st.P;
    const double integrand =
        -c2 * st.d2PdrdS / (2.0 * st.s * den) + c2 * st.s * st.dPdS / (den * den);
    return integrand * p * std::pow(tau, p - 1.0);
  };
  const double integral = num::integrate(f, 0.0, std::pow(rho, 1.0 / p), tol, tol);
  SigmaState st = sigma_state(rho, S, gas);
  return integral + c2 * st.dPdS / ((st.P + rho * c2) * st.s);
}

double coupling_a_assembled(double rho, double S, const GasParams& gas) {
  if (rho < 0.0) throw domain_error("coupling_a_assembled: rho < 0");
  if (rho == 0.0) return 0.0;
  // dF/dS by central differencing of the half-gap quadrature keeps this route
  // independent of the derivative-integrand path.
  const double hS = 1e-5 * std::max(1.0, std::abs(S));
  const double dFdS_fd = num::deriv_central(
      [&](double s) { return F_half_gap(rho, s, gas, 1e-13); }, S, hS);
  SigmaState st = sigma_state(rho, S, gas);
  return -dFdS_fd + (st.dPdS / st.dPdr) * st.dFdr;
}

double da_drho(double rho, double S, const GasParams& gas) {
  if (!(rho > 0.0)) throw domain_error("da_drho: rho <= 0");
  return detail::da_drho_closed(sigma_state(rho, S, gas), gas);
}

RiemannTriple to_riemann_non(double rho, double u, double S, const GasParams& gas) {
  check_state(rho, u, S, gas);
  SigmaState st = sigma_state(rho, S, gas);
  if (!(st.s < gas.c)) throw domain_error("to_riemann_non: sound speed >= c");
  const double m = 0.5 * gas.c * log_velocity_factor(u, gas);
  const double half = F_half_gap(rho, S, gas);
  return {m - half, m + half, S};
}

std::tuple<double, double, double> from_riemann_non(const RiemannTriple& t,
                                                    const GasParams& gas) {
  if (t.half_gap() < 0.0) throw domain_error("from_riemann_non: z < w");
  const double rho = rho_from_gap(t.half_gap(), t.Shat, gas);
  const double u = gas.c * std::tanh((t.w + t.z) / (2.0 * gas.c));
  check_state(rho, u, t.Shat, gas);
  return {rho, u, t.Shat};
}

PhiJacobian phi_jacobian(double rho, double u, double S, const GasParams& gas) {
  check_state(rho, u, S, gas);
  PhiJacobian j;
  j.dF_drho = dF_drho(rho, S, gas);
  j.dF_dS = dF_dS(rho, S, gas);
  j.dm_du = 2.0 * gas.c / (gas.c2() - u * u);
  return j;
}

std::array<double, 3> eigenvalues_non(double rho, double u, double S, const GasParams& gas) {
  check_state(rho, u, S, gas);
  SigmaState st = sigma_state(rho, S, gas);
  if (!(st.s < gas.c)) throw domain_error("eigenvalues_non: sound speed >= c");
  const double c2 = gas.c2();
  const double l2 = c2 * (u + st.s) / (c2 + u * st.s);
  const double l3 = c2 * (u - st.s) / (c2 - u * st.s);
  return {u, l2, l3};
}

HGState hg_state(double rho, double u, double S, const GasParams& gas) {
  check_state(rho, u, S, gas);
  SigmaState st = sigma_state(rho, S, gas);
  if (!(st.s < gas.c)) throw domain_error("hg_state: sound speed >= c");
  HGState out;
  out.Lambda = st.dPdr;
  const double lv = log_velocity_factor(u, gas);
  out.H = lv + std::log((gas.c - st.s) / (gas.c + st.s));
  out.G = lv + std::log((gas.c + st.s) / (gas.c - st.s));
  return out;
}

std::pair<double, double> lambda23_from_hg(const HGState& s, const GasParams& gas) {
  const double l2 = gas.c * (1.0 - 2.0 / (std::exp(s.G) + 1.0));
  const double l3 = gas.c * (1.0 - 2.0 / (std::exp(s.H) + 1.0));
  return {l2, l3};
}

double n_tilde(double rho, double u, double S, const GasParams& gas) {
  check_state(rho, u, S, gas);
  const double n = rest_mass_density(rho, S, gas);
  return gas.c * n / std::sqrt(gas.c2() - u * u);
}

CoordDerivs coord_derivs(double rho, double u, double S, const GasParams& gas, double tol) {
  return coord_derivs_given_dSF(rho, u, S, gas, dF_dS(rho, S, gas, tol));
}

CoordDerivs coord_derivs_given_dSF(double rho, double u, double S, const GasParams& gas,
                                   double dSF) {
  if (!(rho > 0.0)) throw domain_error("coord_derivs: vacuum state");
  check_state(rho, u, S, gas);
  SigmaState st = sigma_state(rho, S, gas);
  if (!(st.s < gas.c)) throw domain_error("coord_derivs: sound speed >= c");
  const double c = gas.c;
  const double c2 = gas.c2();

  CoordDerivs d;
  d.dLam_dw = -st.d2Pdr2 / (2.0 * st.dFdr);
  d.dLam_dz = st.d2Pdr2 / (2.0 * st.dFdr);
  d.dLam_dS = -st.d2Pdr2 * dSF / st.dFdr + st.d2PdrdS;

  const double q = c * st.d2Pdr2 / (2.0 * (c2 - st.dPdr) * st.s * st.dFdr);
  d.dH_dw = 1.0 / c + q;
  d.dH_dz = 1.0 / c - q;
  d.dG_dw = 1.0 / c - q;
  d.dG_dz = 1.0 / c + q;
  d.dH_dS = -c / ((c2 - st.dPdr) * st.s) * (st.d2PdrdS - st.d2Pdr2 * dSF / st.dFdr);
  d.dG_dS = -d.dH_dS;

  const double dar = detail::da_drho_closed(st, gas);
  d.da_dw = -dar / (2.0 * st.dFdr);
  d.da_dz = dar / (2.0 * st.dFdr);

  const double root = std::sqrt(c2 - u * u);
  d.dnt_dw = -c * st.dndr / (2.0 * st.dFdr * root) + u * st.n / (2.0 * c * root);
  d.dnt_dz = c * st.dndr / (2.0 * st.dFdr * root) + u * st.n / (2.0 * c * root);
  d.dnt_dS = -c * st.dndr * dSF / (st.dFdr * root) + c * st.dndS / root;
  return d;
}

LambdaPartialsNon lambda_partials_non(double rho, double u, double S, const GasParams& gas) {
  CoordDerivs d = coord_derivs(rho, u, S, gas);
  HGState hg = hg_state(rho, u, S, gas);
  const double eH = std::exp(hg.H);
  const double eG = std::exp(hg.G);
  const double f2 = 2.0 * gas.c * eG / ((eG + 1.0) * (eG + 1.0));
  const double f3 = 2.0 * gas.c * eH / ((eH + 1.0) * (eH + 1.0));
  LambdaPartialsNon out;
  out.dl2_dw = f2 * d.dG_dw;
  out.dl2_dz = f2 * d.dG_dz;
  out.dl2_dS = f2 * d.dG_dS;
  out.dl3_dw = f3 * d.dH_dw;
  out.dl3_dz = f3 * d.dH_dz;
  out.dl3_dS = f3 * d.dH_dS;
  return out;
}

namespace {

// J-type integrands in the density variable: dJ/dsigma along fixed S.
double j_sigma(const SigmaState& st, const GasParams& gas, bool plus) {
  const double c = gas.c;
  const double num = plus ? (c + st.s) * (c + st.s) : (c - st.s) * (c - st.s);
  return num / (2.0 * (gas.c2() * st.rho + st.P));
}

struct StateBundle {
  double rho, u;
  SigmaState st;
  double eH, eG, diffGH;  // diffGH = e^G - e^H
};

StateBundle bundle(const RiemannTriple& t, const GasParams& gas) {
  StateBundle b;
  b.rho = rho_from_gap(t.half_gap(), t.Shat, gas);
  b.u = gas.c * std::tanh((t.w + t.z) / (2.0 * gas.c));
  b.st = sigma_state(b.rho, t.Shat, gas);
  if (!(b.st.s < gas.c)) throw domain_error("weights: sound speed >= c");
  const double vf = (gas.c + b.u) / (gas.c - b.u);
  b.eH = vf * (gas.c - b.st.s) / (gas.c + b.st.s);
  b.eG = vf * (gas.c + b.st.s) / (gas.c - b.st.s);
  b.diffGH = vf * 4.0 * gas.c * b.st.s / (gas.c2() - b.st.dPdr);
  return b;
}

}  // namespace

std::pair<double, double> weights_h_g(const RiemannTriple& t, const WeightContext& ctx,
                                      double tol) {
  if (!(ctx.eps > 0.0)) throw domain_error("weights_h_g: eps must be positive");
  if (!(t.half_gap() > 0.0)) throw domain_error("weights_h_g: vacuum state (z == w)");
  const GasParams& gas = ctx.gas;
  StateBundle b = bundle(t, gas);
  const double rho_eps = rho_from_gap(ctx.eps, t.Shat, gas);

  auto Jh = num::integrate(
      [&](double sigma) { return j_sigma(sigma_state(sigma, t.Shat, gas), gas, true); },
      rho_eps, b.rho, tol, tol);
  auto Jg = num::integrate(
      [&](double sigma) { return j_sigma(sigma_state(sigma, t.Shat, gas), gas, false); },
      rho_eps, b.rho, tol, tol);

  const double h =
      -std::log(b.eH + 1.0) + 0.5 * std::log(b.eH * b.diffGH) - Jh;
  const double g =
      -std::log(b.eG + 1.0) + 0.5 * std::log(b.eG * b.diffGH) - Jg;
  return {h, g};
}

std::pair<double, double> weights_L_M(const RiemannTriple& t, const WeightContext& ctx) {
  if (!(t.half_gap() > 0.0)) throw domain_error("weights_L_M: vacuum state (z == w)");
  const double fq[1] = {t.half_gap()};
  detail::SweepRow rowL = detail::run_gap_sweep(t.w, true, t.Shat, fq, ctx);
  detail::SweepRow rowM = detail::run_gap_sweep(t.z, false, t.Shat, fq, ctx);
  const double L = detail::weight_L_from_row(rowL, 0, t.w, t.Shat, ctx.gas);
  const double M = detail::weight_M_from_row(rowM, 0, t.z, t.Shat, ctx.gas);
  return {L, M};
}

WeightsNon weights_h_g_L_M(const RiemannTriple& t, const WeightContext& ctx) {
  auto [h, g] = weights_h_g(t, ctx);
  auto [L, M] = weights_L_M(t, ctx);
  return {h, g, L, M};
}

std::pair<double, double> weights_L_M_reference(const RiemannTriple& t,
                                                const WeightContext& ctx, double tol) {
  const GasParams& gas = ctx.gas;
  const double nt = n_tilde(rho_from_gap(t.half_gap(), t.Shat, gas),
                            gas.c * std::tanh((t.w + t.z) / (2.0 * gas.c)), t.Shat, gas);

  auto integrand_L = [&](double theta) {
    RiemannTriple path{t.w, theta, t.Shat};
    if (path.half_gap() <= 0.0) return 0.0;
    auto [h, g] = weights_h_g(path, ctx, tol);
    auto [rho, u, S] = from_riemann_non(path, gas);
    auto lam = eigenvalues_non(rho, u, S, gas);
    SigmaState st = sigma_state(rho, S, gas);
    const double dza = detail::da_drho_closed(st, gas) / (2.0 * st.dFdr);
    const double ratio = (lam[0] - lam[1]) / (lam[2] - lam[1]);
    return std::exp(h) * n_tilde(rho, u, S, gas) * dza * ratio;
  };
  auto integrand_M = [&](double varsigma) {
    RiemannTriple path{varsigma, t.z, t.Shat};
    if (path.half_gap() <= 0.0) return 0.0;
    auto [h, g] = weights_h_g(path, ctx, tol);
    auto [rho, u, S] = from_riemann_non(path, gas);
    auto lam = eigenvalues_non(rho, u, S, gas);
    SigmaState st = sigma_state(rho, S, gas);
    const double dwa = -detail::da_drho_closed(st, gas) / (2.0 * st.dFdr);
    const double ratio = (lam[0] - lam[2]) / (lam[2] - lam[1]);
    return std::exp(g) * n_tilde(rho, u, S, gas) * dwa * ratio;
  };

  const double L = -num::integrate(integrand_L, t.w, t.z, tol, tol) / (nt * nt);
  // M = -(1/nt^2) int_z^w ... = +(1/nt^2) int_w^z ...
  const double M = num::integrate(integrand_M, t.w, t.z, tol, tol) / (nt * nt);
  return {L, M};
}

WeightPartials weight_partials(const RiemannTriple& t, const WeightContext& ctx) {
  const GasParams& gas = ctx.gas;
  StateBundle b = bundle(t, gas);
  CoordDerivs cd = coord_derivs(b.rho, b.u, t.Shat, gas);
  const double jh = j_sigma(b.st, gas, true) / b.st.dFdr;   // Xi-space integrand
  const double jg = j_sigma(b.st, gas, false) / b.st.dFdr;

  // d/dS of the path integral: dSJ = int (Lam - c^2)/(4 c^2 Lam^{3/2}) dLam/dS dXi,
  // same for J_h and J_g. The inner dF/dS makes this a nested quadrature.
  const double rho_eps = rho_from_gap(ctx.eps, t.Shat, gas);
  auto dSJ_int = [&](double sigma) {
    SigmaState st = sigma_state(sigma, t.Shat, gas);
    const double dSF_sigma = dF_dS(sigma, t.Shat, gas, 1e-11);
    const double dLam_dS = st.d2PdrdS - st.d2Pdr2 * dSF_sigma / st.dFdr;
    const double djdLam =
        (st.dPdr - gas.c2()) / (4.0 * gas.c2() * st.dPdr * st.s);
    return djdLam * dLam_dS * st.dFdr;  // back to the sigma measure
  };
  const double dSJ = num::integrate(dSJ_int, rho_eps, b.rho, 1e-11, 1e-11);

  const double eH = b.eH, eG = b.eG, D = b.diffGH;
  WeightPartials out;
  auto dh_dir = [&](double dH, double dG) {
    return -eH * dH / (eH + 1.0) + (eG * (dG + dH) - 2.0 * eH * dH) / (2.0 * D);
  };
  auto dg_dir = [&](double dH, double dG) {
    return -eG * dG / (eG + 1.0) + (2.0 * eG * dG - eH * (dG + dH)) / (2.0 * D);
  };
  out.dh_dw = dh_dir(cd.dH_dw, cd.dG_dw) + 0.5 * jh;
  out.dh_dz = dh_dir(cd.dH_dz, cd.dG_dz) - 0.5 * jh;
  out.dh_dS = dh_dir(cd.dH_dS, cd.dG_dS) - dSJ;
  out.dg_dw = dg_dir(cd.dH_dw, cd.dG_dw) + 0.5 * jg;
  out.dg_dz = dg_dir(cd.dH_dz, cd.dG_dz) - 0.5 * jg;
  out.dg_dS = dg_dir(cd.dH_dS, cd.dG_dS) - dSJ;
  return out;
}

LMPartials lm_partials(const RiemannTriple& t, const WeightContext& ctx) {
  const GasParams& gas = ctx.gas;
  StateBundle b = bundle(t, gas);
  CoordDerivs cd = coord_derivs(b.rho, b.u, t.Shat, gas);
  auto lam = eigenvalues_non(b.rho, b.u, t.Shat, gas);
  auto [h, g] = weights_h_g(t, ctx);
  auto [L, M] = weights_L_M(t, ctx);
  const double nt = gas.c * b.st.n / std::sqrt(gas.c2() - b.u * b.u);
  const double dar = detail::da_drho_closed(b.st, gas);
  const double dza = dar / (2.0 * b.st.dFdr);
  const double dwa = -dza;

  LMPartials out;
  // Exact endpoint relations: the integrands evaluated at the state itself.
  out.dL_dz = -2.0 * (cd.dnt_dz / nt) * L -
              std::exp(h) * dza * ((lam[0] - lam[1]) / (lam[2] - lam[1])) / nt;
  out.dM_dw = -2.0 * (cd.dnt_dw / nt) * M -
              std::exp(g) * dwa * ((lam[0] - lam[2]) / (lam[2] - lam[1])) / nt;

  // Remaining partials: Richardson-extrapolated central differences of the
  // sweep evaluation.
  auto richardson = [](auto&& f, double x, double hstep) {
    const double d1 = (f(x + hstep) - f(x - hstep)) / (2.0 * hstep);
    const double d2 = (f(x + 0.5 * hstep) - f(x - 0.5 * hstep)) / hstep;
    return (4.0 * d2 - d1) / 3.0;
  };
  const double hw = 3e-3 * std::max(1.0, std::abs(t.w));
  const double hS = 3e-3 * std::max(0.1, std::abs(t.Shat));
  out.dL_dw = richardson(
      [&](double wv) {
        return weights_L_M(RiemannTriple{wv, t.z, t.Shat}, ctx).first;
      },
      t.w, hw);
  out.dL_dS = richardson(
      [&](double Sv) {
        return weights_L_M(RiemannTriple{t.w, t.z, Sv}, ctx).first;
      },
      t.Shat, hS);
  out.dM_dz = richardson(
      [&](double zv) {
        return weights_L_M(RiemannTriple{t.w, zv, t.Shat}, ctx).second;
      },
      t.z, hw);
  out.dM_dS = richardson(
      [&](double Sv) {
        return weights_L_M(RiemannTriple{t.w, t.z, Sv}, ctx).second;
      },
      t.Shat, hS);
  return out;
}

GradientStateNon gradient_state_non(const RiemannTriple& t, double dw_dx, double dz_dx,
                                    double dS_dx, const WeightContext& ctx) {
  const GasParams& gas = ctx.gas;
  auto [rho, u, S] = from_riemann_non(t, gas);
  const double a = coupling_a(rho, S, gas);
  auto [h, g] = weights_h_g(t, ctx);
  auto [L, M] = weights_L_M(t, ctx);

  GradientStateNon out;
  out.alpha = dw_dx;
  out.beta = dz_dx;
  out.eta = dS_dx;
  out.alpha_t = out.alpha - a * out.eta;
  out.beta_t = out.beta + a * out.eta;
  out.n_t = n_tilde(rho, u, S, gas);
  out.r = std::exp(h) * out.alpha_t - L * out.eta * out.n_t;
  out.q = std::exp(g) * out.beta_t - M * out.eta * out.n_t;
  return out;
}

namespace {

struct CoeffIngredients {
  double a = 0.0;
  double h = 0.0, g = 0.0, L = 0.0, M = 0.0;
  double l1 = 0.0, l2 = 0.0, l3 = 0.0;
  LambdaPartialsNon lp;
  CoordDerivs cd;
  WeightPartials wp;
  LMPartials lmp;
};

CoeffIngredients gather(const RiemannTriple& t, const WeightContext& ctx) {
  const GasParams& gas = ctx.gas;
  CoeffIngredients ing;
  auto [rho, u, S] = from_riemann_non(t, gas);
  ing.a = coupling_a(rho, S, gas);
  auto [h, g] = weights_h_g(t, ctx);
  ing.h = h;
  ing.g = g;
  auto [L, M] = weights_L_M(t, ctx);
  ing.L = L;
  ing.M = M;
  auto lam = eigenvalues_non(rho, u, S, gas);
  ing.l1 = lam[0];
  ing.l2 = lam[1];
  ing.l3 = lam[2];
  ing.lp = lambda_partials_non(rho, u, S, gas);
  ing.cd = coord_derivs(rho, u, S, gas);
  ing.wp = weight_partials(t, ctx);
  ing.lmp = lm_partials(t, ctx);
  return ing;
}

CoefficientsAB assemble_coefficients(const CoeffIngredients& ing,
                                     const ConservedAlongFlow& conserved, double eta,
                                     double n_t) {
  const double a = ing.a;
  const double l1 = ing.l1, l2 = ing.l2, l3 = ing.l3;
  const double d3S = (l3 - l1) * eta;
  const double d2S = (l2 - l1) * eta;
  const double d3w = a * d3S;
  const double d2z = -a * d2S;
  const double cons3 = (l3 - l1) * conserved.theta2 * n_t * n_t;
  const double cons2 = (l2 - l1) * conserved.theta2 * n_t * n_t;
  const double eh = std::exp(ing.h);
  const double eg = std::exp(ing.g);

  if (ing.cd.dnt_dz == 0.0 || ing.cd.dnt_dw == 0.0)
    throw numerical_error("coefficients_ab: degenerate n_t partial");

  CoefficientsAB c;
  c.a0 = eh * (d3S * (a * ing.wp.dh_dw + ing.wp.dh_dS) -
               ing.lp.dl3_dz * a * d2S / (l3 - l2) -
               eta * (a * ing.lp.dl3_dw - ing.lp.dl3_dS) - eta * ing.cd.da_dw * (l1 - l3));
  c.a1 = eh * eta * ing.cd.da_dz * ((l1 - l2) / (l3 - l2)) *
         ((ing.cd.dnt_dw / ing.cd.dnt_dz) * d3w + (ing.cd.dnt_dS / ing.cd.dnt_dz) * d3S -
          a * d2S - eta * a * (l3 - l2));
  c.a2 = n_t * eta *
             ((ing.cd.dnt_dw / ing.cd.dnt_dz) * d3w * ing.lmp.dL_dz +
              (ing.cd.dnt_dS / ing.cd.dnt_dz) * d3S * ing.lmp.dL_dz -
              d3w * ing.lmp.dL_dw - ing.lmp.dL_dS * d3S) -
         ing.L * n_t * cons3;
  c.a3 = (c.a0 - 2.0 * ing.lp.dl3_dw * ing.L * n_t * eta) / eh;
  c.a4 = ing.L * eta * n_t * c.a0 / eh + c.a1 + c.a2 -
         ing.lp.dl3_dw * ing.L * ing.L * eta * eta * n_t * n_t / eh;

  c.b0 = eg * (d2S * (-a * ing.wp.dg_dz + ing.wp.dg_dS) -
               ing.lp.dl2_dw * a * d3S / (l3 - l2) +
               eta * (a * ing.lp.dl2_dz - ing.lp.dl2_dS) + eta * ing.cd.da_dz * (l1 - l2));
  c.b1 = eg * eta * ing.cd.da_dw * ((l1 - l3) / (l3 - l2)) *
         ((ing.cd.dnt_dz / ing.cd.dnt_dw) * d2z + (ing.cd.dnt_dS / ing.cd.dnt_dw) * d2S +
          a * d3S - eta * a * (l3 - l2));
  c.b2 = n_t * eta *
             ((ing.cd.dnt_dz / ing.cd.dnt_dw) * d2z * ing.lmp.dM_dw +
              (ing.cd.dnt_dS / ing.cd.dnt_dw) * d2S * ing.lmp.dM_dw -
              d2z * ing.lmp.dM_dz - ing.lmp.dM_dS * d2S) -
         ing.M * n_t * cons2;
  c.b3 = (c.b0 - 2.0 * ing.lp.dl2_dz * ing.M * n_t * eta) / eg;
  c.b4 = ing.M * eta * n_t * c.b0 / eg + c.b1 + c.b2 -
         ing.lp.dl2_dz * ing.M * ing.M * eta * eta * n_t * n_t / eg;
  return c;
}

}  // namespace

CoefficientsAB coefficients_ab(const RiemannTriple& t, const ConservedAlongFlow& conserved,
                               double eta, double n_t, const WeightContext& ctx) {
  return assemble_coefficients(gather(t, ctx), conserved, eta, n_t);
}

OdeRhs decoupled_ode_rhs_r(double r, double N1, const RiemannTriple& t,
                           const ConservedAlongFlow& conserved, double eta, double n_t,
                           const WeightContext& ctx) {
  CoeffIngredients ing = gather(t, ctx);
  CoefficientsAB c = assemble_coefficients(ing, conserved, eta, n_t);
  OdeRhs out;
  out.damping = ing.lp.dl3_dw * std::exp(-ing.h);
  out.quadratic = -out.damping * r * r + c.a3 * r + c.a4;
  out.comparison = -0.5 * out.damping * (r * r - N1 * N1);
  return out;
}

OdeRhs decoupled_ode_rhs_q(double q, double N2, const RiemannTriple& t,
                           const ConservedAlongFlow& conserved, double eta, double n_t,
                           const WeightContext& ctx) {
  CoeffIngredients ing = gather(t, ctx);
  CoefficientsAB c = assemble_coefficients(ing, conserved, eta, n_t);
  OdeRhs out;
  out.damping = ing.lp.dl2_dz * std::exp(-ing.g);
  out.quadratic = -out.damping * q * q + c.b3 * q + c.b4;
  out.comparison = -0.5 * out.damping * (q * q - N2 * N2);
  return out;
}

}  // namespace relblow
