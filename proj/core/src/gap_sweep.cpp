#include "gap_sweep.hpp"

#include <algorithm>
#include <cmath>

#include "eos_state.hpp"
#include "relblow/errors.hpp"
#include "relblow/numerics.hpp"

namespace relblow::detail {

namespace {

// Small-density inversion of F(sigma) ~ (2/(g-1)) sqrt(g(g-1)E) sigma^{(g-1)/2}.
double sigma_from_fhat_asymptotic(double fhat, double S, const GasParams& gas) {
  const double g = gas.gamma;
  const double E = std::exp(S / gas.cv());
  const double coef = 2.0 * std::sqrt(g * (g - 1.0) * E) / (g - 1.0);
  return std::pow(fhat / coef, 2.0 / (g - 1.0));
}

struct PathFactors {
  double eH, eG, D;  // D = e^G - e^H
};

PathFactors path_factors(double u, double s, const GasParams& gas) {
  const double vf = (gas.c + u) / (gas.c - u);
  PathFactors p;
  p.eH = vf * (gas.c - s) / (gas.c + s);
  p.eG = vf * (gas.c + s) / (gas.c - s);
  p.D = vf * 4.0 * gas.c * s / (gas.c2() - s * s);
  return p;
}

}  // namespace

SweepRow run_gap_sweep(double anchor, bool left_anchor, double S,
                       std::span<const double> fhat_queries, const WeightContext& ctx) {
  const GasParams& gas = ctx.gas;
  if (!(ctx.eps > 0.0)) throw domain_error("run_gap_sweep: eps must be positive");
  for (double q : fhat_queries)
    if (!(q > 0.0)) throw domain_error("run_gap_sweep: queries must be positive");

  // merged ascending query list including the eps anchor point
  std::vector<double> merged(fhat_queries.begin(), fhat_queries.end());
  merged.push_back(ctx.eps);
  std::sort(merged.begin(), merged.end());

  const double fhat_start = 1e-3 * std::min(ctx.eps, merged.front());
  const double s_start = std::log(fhat_start);
  const double s_end = std::log(merged.back());

  std::vector<double> s_queries(merged.size());
  for (std::size_t i = 0; i < merged.size(); ++i) s_queries[i] = std::log(merged[i]);

  const double c = gas.c;
  const double c2 = gas.c2();

  // State: [sigma, J_h, J_g, dSF, dSJ, I]
  auto rhs = [&](double s, std::span<const double> y, std::span<double> dy) {
    const double fhat = std::exp(s);
    const double sigma = y[0];
    SigmaState st = sigma_state(sigma, S, gas);
    const double jh_xi = (c + st.s) * (c + st.s) / (2.0 * (c2 * sigma + st.P)) / st.dFdr;
    const double jg_xi = (c - st.s) * (c - st.s) / (2.0 * (c2 * sigma + st.P)) / st.dFdr;
    dy[0] = fhat / st.dFdr;
    dy[1] = fhat * jh_xi;
    dy[2] = fhat * jg_xi;
    dy[3] = fhat * detail::dS_of_dFdr(st, gas) / st.dFdr;
    const double dLam_dS = st.d2PdrdS - st.d2Pdr2 * y[3] / st.dFdr;
    const double djdLam = (st.dPdr - c2) / (4.0 * c2 * st.dPdr * st.s);
    dy[4] = fhat * djdLam * dLam_dS;

    const double u = left_anchor ? c * std::tanh((anchor + fhat) / c)
                                 : c * std::tanh((anchor - fhat) / c);
    PathFactors pf = path_factors(u, st.s, gas);
    const double l1 = u;
    const double l2 = c2 * (u + st.s) / (c2 + u * st.s);
    const double l3 = c2 * (u - st.s) / (c2 - u * st.s);
    const double nt = c * st.n / std::sqrt(c2 - u * u);
    const double dar = da_drho_closed(st, gas);
    if (left_anchor) {
      const double A_h = std::sqrt(pf.eH * pf.D) / (pf.eH + 1.0);
      const double dza = dar / (2.0 * st.dFdr);
      dy[5] = 2.0 * fhat * A_h * std::exp(-y[1]) * nt * dza * (l1 - l2) / (l3 - l2);
    } else {
      const double A_g = std::sqrt(pf.eG * pf.D) / (pf.eG + 1.0);
      const double dwa = -dar / (2.0 * st.dFdr);
      dy[5] = 2.0 * fhat * A_g * std::exp(-y[2]) * nt * dwa * (l1 - l3) / (l3 - l2);
    }
  };

  std::vector<double> y(6, 0.0);
  y[0] = sigma_from_fhat_asymptotic(fhat_start, S, gas);

  std::vector<double> at_sigma(merged.size()), at_Jh(merged.size()), at_Jg(merged.size()),
      at_dSF(merged.size()), at_dSJ(merged.size()), at_I(merged.size());

  const double base_step = std::max(1e-12, (s_end - s_start) / ctx.sweep_steps);
  num::rk4_sweep(rhs, y, s_start, s_queries, base_step,
                 [&](std::size_t qi, double, std::span<const double> yy) {
                   at_sigma[qi] = yy[0];
                   at_Jh[qi] = yy[1];
                   at_Jg[qi] = yy[2];
                   at_dSF[qi] = yy[3];
                   at_dSJ[qi] = yy[4];
                   at_I[qi] = yy[5];
                 });

  // locate the eps anchor among the merged queries
  std::size_t eps_idx =
      std::lower_bound(merged.begin(), merged.end(), ctx.eps) - merged.begin();
  const double Jh_eps = at_Jh[eps_idx];
  const double Jg_eps = at_Jg[eps_idx];
  const double dSJ_eps = at_dSJ[eps_idx];
  const double Icorr = left_anchor ? std::exp(Jh_eps) : std::exp(Jg_eps);

  SweepRow row;
  const std::size_t nq = fhat_queries.size();
  row.sigma.resize(nq);
  row.J_h.resize(nq);
  row.J_g.resize(nq);
  row.dSF.resize(nq);
  row.dSJ.resize(nq);
  row.I.resize(nq);
  row.fhat.assign(fhat_queries.begin(), fhat_queries.end());

  for (std::size_t i = 0; i < nq; ++i) {
    // first merged slot matching this query (duplicates share results)
    std::size_t mi =
        std::lower_bound(merged.begin(), merged.end(), fhat_queries[i]) - merged.begin();
    row.sigma[i] = at_sigma[mi];
    row.J_h[i] = at_Jh[mi] - Jh_eps;
    row.J_g[i] = at_Jg[mi] - Jg_eps;
    row.dSF[i] = at_dSF[mi];
    row.dSJ[i] = at_dSJ[mi] - dSJ_eps;
    row.I[i] = at_I[mi] * Icorr;
  }
  return row;
}

double weight_L_from_row(const SweepRow& row, std::size_t qi, double anchor_w, double S,
                         const GasParams& gas) {
  const double fhat = row.fhat[qi];
  const double u = gas.c * std::tanh((anchor_w + fhat) / gas.c);
  const double n = rest_mass_density(row.sigma[qi], S, gas);
  const double nt = gas.c * n / std::sqrt(gas.c2() - u * u);
  return -row.I[qi] / (nt * nt);
}

double weight_M_from_row(const SweepRow& row, std::size_t qi, double anchor_z, double S,
                         const GasParams& gas) {
  const double fhat = row.fhat[qi];
  const double u = gas.c * std::tanh((anchor_z - fhat) / gas.c);
  const double n = rest_mass_density(row.sigma[qi], S, gas);
  const double nt = gas.c * n / std::sqrt(gas.c2() - u * u);
  return row.I[qi] / (nt * nt);
}

}  // namespace relblow::detail
