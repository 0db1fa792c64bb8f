#include "relblow/thresholds.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>

#include "eos_state.hpp"
#include "gap_sweep.hpp"
#include "relblow/errors.hpp"
#include "relblow/numerics.hpp"

namespace relblow {

using detail::sigma_state;
using detail::SigmaState;

namespace {

// integrand of the half-gap integral at fixed S
double gap_integrand(double sigma, double S, const GasParams& gas) {
  SigmaState st = sigma_state(sigma, S, gas);
  return st.dFdr;
}

double inf_over_S(double sigma, const GasParams& gas) {
  if (gas.B == 0.0) return gap_integrand(sigma, 0.0, gas);
  auto f = [&](double S) { return gap_integrand(sigma, S, gas); };
  double Smin = num::golden_min(f, -gas.B, gas.B, 1e-10 * std::max(1.0, gas.B));
  return f(Smin);
}

}  // namespace

double psi_lower_gap(double rho, const GasParams& gas, double tol) {
  if (rho < 0.0) throw domain_error("psi_lower_gap: rho < 0");
  if (rho == 0.0) return 0.0;
  const double p = 2.0 / (gas.gamma - 1.0);
  auto f = [&](double tau) {
    const double sigma = std::pow(tau, p);
    return inf_over_S(sigma, gas) * p * std::pow(tau, p - 1.0);
  };
  return num::integrate(f, 0.0, std::pow(rho, 1.0 / p), tol, tol);
}

double psi_inverse(double value, const GasParams& gas, double tol) {
  if (value < 0.0) throw domain_error("psi_inverse: negative value");
  if (value == 0.0) return 0.0;
  double hi = 1.0;
  while (psi_lower_gap(hi, gas) < value) {
    hi *= 4.0;
    if (hi > 1e14) throw numerical_error("psi_inverse: value out of range");
  }
  auto f = [&](double r) { return psi_lower_gap(r, gas) - value; };
  auto df = [&](double r) { return inf_over_S(r, gas); };
  return num::bracketed_newton(f, df, 0.0, hi, 0.0, tol * std::max(1.0, value));
}

namespace {

// Grid maximization with refinement around the top cells; 2-D (x possibly
// log-scaled) helper shared by Psi and K.
struct GridMax2D {
  double value = 0.0;
  double arg_x = 0.0;
  double arg_y = 0.0;
};

GridMax2D grid_max_2d(const std::function<double(double, double)>& f, double xlo,
                      double xhi, double ylo, double yhi, bool log_x, int n,
                      int rounds, double refine_tol, GridMaxCertificate* cert) {
  GridMax2D best;
  double cur_xlo = xlo, cur_xhi = xhi, cur_ylo = ylo, cur_yhi = yhi;
  double prev = -std::numeric_limits<double>::infinity();
  for (int round = 0; round < rounds; ++round) {
    double bx = cur_xlo, by = cur_ylo, bv = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      double tx = n == 1 ? 0.5 : static_cast<double>(i) / (n - 1);
      double x = log_x ? std::exp(std::log(cur_xlo) +
                                  tx * (std::log(cur_xhi) - std::log(cur_xlo)))
                       : cur_xlo + tx * (cur_xhi - cur_xlo);
      for (int j = 0; j < n; ++j) {
        double ty = n == 1 ? 0.5 : static_cast<double>(j) / (n - 1);
        double y = cur_ylo + ty * (cur_yhi - cur_ylo);
        double v = f(x, y);
        if (v > bv) {
          bv = v;
          bx = x;
          by = y;
        }
      }
    }
    if (bv > best.value) best = {bv, bx, by};
    if (cert) cert->by_round.push_back(best.value);
    double rel = std::abs(best.value - prev) / std::max(1e-300, std::abs(best.value));
    if (round > 0 && rel < refine_tol) {
      if (cert) {
        cert->converged = true;
        cert->final_rel_change = rel;
      }
      break;
    }
    prev = best.value;
    // zoom around the argmax
    double wx = log_x ? std::sqrt(cur_xhi / cur_xlo) : 0.25 * (cur_xhi - cur_xlo);
    if (log_x) {
      double fac = std::pow(wx, 0.5);
      cur_xlo = std::max(xlo, bx / fac);
      cur_xhi = std::min(xhi, bx * fac);
    } else {
      cur_xlo = std::max(xlo, bx - 0.5 * wx);
      cur_xhi = std::min(xhi, bx + 0.5 * wx);
    }
    double wy = 0.25 * (cur_yhi - cur_ylo);
    cur_ylo = std::max(ylo, by - wy);
    cur_yhi = std::min(yhi, by + wy);
    if (cert) cert->final_rel_change = rel;
  }
  return best;
}

}  // namespace

double Psi_gap_ratio_max(double kappa, const GasParams& gas, GridMaxCertificate* cert) {
  if (!(kappa > 0.0)) throw domain_error("Psi_gap_ratio_max: kappa <= 0");
  auto ratio = [&](double rho, double S) {
    SigmaState st = sigma_state(rho, S, gas);
    double F = F_half_gap(rho, S, gas, 1e-11);
    return st.s / F;  // 2 sqrt(dP/drho)/(z-w) = sqrt(dP/drho)/F
  };
  const double Slo = -gas.B, Shi = gas.B == 0.0 ? 1e-12 : gas.B;
  GridMax2D m = grid_max_2d(ratio, 1e-10 * kappa, kappa, Slo, Shi, true, 25, 4, 0.002,
                            cert);
  return m.value;
}

double sonic_density_sup(const GasParams& gas) {
  const double g = gas.gamma;
  if (g <= 2.0) return std::numeric_limits<double>::infinity();
  const double E = std::exp(gas.B / gas.cv());
  const double x_sonic = gas.c2() / (g * (g - 2.0));
  const double n_sonic = std::pow(x_sonic / E, 1.0 / (g - 1.0));
  return n_sonic + std::pow(n_sonic, g) * E / gas.c2();
}

double coupling_bound_K(const GasParams& gas, GridMaxCertificate* cert) {
  auto ratio = [&](double rho, double S) {
    double gap = 2.0 * F_half_gap(rho, S, gas, 1e-11);
    if (!(gap > 0.0)) return 0.0;
    return std::abs(coupling_a(rho, S, gas, 1e-11)) / gap;
  };
  const double Esup = sonic_density_sup(gas);
  double rho_hi = std::isfinite(Esup) ? 0.999 * Esup : 16.0;
  const double Slo = -gas.B, Shi = gas.B == 0.0 ? 1e-12 : gas.B;
  GridMax2D m{};
  if (!std::isfinite(Esup)) {
    // expand until the maximizer is interior; |a|/(z-w) decays at large rho
    for (int tries = 0; tries < 8; ++tries) {
      m = grid_max_2d(ratio, 1e-10 * rho_hi, rho_hi, Slo, Shi, true, 25, 1, 0.0, nullptr);
      if (m.arg_x < 0.5 * rho_hi) break;
      rho_hi *= 8.0;
    }
  }
  if (cert) cert->by_round.clear();
  m = grid_max_2d(ratio, 1e-10 * rho_hi, rho_hi, Slo, Shi, true, 25, 4, 0.002, cert);
  return m.value;
}

CriteriaConstants criteria_constants(const DataBounds& data, const GasParams& gas) {
  CriteriaConstants out;
  out.E = sonic_density_sup(gas);
  out.K = coupling_bound_K(gas);
  out.V = std::exp(out.K * data.tv_S0);
  const double K = out.K, V = out.V, tv = data.tv_S0;
  out.U1 = data.sup_abs_w0 * V + K * V * V * data.sup_abs_z0 * tv;
  out.U2 = data.sup_abs_z0 * V + K * V * V * data.sup_abs_w0 * tv;
  const double qfac = K * K * V * V * tv * tv;
  out.max_w = out.U1 + qfac * std::exp(qfac) * out.U1;
  out.max_z = out.U2 + qfac * std::exp(qfac) * out.U2;
  const double target = 0.5 * (out.max_z + out.max_w);
  out.M2 = psi_inverse(target, gas);
  out.assumption_lhs = Psi_gap_ratio_max(out.M2, gas) * target;
  out.assumption_margin = gas.c - out.assumption_lhs;
  out.assumption_ok = out.assumption_lhs < gas.c;
  return out;
}

// ---------------------------------------------------------------------------
// N1/N2 grid search
// ---------------------------------------------------------------------------

namespace {

struct Box3 {
  double wlo, whi, zlo, zhi, Slo, Shi;
};

struct RoundResult {
  double phi1_max = 0.0;
  double phi2_max = 0.0;
  // argmax and top-cell bounding boxes for the next refinement round
  Box3 top_box{0, 0, 0, 0, 0, 0};
  bool any_valid = false;
  std::size_t skipped = 0;
};

struct PerState {
  double phi1 = -1.0;
  double phi2 = -1.0;
};

double richardson4(double fp, double fm, double fph, double fmh, double h) {
  const double d1 = (fp - fm) / (2.0 * h);
  const double d2 = (fph - fmh) / h;
  return (4.0 * d2 - d1) / 3.0;
}

RoundResult threshold_round(const GasParams& gas, const Box3& box, double theta1,
                            double theta2, const WeightContext& wctx, int n,
                            double gap_floor) {
  const double c = gas.c;
  const double c2 = gas.c2();
  std::vector<double> ws(n), zs(n), Ss(n);
  for (int i = 0; i < n; ++i) {
    double t = n == 1 ? 0.5 : static_cast<double>(i) / (n - 1);
    ws[i] = box.wlo + t * (box.whi - box.wlo);
    zs[i] = box.zlo + t * (box.zhi - box.zlo);
    Ss[i] = box.Slo + t * (box.Shi - box.Slo);
  }
  const double extent = std::max(1e-12, box.zhi - box.wlo);
  const double dw = 1e-3 * extent;
  const double dS = std::max(1e-6, 1e-3 * (box.Shi - box.Slo + 1e-3));

  auto idx = [&](int i, int j, int k) { return (static_cast<std::size_t>(k) * n + i) * n + j; };
  const std::size_t total = static_cast<std::size_t>(n) * n * n;
  std::vector<double> Lv(total, 0.0), dLdw(total, 0.0), dLdS(total, 0.0);
  std::vector<double> Mv(total, 0.0), dMdz(total, 0.0), dMdS(total, 0.0);
  std::vector<double> sig(total, 0.0), Jh(total, 0.0), Jg(total, 0.0), dSFv(total, 0.0),
      dSJv(total, 0.0);
  std::vector<char> valid(total, 0);

  // L-side sweeps: anchor w_i at entropy S_k, queries over z_j.
  num::parallel_for(static_cast<std::size_t>(n) * n, [&](std::size_t flat) {
    const int i = static_cast<int>(flat % n);
    const int k = static_cast<int>(flat / n);
    std::vector<int> js;
    std::vector<double> q;
    for (int j = 0; j < n; ++j) {
      const double gap = zs[j] - ws[i];
      if (gap > gap_floor) {
        js.push_back(j);
        q.push_back(0.5 * gap);
      }
    }
    if (js.empty()) return;
    auto sweep_L = [&](double anchor, double S) {
      std::vector<double> qq(q);
      if (anchor != ws[i]) {
        for (std::size_t m = 0; m < js.size(); ++m) qq[m] = 0.5 * (zs[js[m]] - anchor);
      }
      return detail::run_gap_sweep(anchor, true, S, qq, wctx);
    };
    detail::SweepRow base = sweep_L(ws[i], Ss[k]);
    detail::SweepRow wp = sweep_L(ws[i] + dw, Ss[k]);
    detail::SweepRow wm = sweep_L(ws[i] - dw, Ss[k]);
    detail::SweepRow wph = sweep_L(ws[i] + 0.5 * dw, Ss[k]);
    detail::SweepRow wmh = sweep_L(ws[i] - 0.5 * dw, Ss[k]);
    detail::SweepRow Sp = sweep_L(ws[i], Ss[k] + dS);
    detail::SweepRow Sm = sweep_L(ws[i], Ss[k] - dS);
    detail::SweepRow Sph = sweep_L(ws[i], Ss[k] + 0.5 * dS);
    detail::SweepRow Smh = sweep_L(ws[i], Ss[k] - 0.5 * dS);
    for (std::size_t m = 0; m < js.size(); ++m) {
      const int j = js[m];
      const std::size_t id = idx(i, j, k);
      Lv[id] = detail::weight_L_from_row(base, m, ws[i], Ss[k], gas);
      dLdw[id] = richardson4(detail::weight_L_from_row(wp, m, ws[i] + dw, Ss[k], gas),
                             detail::weight_L_from_row(wm, m, ws[i] - dw, Ss[k], gas),
                             detail::weight_L_from_row(wph, m, ws[i] + 0.5 * dw, Ss[k], gas),
                             detail::weight_L_from_row(wmh, m, ws[i] - 0.5 * dw, Ss[k], gas),
                             dw);
      dLdS[id] = richardson4(detail::weight_L_from_row(Sp, m, ws[i], Ss[k] + dS, gas),
                             detail::weight_L_from_row(Sm, m, ws[i], Ss[k] - dS, gas),
                             detail::weight_L_from_row(Sph, m, ws[i], Ss[k] + 0.5 * dS, gas),
                             detail::weight_L_from_row(Smh, m, ws[i], Ss[k] - 0.5 * dS, gas),
                             dS);
      sig[id] = base.sigma[m];
      Jh[id] = base.J_h[m];
      Jg[id] = base.J_g[m];
      dSFv[id] = base.dSF[m];
      dSJv[id] = base.dSJ[m];
      valid[id] = 1;
    }
  });

  // M-side sweeps: anchor z_j, queries over w_i (descending w = ascending gap).
  num::parallel_for(static_cast<std::size_t>(n) * n, [&](std::size_t flat) {
    const int j = static_cast<int>(flat % n);
    const int k = static_cast<int>(flat / n);
    // descending w gives ascending half-gap queries
    std::vector<int> is;
    std::vector<double> q;
    for (int i = n - 1; i >= 0; --i) {
      const double gap = zs[j] - ws[i];
      if (gap > gap_floor) {
        is.push_back(i);
        q.push_back(0.5 * gap);
      }
    }
    if (is.empty()) return;
    auto sweep_M = [&](double anchor, double S) {
      std::vector<double> qq(q);
      if (anchor != zs[j]) {
        for (std::size_t m = 0; m < is.size(); ++m) qq[m] = 0.5 * (anchor - ws[is[m]]);
      }
      return detail::run_gap_sweep(anchor, false, S, qq, wctx);
    };
    detail::SweepRow base = sweep_M(zs[j], Ss[k]);
    detail::SweepRow zp = sweep_M(zs[j] + dw, Ss[k]);
    detail::SweepRow zm = sweep_M(zs[j] - dw, Ss[k]);
    detail::SweepRow zph = sweep_M(zs[j] + 0.5 * dw, Ss[k]);
    detail::SweepRow zmh = sweep_M(zs[j] - 0.5 * dw, Ss[k]);
    detail::SweepRow Sp = sweep_M(zs[j], Ss[k] + dS);
    detail::SweepRow Sm = sweep_M(zs[j], Ss[k] - dS);
    detail::SweepRow Sph = sweep_M(zs[j], Ss[k] + 0.5 * dS);
    detail::SweepRow Smh = sweep_M(zs[j], Ss[k] - 0.5 * dS);
    for (std::size_t m = 0; m < is.size(); ++m) {
      const int i = is[m];
      const std::size_t id = idx(i, j, k);
      Mv[id] = detail::weight_M_from_row(base, m, zs[j], Ss[k], gas);
      dMdz[id] = richardson4(detail::weight_M_from_row(zp, m, zs[j] + dw, Ss[k], gas),
                             detail::weight_M_from_row(zm, m, zs[j] - dw, Ss[k], gas),
                             detail::weight_M_from_row(zph, m, zs[j] + 0.5 * dw, Ss[k], gas),
                             detail::weight_M_from_row(zmh, m, zs[j] - 0.5 * dw, Ss[k], gas),
                             dw);
      dMdS[id] = richardson4(detail::weight_M_from_row(Sp, m, zs[j], Ss[k] + dS, gas),
                             detail::weight_M_from_row(Sm, m, zs[j], Ss[k] - dS, gas),
                             detail::weight_M_from_row(Sph, m, zs[j], Ss[k] + 0.5 * dS, gas),
                             detail::weight_M_from_row(Smh, m, zs[j], Ss[k] - 0.5 * dS, gas),
                             dS);
    }
  });

  // per-state assembly
  RoundResult rr;
  std::vector<PerState> states(total);
  std::atomic<std::size_t> skipped{0};
  num::parallel_for(total, [&](std::size_t id) {
    if (!valid[id]) return;
    const int j = static_cast<int>(id % n);
    const int i = static_cast<int>((id / n) % n);
    const int k = static_cast<int>(id / (static_cast<std::size_t>(n) * n));
    const double w = ws[i], z = zs[j], S = Ss[k];
    SigmaState st = sigma_state(sig[id], S, gas);
    if (!(st.s < c) || !(st.rho > 0.0)) return;
    const double u = c * std::tanh((w + z) / (2.0 * c));

    CoordDerivs cd;
    try {
      cd = coord_derivs_given_dSF(st.rho, u, S, gas, dSFv[id]);
    } catch (const std::exception&) {
      return;
    }
    const double ntden = std::sqrt(c2 - u * u);
    const double nt = c * st.n / ntden;
    if (std::abs(cd.dnt_dz) < 1e-10 * (std::abs(cd.dnt_dw) + 1.0) ||
        std::abs(cd.dnt_dw) < 1e-10 * (std::abs(cd.dnt_dz) + 1.0)) {
      skipped.fetch_add(1, std::memory_order_relaxed);
      return;
    }

    const double vf = (c + u) / (c - u);
    const double eH = vf * (c - st.s) / (c + st.s);
    const double eG = vf * (c + st.s) / (c - st.s);
    const double D = vf * 4.0 * c * st.s / (c2 - st.dPdr);
    const double f2 = 2.0 * c * eG / ((eG + 1.0) * (eG + 1.0));
    const double f3 = 2.0 * c * eH / ((eH + 1.0) * (eH + 1.0));
    const double dl2_dw = f2 * cd.dG_dw, dl2_dz = f2 * cd.dG_dz, dl2_dS = f2 * cd.dG_dS;
    const double dl3_dw = f3 * cd.dH_dw, dl3_dz = f3 * cd.dH_dz, dl3_dS = f3 * cd.dH_dS;

    const double eh = std::sqrt(eH * D) / (eH + 1.0) * std::exp(-Jh[id]);
    const double eg = std::sqrt(eG * D) / (eG + 1.0) * std::exp(-Jg[id]);
    const double A_h = dl3_dw / eh;  // dlam3/dw e^{-h}
    const double A_g = dl2_dz / eg;
    if (!(A_h > 0.0) || !(A_g > 0.0)) {
      skipped.fetch_add(1, std::memory_order_relaxed);
      return;
    }

    const double l1 = u;
    const double l2 = c2 * (u + st.s) / (c2 + u * st.s);
    const double l3 = c2 * (u - st.s) / (c2 - u * st.s);

    const double jh_xi = (c + st.s) * (c + st.s) / (2.0 * (c2 * st.rho + st.P)) / st.dFdr;
    const double jg_xi = (c - st.s) * (c - st.s) / (2.0 * (c2 * st.rho + st.P)) / st.dFdr;
    const double dh_dw = -eH * cd.dH_dw / (eH + 1.0) +
                         (eG * (cd.dG_dw + cd.dH_dw) - 2.0 * eH * cd.dH_dw) / (2.0 * D) +
                         0.5 * jh_xi;
    const double dh_dS = -eH * cd.dH_dS / (eH + 1.0) +
                         (eG * (cd.dG_dS + cd.dH_dS) - 2.0 * eH * cd.dH_dS) / (2.0 * D) -
                         dSJv[id];
    const double dg_dz = -eG * cd.dG_dz / (eG + 1.0) +
                         (2.0 * eG * cd.dG_dz - eH * (cd.dG_dz + cd.dH_dz)) / (2.0 * D) -
                         0.5 * jg_xi;
    const double dg_dS = -eG * cd.dG_dS / (eG + 1.0) +
                         (2.0 * eG * cd.dG_dS - eH * (cd.dG_dS + cd.dH_dS)) / (2.0 * D) -
                         dSJv[id];

    const double a = -dSFv[id] + c2 * st.dPdS / ((st.P + st.rho * c2) * st.s);
    const double dar = detail::da_drho_closed(st, gas);
    const double dza = dar / (2.0 * st.dFdr);
    const double dwa = -dza;

    const double L = Lv[id];
    const double M = Mv[id];
    const double dL_dz_ex =
        -2.0 * (cd.dnt_dz / nt) * L - eh * dza * ((l1 - l2) / (l3 - l2)) / nt;
    const double dM_dw_ex =
        -2.0 * (cd.dnt_dw / nt) * M - eg * dwa * ((l1 - l3) / (l3 - l2)) / nt;

    const double nt2 = nt * nt;
    const double nt3 = nt2 * nt;

    // theta1-linear part of a0 and the theta1^2 parts of a1, a2
    const double A0 =
        nt * eh *
        ((l3 - l1) * (a * dh_dw + dh_dS) - dl3_dz * a * (l2 - l1) / (l3 - l2) -
         (a * dl3_dw - dl3_dS) - cd.da_dw * (l1 - l3));
    const double A1 = eh * cd.da_dz * ((l1 - l2) / (l3 - l2)) * nt2 *
                      ((cd.dnt_dw / cd.dnt_dz) * a * (l3 - l1) +
                       (cd.dnt_dS / cd.dnt_dz) * (l3 - l1) - a * (l2 - l1) -
                       a * (l3 - l2));
    const double A2a = nt3 * ((cd.dnt_dw / cd.dnt_dz) * a * (l3 - l1) * dL_dz_ex +
                              (cd.dnt_dS / cd.dnt_dz) * (l3 - l1) * dL_dz_ex -
                              a * (l3 - l1) * dLdw[id] - dLdS[id] * (l3 - l1));
    const double A2b = -L * nt3 * (l3 - l1);
    const double A3 = (A0 - 2.0 * dl3_dw * L * nt2) / eh;
    const double A4a = L * nt2 * A0 / eh + A1 + A2a - dl3_dw * L * L * nt2 * nt2 / eh;
    const double A4b = A2b;

    const double B0 =
        nt * eg *
        ((l2 - l1) * (-a * dg_dz + dg_dS) - dl2_dw * a * (l3 - l1) / (l3 - l2) +
         (a * dl2_dz - dl2_dS) + cd.da_dz * (l1 - l2));
    const double B1 = eg * cd.da_dw * ((l1 - l3) / (l3 - l2)) * nt2 *
                      (-(cd.dnt_dz / cd.dnt_dw) * a * (l2 - l1) +
                       (cd.dnt_dS / cd.dnt_dw) * (l2 - l1) + a * (l3 - l1) -
                       a * (l3 - l2));
    const double B2a = nt3 * (-(cd.dnt_dz / cd.dnt_dw) * a * (l2 - l1) * dM_dw_ex +
                              (cd.dnt_dS / cd.dnt_dw) * (l2 - l1) * dM_dw_ex +
                              a * (l2 - l1) * dMdz[id] - dMdS[id] * (l2 - l1));
    const double B2b = -M * nt3 * (l2 - l1);
    const double B3 = (B0 - 2.0 * dl2_dz * M * nt2) / eg;
    const double B4a = M * nt2 * B0 / eg + B1 + B2a - dl2_dz * M * M * nt2 * nt2 / eg;
    const double B4b = B2b;

    const double th1sq = theta1 * theta1;
    const double phi1 = (2.0 / A_h) * (th1sq * A3 * A3 / (2.0 * A_h) +
                                       th1sq * std::abs(A4a) + theta2 * std::abs(A4b));
    const double phi2 = (2.0 / A_g) * (th1sq * B3 * B3 / (2.0 * A_g) +
                                       th1sq * std::abs(B4a) + theta2 * std::abs(B4b));
    states[id].phi1 = phi1;
    states[id].phi2 = phi2;
  });
  rr.skipped = skipped.load();

  // maxima and the top-cell bounding box
  double max1 = -1.0, max2 = -1.0;
  for (std::size_t id = 0; id < total; ++id) {
    if (states[id].phi1 > max1) max1 = states[id].phi1;
    if (states[id].phi2 > max2) max2 = states[id].phi2;
  }
  if (max1 < 0.0 && max2 < 0.0) return rr;
  rr.any_valid = true;
  rr.phi1_max = std::max(0.0, max1);
  rr.phi2_max = std::max(0.0, max2);

  Box3 tb{box.whi, box.wlo, box.zhi, box.zlo, box.Shi, box.Slo};
  const double cut1 = 0.8 * max1, cut2 = 0.8 * max2;
  for (std::size_t id = 0; id < total; ++id) {
    if (states[id].phi1 < cut1 && states[id].phi2 < cut2) continue;
    if (states[id].phi1 < 0.0 && states[id].phi2 < 0.0) continue;
    const int j = static_cast<int>(id % n);
    const int i = static_cast<int>((id / n) % n);
    const int k = static_cast<int>(id / (static_cast<std::size_t>(n) * n));
    tb.wlo = std::min(tb.wlo, ws[i]);
    tb.whi = std::max(tb.whi, ws[i]);
    tb.zlo = std::min(tb.zlo, zs[j]);
    tb.zhi = std::max(tb.zhi, zs[j]);
    tb.Slo = std::min(tb.Slo, Ss[k]);
    tb.Shi = std::max(tb.Shi, Ss[k]);
  }
  // pad by one cell and clip to the original box
  const double hw = (box.whi - box.wlo) / std::max(1, n - 1);
  const double hz = (box.zhi - box.zlo) / std::max(1, n - 1);
  const double hS = (box.Shi - box.Slo) / std::max(1, n - 1);
  tb.wlo = std::max(box.wlo, tb.wlo - hw);
  tb.whi = std::min(box.whi, tb.whi + hw);
  tb.zlo = std::max(box.zlo, tb.zlo - hz);
  tb.zhi = std::min(box.zhi, tb.zhi + hz);
  tb.Slo = std::max(box.Slo, tb.Slo - hS);
  tb.Shi = std::min(box.Shi, tb.Shi + hS);
  rr.top_box = tb;
  return rr;
}

}  // namespace

ThresholdResult compression_thresholds(const GasParams& gas, double max_w, double max_z,
                                       double theta1_max, double theta2_max, double eps,
                                       const ThresholdOpts& opts) {
  if (!(eps > 0.0))
    throw domain_error("compression_thresholds: eps <= 0 (vacuum in the data)");
  if (!(max_w >= 0.0) || !(max_z >= 0.0))
    throw domain_error("compression_thresholds: invalid box");

  ThresholdResult out;
  if (theta1_max == 0.0 && theta2_max == 0.0) {
    // constant entropy: every coefficient carries eta or theta2
    out.cert.converged = true;
    out.cert.n1_by_round = {0.0};
    out.cert.n2_by_round = {0.0};
    return out;
  }

  WeightContext wctx{gas, eps, opts.sweep_steps};
  Box3 box{-max_w, max_w, -max_z, max_z, -gas.B, gas.B == 0.0 ? 1e-12 : gas.B};
  const double max_gap = box.zhi - box.wlo;
  if (!(max_gap > 0.0)) throw domain_error("compression_thresholds: empty wedge");
  const double gap_floor = std::max(opts.gap_floor_frac, 1e-2) * max_gap;

  double best1 = 0.0, best2 = 0.0;
  Box3 cur = box;
  for (int round = 0; round < opts.max_rounds; ++round) {
    RoundResult rr =
        threshold_round(gas, cur, theta1_max, theta2_max, wctx, opts.grid_n, gap_floor);
    if (!rr.any_valid) {
      if (round == 0) throw domain_error("compression_thresholds: no admissible states");
      break;
    }
    best1 = std::max(best1, rr.phi1_max);
    best2 = std::max(best2, rr.phi2_max);
    out.cert.n1_by_round.push_back(std::sqrt(best1));
    out.cert.n2_by_round.push_back(std::sqrt(best2));
    out.cert.skipped_states += rr.skipped;
    if (round > 0) {
      const auto& r1 = out.cert.n1_by_round;
      const auto& r2 = out.cert.n2_by_round;
      const double c1 = std::abs(r1[round] - r1[round - 1]) / std::max(1e-300, r1[round]);
      const double c2 = std::abs(r2[round] - r2[round - 1]) / std::max(1e-300, r2[round]);
      if (c1 < opts.refine_tol && c2 < opts.refine_tol) {
        out.cert.converged = true;
        break;
      }
    }
    cur = rr.top_box;
  }
  out.N1 = std::sqrt(best1);
  out.N2 = std::sqrt(best2);
  return out;
}

}  // namespace relblow
