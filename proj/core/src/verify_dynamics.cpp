#include <algorithm>
#include <cmath>
#include <limits>

#include "relblow/criteria.hpp"
#include "relblow/numerics.hpp"
#include "relblow/riemann_iso.hpp"
#include "relblow/solver.hpp"
#include "relblow/thresholds.hpp"
#include "relblow/traces.hpp"
#include "relblow/verify.hpp"

namespace relblow {

namespace {

struct DynSuiteBuilder {
  std::vector<CheckResult> checks;
  void add(const std::string& name, const std::string& relation, std::size_t samples,
           double max_residual, double tol) {
    CheckResult c;
    c.name = name;
    c.relation = relation;
    c.samples = samples;
    c.max_residual = max_residual;
    c.tolerance = tol;
    c.pass = !relation.empty() && max_residual <= tol && std::isfinite(max_residual);
    checks.push_back(c);
  }
};

RunHistory run_case(const GasParams& gas, bool isentropic, Bc bc, int cells,
                    double t_end, const ProfileSpec& pr, const ProfileSpec& pu,
                    const ProfileSpec& pS, double x_min, double x_max,
                    double* max_step_drift = nullptr, double* sup_S_run = nullptr) {
  SolverEos eos{isentropic, gas};
  Solver solver({x_min, x_max, cells, bc}, eos, 0.4);
  solver.set_state([&](double x) { return pr(x); }, [&](double x) { return pu(x); },
                   [&](double x) { return pS(x); });

  double prevD = 0.0, prevM = 0.0;
  bool have_prev = false;
  if (max_step_drift) *max_step_drift = 0.0;
  if (sup_S_run) *sup_S_run = 0.0;
  auto on_step = [&](const Solver& s) {
    if (max_step_drift) {
      auto [td, tm] = s.totals();
      if (have_prev) {
        const double dd = std::abs(td - prevD) / std::max(1.0, std::abs(prevD));
        const double dm = std::abs(tm - prevM) / std::max(1.0, std::abs(prevD));
        *max_step_drift = std::max(*max_step_drift, std::max(dd, dm));
      }
      prevD = td;
      prevM = tm;
      have_prev = true;
    }
    if (sup_S_run) {
      for (double sv : s.S()) *sup_S_run = std::max(*sup_S_run, std::abs(sv));
    }
  };
  return run_solver(solver, t_end, 1, on_step);
}

// max drift of a trace column relative to its initial value
double trace_drift(const CharTrace& tr, const std::vector<double>& col) {
  if (col.empty()) return 0.0;
  double d = 0.0;
  for (double v : col) d = std::max(d, std::abs(v - col.front()));
  return d;
}

}  // namespace

IdentitySuiteResult run_dynamics_suite(const DynamicsConfig& cfg) {
  cfg.gas.validate();
  DynSuiteBuilder sb;
  const GasParams& gas = cfg.gas;

  // ---- smooth barotropic expansion: invariants ride their characteristics ----
  {
    ProfileSpec pr{ProfileSpec::Family::constant, 0.15, 0.0, 0.0, 1.0};
    ProfileSpec pu{ProfileSpec::Family::tanh_ramp, 0.0, 0.22, 0.0, 1.4};
    ProfileSpec pS{ProfileSpec::Family::constant, 0.0, 0.0, 0.0, 1.0};
    std::vector<double> drift_z, drift_w, dxs;
    for (int lvl = 0; lvl < cfg.levels; ++lvl) {
      const int cells = cfg.cells << lvl;
      RunHistory hist = run_case(gas, true, Bc::outflow, cells, cfg.t_end, pr, pu, pS,
                                 -6.0, 6.0);
      double dz = 0.0, dw = 0.0;
      for (double x0 : {-1.2, -0.4, 0.5, 1.3}) {
        CharTrace f = trace_characteristic(hist, CharFamily::forward, x0);
        CharTrace b = trace_characteristic(hist, CharFamily::backward, x0);
        dz = std::max(dz, trace_drift(f, f.z));
        dw = std::max(dw, trace_drift(b, b.w));
      }
      drift_z.push_back(dz);
      drift_w.push_back(dw);
      dxs.push_back(hist.grid.dx());
    }
    double worst = 0.0;
    for (std::size_t l = 1; l < drift_z.size(); ++l) {
      const double rz = drift_z[l - 1] / std::max(1e-300, drift_z[l]);
      const double rw = drift_w[l - 1] / std::max(1e-300, drift_w[l]);
      worst = std::max(worst, std::max(0.0, 1.5 - rz));
      worst = std::max(worst, std::max(0.0, 1.5 - rw));
    }
    sb.add("dyn-invariant-constancy-refinement",
           "drift of z along forward and w along backward characteristics at least "
           "halves when dx halves",
           drift_z.size(), worst, 0.0);
  }

  // ---- compressive barotropic run ---------------------------------------------
  {
    ProfileSpec pr{ProfileSpec::Family::gaussian, 0.12, 0.08, 0.0, 0.8};
    ProfileSpec pu{ProfileSpec::Family::constant, 0.0, 0.0, 0.0, 1.0};
    ProfileSpec pS{ProfileSpec::Family::constant, 0.0, 0.0, 0.0, 1.0};

    InitialData data =
        sample_profiles(-6.0, 6.0, 4 * cfg.cells, pr, pu, pS);
    CriteriaReport rep = classify_iso(data, gas);
    const double t_star_hint =
        rep.window_hi > 0.0 ? rep.window_hi : 4.0;  // upper window edge

    const double t_run = 0.55 * t_star_hint;
    RunHistory hist = run_case(gas, true, Bc::outflow, 2 * cfg.cells, t_run, pr, pu, pS,
                               -6.0, 6.0);

    // upper bound: xi(t) <= max{0, sup xi0} within discretization error
    double sup_xi0 = -std::numeric_limits<double>::infinity();
    double sup_zeta0 = -std::numeric_limits<double>::infinity();
    {
      const double h = data.dx();
      std::vector<double> w0(data.x.size()), z0(data.x.size());
      for (std::size_t i = 0; i < data.x.size(); ++i) {
        RiemannPairIso p = to_riemann_iso(data.rho0[i], data.u0[i], gas);
        w0[i] = p.w;
        z0[i] = p.z;
      }
      for (std::size_t i = 2; i + 2 < data.x.size(); ++i) {
        const double dz =
            (-z0[i + 2] + 8.0 * z0[i + 1] - 8.0 * z0[i - 1] + z0[i - 2]) / (12.0 * h);
        const double dw =
            (-w0[i + 2] + 8.0 * w0[i + 1] - 8.0 * w0[i - 1] + w0[i - 2]) / (12.0 * h);
        GradientStateIso gsi = gradient_state_iso({w0[i], z0[i]}, dz, dw, gas);
        sup_xi0 = std::max(sup_xi0, gsi.xi);
        sup_zeta0 = std::max(sup_zeta0, gsi.zeta);
      }
    }
    const double Q1 = std::max(0.0, sup_xi0);
    const double Q2 = std::max(0.0, sup_zeta0);

    double worst_ub = 0.0;
    double band_ratio_max = 0.0;
    double ricc_err = 0.0;
    std::size_t samples = 0;
    const double disc_tol = 40.0 * hist.grid.dx();
    for (double x0 : {-0.9, -0.5, 0.5, 0.9}) {
      CharTrace b = trace_characteristic(hist, CharFamily::backward, x0);
      CharTrace f = trace_characteristic(hist, CharFamily::forward, x0);
      samples += b.t.size();
      for (std::size_t i = 0; i < b.t.size(); ++i) {
        if (std::isfinite(b.g1[i])) worst_ub = std::max(worst_ub, b.g1[i] - Q1 - disc_tol);
        if (std::isfinite(f.g2[i])) worst_ub = std::max(worst_ub, f.g2[i] - Q2 - disc_tol);
      }
      // rate-scale inequality: dY/dt along the backward family >= -Cg Y^2 with
      // a finite data-dependent Cg
      for (std::size_t i = 1; i + 1 < b.t.size(); ++i) {
        if (!std::isfinite(b.Y[i - 1]) || !std::isfinite(b.Y[i + 1])) continue;
        const double dY = (b.Y[i + 1] - b.Y[i - 1]) / (b.t[i + 1] - b.t[i - 1]);
        if (dY < 0.0) band_ratio_max = std::max(band_ratio_max, -dY / (b.Y[i] * b.Y[i]));
      }
    }
    if (!std::isfinite(band_ratio_max)) band_ratio_max = 1e30;
    sb.add("dyn-weighted-gradient-upper-bound",
           "xi <= max{0, sup xi0} and zeta <= max{0, sup zeta0} along characteristics "
           "within discretization error",
           samples, worst_ub, 0.0);
    sb.add("dyn-rate-scale-ode-band",
           "dY/dt >= -Cg Y^2 along backward characteristics with finite empirical Cg",
           samples, band_ratio_max > 0.0 && band_ratio_max < 1e6 ? 0.0 : 1.0, 0.0);

    // reciprocal reconstruction against the differenced field (smooth phase)
    CharTrace b = trace_characteristic(hist, CharFamily::backward, rep.argmin_x);
    if (b.t.size() > 8 && std::isfinite(b.g1.front()) && b.g1.front() < 0.0) {
      RiccatiReconstruction rec =
          riccati_reciprocal_integral(b.g1.front(), b.t, b.rate);
      for (std::size_t i = 0; i < b.t.size(); ++i) {
        if (!std::isfinite(b.g1[i]) || b.g1[i] == 0.0) continue;
        const double inv_field = 1.0 / b.g1[i];
        ricc_err = std::max(ricc_err, std::abs(rec.inv_xi[i] - inv_field) /
                                          std::max(1e-12, std::abs(inv_field)));
      }
    } else {
      ricc_err = 1e30;
    }
    sb.add("dyn-reciprocal-reconstruction",
           "1/xi rebuilt from the damping-rate integral matches the differenced field "
           "along the compressive characteristic",
           b.t.size(), ricc_err, 0.12);

    // density lower-bound product along the acoustic characteristics
    if (gas.gamma > 1.0 && gas.gamma < 3.0) {
      const double expo = 4.0 / (3.0 - gas.gamma);
      double minprod = std::numeric_limits<double>::infinity();
      double first_q = 0.0, last_q = 0.0;
      std::size_t nprod = 0;
      for (double x0 : {-0.9, 0.0, 0.9}) {
        for (CharFamily fam : {CharFamily::forward, CharFamily::backward}) {
          CharTrace tr = trace_characteristic(hist, fam, x0);
          std::vector<double> prod(tr.t.size());
          for (std::size_t i = 0; i < tr.t.size(); ++i)
            prod[i] = tr.rho[i] * std::pow(1.0 + tr.t[i], expo);
          if (prod.empty()) continue;
          nprod += prod.size();
          for (double p : prod) minprod = std::min(minprod, p);
          const std::size_t qn = prod.size() / 4;
          double fq = 0.0, lq = 0.0;
          for (std::size_t i = 0; i < qn; ++i) fq += prod[i];
          for (std::size_t i = prod.size() - qn; i < prod.size(); ++i) lq += prod[i];
          first_q += fq / std::max<std::size_t>(1, qn);
          last_q += lq / std::max<std::size_t>(1, qn);
        }
      }
      double worst = 0.0;
      if (!(minprod > 0.0)) worst = 1.0;
      if (last_q < 0.5 * first_q) worst = std::max(worst, 1.0);
      sb.add("dyn-density-floor-product",
             "rho (1+t)^{4/(3-g)} stays positive with no monotone decay along acoustic "
             "characteristics",
             nprod, worst, 0.0);
    }
  }

  // ---- full-law smooth run: conserved combinations, bounds, conservation ----
  {
    ProfileSpec pr{ProfileSpec::Family::sine, 0.16, 0.015, 0.0, 12.0};
    ProfileSpec pu{ProfileSpec::Family::sine, 0.0, 0.04, 3.0, 12.0};
    ProfileSpec pS{ProfileSpec::Family::sine, 0.0, 0.12, 6.0, 12.0};

    std::vector<double> drift1, drift2, nres;
    double cons_drift = 0.0, supS_run = 0.0, supS0 = 0.0;
    for (int lvl = 0; lvl < cfg.levels; ++lvl) {
      const int cells = cfg.cells << lvl;
      double step_drift = 0.0, supS = 0.0;
      RunHistory hist = run_case(gas, false, Bc::periodic, cells, cfg.t_end, pr, pu, pS,
                                 -6.0, 6.0, &step_drift, &supS);
      if (lvl == 0) {
        cons_drift = step_drift;
        supS_run = supS;
        for (double xs : hist.snaps.front().S) supS0 = std::max(supS0, std::abs(xs));
      }

      InitialData data = sample_profiles(-6.0, 6.0, 2 * cells, pr, pu, pS);
      NonisoFields nf = noniso_fields(data, gas);

      double d1 = 0.0, d2 = 0.0;
      TraceOptions topts;
      topts.weight_eps = nf.eps;
      for (double x0 : {-2.0, 0.4, 2.8}) {
        CharTrace e = trace_characteristic(hist, CharFamily::entropy, x0, topts);
        d1 = std::max(d1, trace_drift(e, e.theta1));
        d2 = std::max(d2, trace_drift(e, e.theta2));
      }
      drift1.push_back(d1);
      drift2.push_back(d2);

      // discrete residual of the n_t conservation law at mid-run
      const std::size_t k = hist.snaps.size() / 2;
      if (k >= 1 && k + 1 < hist.snaps.size()) {
        const auto& sm = hist.snaps[k - 1];
        const auto& s0 = hist.snaps[k];
        const auto& sp = hist.snaps[k + 1];
        const double dt2 = hist.times[k + 1] - hist.times[k - 1];
        const double dxg = hist.grid.dx();
        double worst_res = 0.0;
        const int nc = hist.grid.cells;
        auto nt_of = [&](const FieldSnapshot& s, int i) {
          const int ii = ((i % nc) + nc) % nc;
          return n_tilde(std::max(s.rho[ii], 1e-300), s.u[ii], s.S[ii], gas);
        };
        for (int i = 0; i < nc; ++i) {
          const double dt_term = (nt_of(sp, i) - nt_of(sm, i)) / dt2;
          const double flux_term = (s0.u[(i + 1) % nc] * nt_of(s0, i + 1) -
                                    s0.u[((i - 1) % nc + nc) % nc] * nt_of(s0, i - 1)) /
                                   (2.0 * dxg);
          worst_res = std::max(worst_res, std::abs(dt_term + flux_term));
        }
        nres.push_back(worst_res);
      }
    }

    double worst_halving = 0.0;
    for (std::size_t l = 1; l < drift1.size(); ++l) {
      const double r1 = drift1[l - 1] / std::max(1e-300, drift1[l]);
      const double r2 = drift2[l - 1] / std::max(1e-300, drift2[l]);
      worst_halving = std::max(worst_halving, std::max(0.0, 1.4 - r1));
      worst_halving = std::max(worst_halving, std::max(0.0, 1.4 - r2));
    }
    sb.add("dyn-conserved-combination-drift",
           "theta1 and theta2 drift along entropy characteristics shrinks by >= 1.4x "
           "per dx halving",
           drift1.size(), worst_halving, 0.0);

    double worst_nres = 0.0;
    for (std::size_t l = 1; l < nres.size(); ++l)
      worst_nres =
          std::max(worst_nres, std::max(0.0, 1.3 - nres[l - 1] / std::max(1e-300, nres[l])));
    sb.add("dyn-nt-conservation-residual",
           "discrete d/dt n_t + d/dx (u n_t) residual is O(dx): shrinks under "
           "refinement",
           nres.size(), worst_nres, 0.0);

    sb.add("dyn-conservation-per-step",
           "total D and m on the periodic domain move < 1e-10 per step", 1, cons_drift,
           1e-10);
    sb.add("dyn-entropy-maximum-principle", "sup |S(t)| <= sup |S0| + 1e-10", 1,
           std::max(0.0, supS_run - supS0), 1e-10);

    // characteristic geometry: acoustic families cross at most once
    {
      RunHistory hist = run_case(gas, false, Bc::periodic, cfg.cells, cfg.t_end, pr, pu,
                                 pS, -6.0, 6.0);
      int worst_cross = 0;
      for (double xa : {-2.5, 0.0}) {
        for (double xb : {1.0, 3.5}) {
          CharTrace f = trace_characteristic(hist, CharFamily::forward, xa);
          CharTrace btr = trace_characteristic(hist, CharFamily::backward, xb);
          worst_cross = std::max(worst_cross, crossing_count(f, btr) - 1);
        }
      }
      sb.add("dyn-characteristics-cross-at-most-once",
             "forward and backward characteristics from distinct seeds intersect at "
             "most once per pair",
             4, worst_cross, 0.0);
    }

    // r stays below max{N1, sup r0} along the backward family
    {
      InitialData data = sample_profiles(-6.0, 6.0, 2 * cfg.cells, pr, pu, pS);
      NonisoFields nf = noniso_fields(data, gas);
      double sup_r0 = -std::numeric_limits<double>::infinity();
      for (double v : nf.r0) sup_r0 = std::max(sup_r0, v);

      ThresholdOpts topt;
      topt.grid_n = 11;
      topt.max_rounds = 3;
      double sw = 0.0, sz = 0.0, t1 = 0.0, t2 = 0.0;
      for (std::size_t i = 0; i < nf.w0.size(); ++i) {
        sw = std::max(sw, std::abs(nf.w0[i]));
        sz = std::max(sz, std::abs(nf.z0[i]));
        t1 = std::max(t1, std::abs(nf.theta1[i]));
        t2 = std::max(t2, std::abs(nf.theta2[i]));
      }
      ThresholdResult th = compression_thresholds(gas, sw, sz, t1, t2, nf.eps, topt);
      const double bound = std::max(th.N1, sup_r0);

      RunHistory hist = run_case(gas, false, Bc::periodic, 2 * cfg.cells, cfg.t_end, pr,
                                 pu, pS, -6.0, 6.0);
      TraceOptions topts;
      topts.weight_eps = nf.eps;
      double worst = 0.0;
      std::size_t samples = 0;
      const double disc = 30.0 * hist.grid.dx() * std::max(1.0, std::abs(bound));
      for (double x0 : {-2.0, 1.0, 3.0}) {
        CharTrace btr = trace_characteristic(hist, CharFamily::backward, x0, topts);
        samples += btr.t.size();
        for (double rv : btr.g1)
          if (std::isfinite(rv)) worst = std::max(worst, rv - bound - disc);
      }
      sb.add("dyn-r-upper-bound",
             "r <= max{N1, sup r0} along backward characteristics within "
             "discretization error",
             samples, worst, 0.0);
    }
  }

  IdentitySuiteResult out;
  std::sort(sb.checks.begin(), sb.checks.end(),
            [](const CheckResult& a, const CheckResult& b) { return a.name < b.name; });
  out.checks = std::move(sb.checks);
  out.all_pass = std::all_of(out.checks.begin(), out.checks.end(),
                             [](const CheckResult& c) { return c.pass; });
  return out;
}

}  // namespace relblow
