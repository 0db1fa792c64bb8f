#include "relblow/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "relblow/csv.hpp"
#include "relblow/errors.hpp"
#include "relblow/numerics.hpp"
#include "relblow/riemann_iso.hpp"
#include "relblow/riemann_non.hpp"

namespace relblow {

using ordered_json = nlohmann::ordered_json;

double InitialData::dx() const {
  if (x.size() < 2) throw domain_error("InitialData: need at least 2 samples");
  return x[1] - x[0];
}

void InitialData::validate() const {
  if (x.size() < 9) throw domain_error("InitialData: too few samples");
  if (x.size() != rho0.size() || x.size() != u0.size() || x.size() != S0.size())
    throw domain_error("InitialData: column size mismatch");
  const double h = dx();
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (std::abs((x[i] - x[i - 1]) - h) > 1e-9 * std::max(1.0, std::abs(h)))
      throw domain_error("InitialData: grid must be uniform");
  }
}

double ProfileSpec::operator()(double xv) const {
  switch (family) {
    case Family::constant:
      return base;
    case Family::gaussian: {
      const double t = (xv - x0) / width;
      return base + amp * std::exp(-t * t);
    }
    case Family::tanh_ramp:
      return base + amp * std::tanh((xv - x0) / width);
    case Family::sine:
      return base + amp * std::sin(2.0 * M_PI * (xv - x0) / width);
  }
  return base;
}

InitialData sample_profiles(double x_min, double x_max, int samples,
                            const ProfileSpec& rho, const ProfileSpec& u,
                            const ProfileSpec& S) {
  if (samples < 9) throw domain_error("sample_profiles: need >= 9 samples");
  InitialData d;
  d.x.resize(samples);
  d.rho0.resize(samples);
  d.u0.resize(samples);
  d.S0.resize(samples);
  const double h = (x_max - x_min) / samples;
  for (int i = 0; i < samples; ++i) {
    const double xv = x_min + (i + 0.5) * h;
    d.x[i] = xv;
    d.rho0[i] = rho(xv);
    d.u0[i] = u(xv);
    d.S0[i] = S(xv);
  }
  return d;
}

InitialData load_initial_csv(const std::string& path) {
  CsvTable t = read_csv(path);
  const int cx = t.column("x"), cr = t.column("rho"), cu = t.column("u"),
            cs = t.column("S");
  if (cx < 0 || cr < 0 || cu < 0 || cs < 0)
    throw config_error("load_initial_csv: need columns x, rho, u, S");
  InitialData d;
  for (const auto& row : t.rows) {
    d.x.push_back(row[cx]);
    d.rho0.push_back(row[cr]);
    d.u0.push_back(row[cu]);
    d.S0.push_back(row[cs]);
  }
  d.validate();
  return d;
}

void require_resolution(const InitialData& data, int solver_cells) {
  if (static_cast<int>(data.x.size()) < 2 * solver_cells)
    throw config_error("initial data must be sampled at >= 2x the solver resolution");
}

namespace {

// fourth-order central first derivative, second-order one-sided at the edges
std::vector<double> deriv4(const std::vector<double>& f, double h) {
  const std::size_t n = f.size();
  std::vector<double> d(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (i >= 2 && i + 2 < n) {
      d[i] = (-f[i + 2] + 8.0 * f[i + 1] - 8.0 * f[i - 1] + f[i - 2]) / (12.0 * h);
    } else if (i == 0) {
      d[i] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    } else if (i == n - 1) {
      d[i] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    } else if (i == 1) {
      d[i] = (f[2] - f[0]) / (2.0 * h);
    } else {
      d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    }
  }
  return d;
}

std::vector<double> deriv4_second(const std::vector<double>& f, double h) {
  const std::size_t n = f.size();
  std::vector<double> d(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (i >= 2 && i + 2 < n) {
      d[i] = (-f[i + 2] + 16.0 * f[i + 1] - 30.0 * f[i] + 16.0 * f[i - 1] - f[i - 2]) /
             (12.0 * h * h);
    } else if (i >= 1 && i + 1 < n) {
      d[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / (h * h);
    } else if (i == 0) {
      d[i] = (f[2] - 2.0 * f[1] + f[0]) / (h * h);
    } else {
      d[i] = (f[n - 1] - 2.0 * f[n - 2] + f[n - 3]) / (h * h);
    }
  }
  return d;
}

std::vector<std::pair<double, double>> negative_intervals(const std::vector<double>& x,
                                                          const std::vector<double>& v) {
  std::vector<std::pair<double, double>> out;
  bool open = false;
  double start = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] < 0.0 && !open) {
      open = true;
      start = x[i];
    } else if (v[i] >= 0.0 && open) {
      open = false;
      out.emplace_back(start, x[i]);
    }
  }
  if (open) out.emplace_back(start, x.back());
  return out;
}

}  // namespace

const char* to_string(IsoVerdict v) {
  switch (v) {
    case IsoVerdict::global: return "global";
    case IsoVerdict::finite_time: return "finite-time";
    case IsoVerdict::outside_theory: return "outside-theory";
  }
  return "?";
}

const char* to_string(NonisoVerdict v) {
  switch (v) {
    case NonisoVerdict::blow_up_guaranteed: return "blow-up-guaranteed";
    case NonisoVerdict::inconclusive: return "inconclusive";
    case NonisoVerdict::outside_theory: return "outside-theory";
  }
  return "?";
}

double total_variation(const std::vector<double>& v) {
  double tv = 0.0;
  for (std::size_t i = 1; i < v.size(); ++i) tv += std::abs(v[i] - v[i - 1]);
  return tv;
}

CriteriaReport classify_iso(const InitialData& data, const GasParams& gas,
                            double rho_floor) {
  data.validate();
  gas.validate();
  CriteriaReport rep;
  const std::size_t n = data.x.size();
  const double h = data.dx();

  std::vector<double> w0(n), z0(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (data.rho0[i] < 0.0) throw domain_error("classify_iso: rho0 < 0");
    RiemannPairIso p = to_riemann_iso(data.rho0[i], data.u0[i], gas);
    w0[i] = p.w;
    z0[i] = p.z;
  }
  std::vector<double> dz = deriv4(z0, h);
  std::vector<double> dw = deriv4(w0, h);

  const double sup_z0 = *std::max_element(z0.begin(), z0.end());
  const double inf_w0 = *std::min_element(w0.begin(), w0.end());
  const double bound = admissible_gap_max_iso(gas);
  double min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) min_gap = std::min(min_gap, z0[i] - w0[i]);

  rep.assumptions.push_back({"gap-positive", min_gap > 0.0, min_gap});
  rep.assumptions.push_back(
      {"subsonic-window", sup_z0 - inf_w0 < bound, bound - (sup_z0 - inf_w0)});
  double m0 = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    m0 = std::max({m0, std::abs(z0[i]), std::abs(w0[i]), std::abs(dz[i]), std::abs(dw[i])});
  rep.assumptions.push_back({"c1-norm-finite", std::isfinite(m0), m0});

  rep.forward_compression = negative_intervals(data.x, dz);
  rep.backward_compression = negative_intervals(data.x, dw);

  const bool assumptions_ok =
      rep.assumptions[0].pass && rep.assumptions[1].pass && rep.assumptions[2].pass;
  if (!assumptions_ok) {
    rep.iso_verdict = IsoVerdict::outside_theory;
    return rep;
  }

  double min_xi = std::numeric_limits<double>::infinity();
  double min_zeta = std::numeric_limits<double>::infinity();
  double argmin = data.x.front();
  double kappa_min = std::numeric_limits<double>::infinity();
  double kappa_max = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (data.rho0[i] < rho_floor) {
      rep.vacuum_samples_skipped = true;
      continue;
    }
    RiemannPairIso p{w0[i], z0[i]};
    GradientStateIso gsi = gradient_state_iso(p, dz[i], dw[i], gas);
    if (std::min(gsi.xi, gsi.zeta) < std::min(min_xi, min_zeta)) argmin = data.x[i];
    min_xi = std::min(min_xi, gsi.xi);
    min_zeta = std::min(min_zeta, gsi.zeta);
    const double k1 = riccati_rate_1(p, gas);
    const double k2 = riccati_rate_2(p, gas);
    kappa_min = std::min({kappa_min, k1, k2});
    kappa_max = std::max({kappa_max, k1, k2});
  }
  rep.min_xi0 = min_xi;
  rep.min_zeta0 = min_zeta;
  rep.argmin_x = argmin;

  const double worst = std::min(min_xi, min_zeta);
  if (worst >= 0.0) {
    rep.iso_verdict = IsoVerdict::global;
  } else {
    rep.iso_verdict = IsoVerdict::finite_time;
    // reciprocal law: 1/v(t) = 1/v0 + int rate, rate in [kappa_min, kappa_max]
    if (kappa_max > 0.0) rep.window_lo = (-1.0 / worst) / kappa_max;
    if (kappa_min > 0.0) rep.window_hi = (-1.0 / worst) / kappa_min;
  }
  return rep;
}

NonisoFields noniso_fields(const InitialData& data, const GasParams& gas) {
  data.validate();
  const std::size_t n = data.x.size();
  const double h = data.dx();

  NonisoFields f;
  f.w0.resize(n);
  f.z0.resize(n);
  f.eta0.resize(n);
  f.nt0.resize(n);
  f.r0.resize(n);
  f.q0.resize(n);
  f.theta1.resize(n);
  f.theta2.resize(n);

  for (std::size_t i = 0; i < n; ++i) {
    if (!(data.rho0[i] > 0.0))
      throw domain_error("noniso_fields: rho0 must be strictly positive");
    RiemannTriple t = to_riemann_non(data.rho0[i], data.u0[i], data.S0[i], gas);
    f.w0[i] = t.w;
    f.z0[i] = t.z;
    f.nt0[i] = n_tilde(data.rho0[i], data.u0[i], data.S0[i], gas);
  }
  f.eta0 = deriv4(data.S0, h);
  std::vector<double> dxw = deriv4(f.w0, h);
  std::vector<double> dxz = deriv4(f.z0, h);
  std::vector<double> dxnt = deriv4(f.nt0, h);
  std::vector<double> dxxS = deriv4_second(data.S0, h);
  f.tv_S0 = total_variation(data.S0);

  double min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) min_gap = std::min(min_gap, f.z0[i] - f.w0[i]);
  f.eps = 0.5 * min_gap;
  if (!(f.eps > 0.0)) throw domain_error("noniso_fields: inf(z0 - w0) <= 0");

  WeightContext ctx{gas, f.eps, 192};
  num::parallel_for(n, [&](std::size_t i) {
    RiemannTriple t{f.w0[i], f.z0[i], data.S0[i]};
    GradientStateNon gs = gradient_state_non(t, dxw[i], dxz[i], f.eta0[i], ctx);
    f.r0[i] = gs.r;
    f.q0[i] = gs.q;
    f.theta1[i] = f.eta0[i] / f.nt0[i];
    f.theta2[i] = (dxxS[i] - (f.eta0[i] / f.nt0[i]) * dxnt[i]) / (f.nt0[i] * f.nt0[i]);
  });
  return f;
}

CriteriaReport classify_noniso(const InitialData& data, const GasParams& gas,
                               const ThresholdOpts& opts,
                               const std::optional<ThresholdResult>& precomputed) {
  gas.validate();
  CriteriaReport rep;
  NonisoFields f = noniso_fields(data, gas);
  const std::size_t n = data.x.size();

  double sup_w = 0.0, sup_z = 0.0, sup_S = 0.0, th1 = 0.0, th2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sup_w = std::max(sup_w, std::abs(f.w0[i]));
    sup_z = std::max(sup_z, std::abs(f.z0[i]));
    sup_S = std::max(sup_S, std::abs(data.S0[i]));
    th1 = std::max(th1, std::abs(f.theta1[i]));
    th2 = std::max(th2, std::abs(f.theta2[i]));
  }

  rep.assumptions.push_back({"gap-positive", f.eps > 0.0, 2.0 * f.eps});
  rep.assumptions.push_back({"entropy-bound", sup_S <= gas.B, gas.B - sup_S});

  DataBounds db;
  db.sup_abs_w0 = sup_w;
  db.sup_abs_z0 = sup_z;
  db.tv_S0 = f.tv_S0;
  db.inf_gap = 2.0 * f.eps;
  db.theta1_max = th1;
  db.theta2_max = th2;
  CriteriaConstants cc = criteria_constants(db, gas);
  rep.constants = cc;
  rep.assumptions.push_back(
      {"sound-speed-a-priori", cc.assumption_ok, cc.assumption_margin});

  rep.min_r0 = *std::min_element(f.r0.begin(), f.r0.end());
  rep.min_q0 = *std::min_element(f.q0.begin(), f.q0.end());
  rep.informal_compression = rep.min_r0 < 0.0 || rep.min_q0 < 0.0;

  // compression intervals by the gradient signs of the Riemann variables
  std::vector<double> dxw = deriv4(f.w0, data.dx());
  std::vector<double> dxz = deriv4(f.z0, data.dx());
  rep.forward_compression = negative_intervals(data.x, dxz);
  rep.backward_compression = negative_intervals(data.x, dxw);

  if (!cc.assumption_ok || sup_S > gas.B) {
    rep.noniso_verdict = NonisoVerdict::outside_theory;
    return rep;
  }

  ThresholdResult th;
  if (precomputed.has_value()) {
    th = *precomputed;
  } else {
    th = compression_thresholds(gas, cc.max_w, cc.max_z, th1, th2, f.eps, opts);
  }
  rep.N1 = th.N1;
  rep.N2 = th.N2;
  rep.threshold_cert = th.cert;

  if (rep.min_r0 < -th.N1 || rep.min_q0 < -th.N2) {
    rep.noniso_verdict = NonisoVerdict::blow_up_guaranteed;
    // witness: the sample with the largest threshold exceedance
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e1 = -th.N1 - f.r0[i];
      const double e2 = -th.N2 - f.q0[i];
      const double e = std::max(e1, e2);
      if (e > best) {
        best = e;
        rep.witness_x = data.x[i];
      }
    }
  } else {
    rep.noniso_verdict = NonisoVerdict::inconclusive;
  }
  return rep;
}

std::string CriteriaReport::to_json() const {
  ordered_json j;
  ordered_json ja = ordered_json::array();
  for (const auto& a : assumptions)
    ja.push_back({{"name", a.name}, {"pass", a.pass}, {"margin", a.margin}});
  j["assumptions"] = ja;

  auto intervals = [](const std::vector<std::pair<double, double>>& v) {
    ordered_json out = ordered_json::array();
    for (const auto& p : v) out.push_back({p.first, p.second});
    return out;
  };
  j["classification"] = {{"forward_compression", intervals(forward_compression)},
                         {"backward_compression", intervals(backward_compression)}};

  if (iso_verdict) {
    j["iso_verdict"] = to_string(*iso_verdict);
    j["min_xi0"] = min_xi0;
    j["min_zeta0"] = min_zeta0;
    j["argmin_x"] = argmin_x;
    j["vacuum_samples_skipped"] = vacuum_samples_skipped;
    if (*iso_verdict == IsoVerdict::finite_time) {
      j["predicted_window"] = {{"lo", window_lo}, {"hi", window_hi}};
    }
  }
  if (noniso_verdict) {
    j["noniso_verdict"] = to_string(*noniso_verdict);
    j["min_r0"] = min_r0;
    j["min_q0"] = min_q0;
    j["N1"] = N1;
    j["N2"] = N2;
    j["informal_compression"] = informal_compression;
    if (*noniso_verdict == NonisoVerdict::blow_up_guaranteed) j["witness_x"] = witness_x;
    ordered_json cert;
    cert["n1_by_round"] = threshold_cert.n1_by_round;
    cert["n2_by_round"] = threshold_cert.n2_by_round;
    cert["converged"] = threshold_cert.converged;
    cert["skipped_states"] = threshold_cert.skipped_states;
    j["threshold_certificate"] = cert;
  }
  if (constants) {
    j["constants"] = {{"K", constants->K},
                      {"V", constants->V},
                      {"U1", constants->U1},
                      {"U2", constants->U2},
                      {"max_w", constants->max_w},
                      {"max_z", constants->max_z},
                      {"M2", constants->M2},
                      {"E", std::isfinite(constants->E) ? ordered_json(constants->E)
                                                        : ordered_json("inf")},
                      {"assumption_lhs", constants->assumption_lhs},
                      {"assumption_margin", constants->assumption_margin}};
  }
  return j.dump(2);
}

}  // namespace relblow
