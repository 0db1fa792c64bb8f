#include "relblow/traces.hpp"

#include <cmath>
#include <limits>

#include "relblow/errors.hpp"
#include "relblow/riemann_iso.hpp"

namespace relblow {

namespace {

double lambda_of(const RunHistory& hist, CharFamily family, double rho, double u,
                 double S) {
  const GasParams& gas = hist.eos.gas;
  const double c2 = gas.c2();
  const double s = hist.eos.sound_speed(std::max(rho, 0.0), S);
  switch (family) {
    case CharFamily::entropy:
      return u;
    case CharFamily::forward:
      return c2 * (u + s) / (c2 + u * s);
    case CharFamily::backward:
      return c2 * (u - s) / (c2 - u * s);
  }
  return u;
}

// centered x-derivative of a state-dependent scalar through the interpolant
template <typename F>
double ddx(const RunHistory& hist, double t, double x, F&& f) {
  const double dx = hist.grid.dx();
  double rp, up, Sp, rm, um, Sm;
  hist.state_at(t, x + dx, rp, up, Sp);
  hist.state_at(t, x - dx, rm, um, Sm);
  return (f(rp, up, Sp) - f(rm, um, Sm)) / (2.0 * dx);
}

}  // namespace

CharTrace trace_characteristic(const RunHistory& hist, CharFamily family, double x0,
                               const TraceOptions& opts) {
  if (hist.snaps.empty()) throw domain_error("trace_characteristic: empty history");
  const GasParams& gas = hist.eos.gas;
  const bool iso = hist.eos.isentropic;

  WeightContext wctx{gas, opts.weight_eps > 0.0 ? opts.weight_eps : 1.0, 192};
  const bool have_eps = opts.weight_eps > 0.0;

  CharTrace tr;
  tr.family = family;

  double x = x0;
  for (std::size_t k = 0; k < hist.times.size(); ++k) {
    const double t = hist.times[k];
    if (hist.grid.bc == Bc::outflow &&
        (x <= hist.grid.x_min || x >= hist.grid.x_max)) {
      tr.truncated = true;
      break;
    }

    double rho, u, S;
    hist.state_at(t, x, rho, u, S);
    tr.t.push_back(t);
    tr.x.push_back(x);
    tr.rho.push_back(rho);
    tr.u.push_back(u);
    tr.S.push_back(S);

    const bool vac = rho < opts.rho_floor;
    if (vac) tr.has_vacuum = true;

    if (iso) {
      RiemannPairIso pair = to_riemann_iso(std::max(rho, 0.0), u, gas);
      tr.w.push_back(pair.w);
      tr.z.push_back(pair.z);
      double dz = ddx(hist, t, x, [&](double r, double uu, double) {
        return to_riemann_iso(std::max(r, 0.0), uu, gas).z;
      });
      double dw = ddx(hist, t, x, [&](double r, double uu, double) {
        return to_riemann_iso(std::max(r, 0.0), uu, gas).w;
      });
      if (!vac) {
        GradientStateIso gs = gradient_state_iso(pair, dz, dw, gas);
        tr.g1.push_back(gs.xi);
        tr.g2.push_back(gs.zeta);
        tr.Y.push_back(quantity_Y(rho, gas));
        tr.rate.push_back(family == CharFamily::forward ? riccati_rate_2(pair, gas)
                                                        : riccati_rate_1(pair, gas));
      } else {
        tr.g1.push_back(std::numeric_limits<double>::quiet_NaN());
        tr.g2.push_back(std::numeric_limits<double>::quiet_NaN());
        tr.Y.push_back(std::numeric_limits<double>::quiet_NaN());
        tr.rate.push_back(std::numeric_limits<double>::quiet_NaN());
      }
      tr.theta1.push_back(0.0);
      tr.theta2.push_back(0.0);
    } else {
      RiemannTriple triple = to_riemann_non(std::max(rho, 0.0), u, S, gas);
      tr.w.push_back(triple.w);
      tr.z.push_back(triple.z);
      auto wz_of = [&](double r, double uu, double ss) {
        return to_riemann_non(std::max(r, 0.0), uu, ss, gas);
      };
      double dw = ddx(hist, t, x, [&](double r, double uu, double ss) {
        return wz_of(r, uu, ss).w;
      });
      double dz = ddx(hist, t, x, [&](double r, double uu, double ss) {
        return wz_of(r, uu, ss).z;
      });
      double deta = ddx(hist, t, x, [&](double, double, double ss) { return ss; });
      if (!vac && have_eps) {
        GradientStateNon gs = gradient_state_non(triple, dw, dz, deta, wctx);
        tr.g1.push_back(gs.r);
        tr.g2.push_back(gs.q);
        auto lp = lambda_partials_non(rho, u, S, gas);
        auto [h, g] = weights_h_g(triple, wctx);
        tr.rate.push_back(family == CharFamily::forward ? lp.dl2_dz * std::exp(-g)
                                                        : lp.dl3_dw * std::exp(-h));
        const double nt = gs.n_t;
        tr.theta1.push_back(gs.eta / nt);
        const double dnt = ddx(hist, t, x, [&](double r, double uu, double ss) {
          return n_tilde(std::max(r, 1e-300), uu, ss, gas);
        });
        // second derivative of S by the centered 3-point stencil
        const double dxg = hist.grid.dx();
        double r1, u1, S1, r2, u2, S2, r0_, u0_, S0_;
        hist.state_at(t, x + dxg, r1, u1, S1);
        hist.state_at(t, x - dxg, r2, u2, S2);
        hist.state_at(t, x, r0_, u0_, S0_);
        const double dxxS = (S1 - 2.0 * S0_ + S2) / (dxg * dxg);
        tr.theta2.push_back((dxxS - (gs.eta / nt) * dnt) / (nt * nt));
      } else {
        const double nanv = std::numeric_limits<double>::quiet_NaN();
        tr.g1.push_back(nanv);
        tr.g2.push_back(nanv);
        tr.rate.push_back(nanv);
        tr.theta1.push_back(nanv);
        tr.theta2.push_back(nanv);
      }
      tr.Y.push_back(0.0);
    }

    // advance to the next stored time by midpoint RK2
    if (k + 1 < hist.times.size()) {
      const double dt = hist.times[k + 1] - t;
      const double l0 = lambda_of(hist, family, rho, u, S);
      double rm, um, Sm;
      hist.state_at(t + 0.5 * dt, x + 0.5 * dt * l0, rm, um, Sm);
      const double lm = lambda_of(hist, family, rm, um, Sm);
      x += dt * lm;
    }
  }

  // cumulative rate integral (NaN-safe: stops accumulating past a gap)
  tr.cum_rate.assign(tr.t.size(), 0.0);
  for (std::size_t i = 1; i < tr.t.size(); ++i) {
    const double seg = 0.5 * (tr.rate[i] + tr.rate[i - 1]) * (tr.t[i] - tr.t[i - 1]);
    tr.cum_rate[i] = tr.cum_rate[i - 1] + (std::isfinite(seg) ? seg : 0.0);
  }
  return tr;
}

GradientSeries gradient_series(const RunHistory& hist) {
  GradientSeries out;
  const GasParams& gas = hist.eos.gas;
  const bool iso = hist.eos.isentropic;
  const int n = hist.grid.cells;
  const double dx = hist.grid.dx();

  std::vector<double> wv(n), zv(n);
  for (std::size_t k = 0; k < hist.snaps.size(); ++k) {
    const FieldSnapshot& s = hist.snaps[k];
    double rmin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      if (iso) {
        RiemannPairIso p = to_riemann_iso(std::max(s.rho[i], 0.0), s.u[i], gas);
        wv[i] = p.w;
        zv[i] = p.z;
      } else {
        RiemannTriple tpl = to_riemann_non(std::max(s.rho[i], 0.0), s.u[i], s.S[i], gas);
        wv[i] = tpl.w;
        zv[i] = tpl.z;
      }
      rmin = std::min(rmin, s.rho[i]);
    }
    double mz = 0.0, mw = 0.0;
    auto at = [&](const std::vector<double>& v, int i) {
      if (hist.grid.bc == Bc::periodic) return v[((i % n) + n) % n];
      return v[std::clamp(i, 0, n - 1)];
    };
    for (int i = 0; i < n; ++i) {
      mz = std::max(mz, std::abs(at(zv, i + 1) - at(zv, i - 1)) / (2.0 * dx));
      mw = std::max(mw, std::abs(at(wv, i + 1) - at(wv, i - 1)) / (2.0 * dx));
    }
    out.t.push_back(hist.times[k]);
    out.max_dxz.push_back(mz);
    out.max_dxw.push_back(mw);
    out.min_rho.push_back(rmin);
  }
  if (!out.max_dxz.empty()) {
    out.initial_max_dxz = out.max_dxz.front();
    out.initial_max_dxw = out.max_dxw.front();
  }
  return out;
}

BlowupObservation monitor_blowup(const RunHistory& hist, double growth_factor) {
  BlowupObservation obs;
  obs.growth_factor = growth_factor;
  obs.series = gradient_series(hist);
  const double base =
      std::max(obs.series.initial_max_dxz, obs.series.initial_max_dxw);
  for (std::size_t k = 0; k < obs.series.t.size(); ++k) {
    const double g = std::max(obs.series.max_dxz[k], obs.series.max_dxw[k]);
    if (g >= growth_factor * base) {
      obs.threshold_crossed = true;
      obs.t_cross = obs.series.t[k];
      // locate the peak-gradient cell at this snapshot
      const FieldSnapshot& s = hist.snaps[k];
      const int n = hist.grid.cells;
      const double dx = hist.grid.dx();
      double best = -1.0;
      for (int i = 1; i + 1 < n; ++i) {
        const double d = std::abs(s.rho[i + 1] - s.rho[i - 1]) / (2.0 * dx);
        if (d > best) {
          best = d;
          obs.x_peak = hist.grid.x_center(i);
        }
      }
      break;
    }
  }
  return obs;
}

RefinementSignature blowup_refinement_signature(const BlowupObservation& coarse,
                                                const BlowupObservation& fine,
                                                double window_frac) {
  RefinementSignature sig;
  if (!coarse.threshold_crossed) return sig;
  const double t0 = coarse.t_cross;
  const double half = window_frac * std::max(t0, 1e-12);
  auto peak_in = [&](const GradientSeries& s) {
    double best = 0.0;
    for (std::size_t k = 0; k < s.t.size(); ++k) {
      if (s.t[k] >= t0 - half && s.t[k] <= t0 + half)
        best = std::max(best, std::max(s.max_dxz[k], s.max_dxw[k]));
    }
    return best;
  };
  const double pc = peak_in(coarse.series);
  const double pf = peak_in(fine.series);
  if (pc > 0.0) sig.ratio = pf / pc;
  sig.doubling = sig.ratio >= 1.6 && sig.ratio <= 2.4;
  return sig;
}

int crossing_count(const CharTrace& a, const CharTrace& b) {
  int crossings = 0;
  double prev = 0.0;
  bool have_prev = false;
  const std::size_t n = std::min(a.t.size(), b.t.size());
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a.x[i] - b.x[i];
    if (have_prev && prev * d < 0.0) ++crossings;
    if (d != 0.0) {
      prev = d;
      have_prev = true;
    }
  }
  return crossings;
}

}  // namespace relblow
