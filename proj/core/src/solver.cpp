#include "relblow/solver.hpp"

#include <algorithm>
#include <cmath>

#include "relblow/eos.hpp"
#include "relblow/errors.hpp"

namespace relblow {

double SolverEos::pressure(double rho, double S) const {
  if (isentropic) return gas.k * gas.k * std::pow(rho, gas.gamma);
  return pressure_full(rho, S, gas);
}

double SolverEos::dP_drho(double rho, double S) const {
  if (isentropic) return gas.k * gas.k * gas.gamma * std::pow(rho, gas.gamma - 1.0);
  return eos_derivatives(rho, S, gas).dP_drho;
}

double SolverEos::sound_speed(double rho, double S) const {
  return std::sqrt(dP_drho(rho, S));
}

ConservedState prim_to_cons(double rho, double u, double S, const SolverEos& eos) {
  const double c2 = eos.gas.c2();
  if (rho < 0.0) throw domain_error("prim_to_cons: rho < 0");
  if (!(std::abs(u) < eos.gas.c)) throw domain_error("prim_to_cons: |u| >= c");
  const double P = eos.pressure(rho, S);
  ConservedState out;
  out.D = (c2 * c2 * rho + P * u * u) / (c2 * (c2 - u * u));
  out.m = (c2 * rho + P) * u / (c2 - u * u);
  out.sigma = S;
  return out;
}

RecoveryResult cons_to_prim(const ConservedState& cons, double S_guess,
                            const SolverEos& eos, double P_guess) {
  const double c = eos.gas.c;
  const double c2 = eos.gas.c2();
  const double D = cons.D;
  const double m = cons.m;

  if (D == 0.0 && m == 0.0) return {0.0, 0.0, 0};
  if (!(D > 0.0)) throw numerical_error("cons_to_prim: non-positive energy density");

  auto u_of = [&](double P) { return m / (D + P / c2); };
  auto rho_of = [&](double P) {
    const double u = u_of(P);
    return D * (1.0 - u * u / c2) - P * u * u / (c2 * c2);
  };
  auto residual = [&](double P) { return eos.pressure(std::max(0.0, rho_of(P)), S_guess) - P; };

  if (!(std::abs(u_of(0.0)) < c))
    throw numerical_error("cons_to_prim: |m/D| >= c, unphysical conserved state");

  // bracket [0, hi]: residual(0) >= 0 and residual decreases (g' <= u^2/c^2 - 1 < 0)
  double lo = 0.0;
  double flo = residual(lo);
  if (flo <= 0.0) return {rho_of(0.0), u_of(0.0), 0};
  double hi = (P_guess > 0.0) ? 2.0 * P_guess : std::max(1e-8 * c2 * D, 1e-12);
  int expand = 0;
  while (residual(hi) > 0.0) {
    hi *= 4.0;
    if (++expand > 200) throw numerical_error("cons_to_prim: cannot bracket pressure");
  }

  double P = (P_guess > 0.0 && P_guess < hi) ? P_guess : 0.5 * hi;
  int iters = 0;
  for (; iters < 100; ++iters) {
    const double rho = rho_of(P);
    const double g = eos.pressure(std::max(0.0, rho), S_guess) - P;
    if (g > 0.0)
      lo = P;
    else
      hi = P;
    const double u = u_of(P);
    const double drho_dP = u * u / (c2 * c2);
    const double dg = eos.dP_drho(std::max(1e-300, rho), S_guess) * drho_dP - 1.0;
    double Pn = P - g / dg;
    if (!(Pn > lo) || !(Pn < hi)) Pn = 0.5 * (lo + hi);
    const double scale = std::max({1.0, P, c2 * std::abs(rho)});
    if (std::abs(g) <= 1e-14 * scale || std::abs(Pn - P) <= 1e-16 * scale) {
      P = Pn;
      break;
    }
    P = Pn;
  }

  RecoveryResult out;
  out.rho = rho_of(P);
  out.u = u_of(P);
  out.iterations = iters;
  if (!(out.rho >= 0.0) || !(std::abs(out.u) < c))
    throw numerical_error("cons_to_prim: recovered state inadmissible");
  return out;
}

namespace {

double minmod(double a, double b) {
  if (a * b <= 0.0) return 0.0;
  return std::abs(a) < std::abs(b) ? a : b;
}

// index helper with 2 ghost cells materialized by the caller
struct Ghosted {
  const std::vector<double>& v;
  int n;
  Bc bc;
  double operator()(int i) const {
    if (i < 0) return bc == Bc::periodic ? v[(i + n) % n] : v[0];
    if (i >= n) return bc == Bc::periodic ? v[i % n] : v[n - 1];
    return v[i];
  }
};

}  // namespace

Solver::Solver(GridSpec grid, SolverEos eos, double cfl)
    : grid_(grid), eos_(eos), cfl_(cfl) {
  if (!(cfl > 0.0) || !(cfl < 1.0)) throw domain_error("Solver: cfl must be in (0,1)");
  eos_.gas.validate();
  rho_.assign(grid_.cells, 0.0);
  u_.assign(grid_.cells, 0.0);
  S_.assign(grid_.cells, 0.0);
}

void Solver::set_state(std::vector<double> rho, std::vector<double> u,
                       std::vector<double> S) {
  if (static_cast<int>(rho.size()) != grid_.cells || rho.size() != u.size() ||
      rho.size() != S.size())
    throw domain_error("Solver::set_state: size mismatch");
  rho_ = std::move(rho);
  u_ = std::move(u);
  S_ = std::move(S);
  t_ = 0.0;
}

void Solver::set_state(const std::function<double(double)>& rho0,
                       const std::function<double(double)>& u0,
                       const std::function<double(double)>& S0) {
  std::vector<double> r(grid_.cells), uu(grid_.cells), ss(grid_.cells);
  for (int i = 0; i < grid_.cells; ++i) {
    const double x = grid_.x_center(i);
    r[i] = rho0(x);
    uu[i] = u0(x);
    ss[i] = S0(x);
  }
  set_state(std::move(r), std::move(uu), std::move(ss));
}

double Solver::max_signal_speed() const {
  double vmax = 0.0;
  for (int i = 0; i < grid_.cells; ++i) {
    const double s = eos_.sound_speed(rho_[i], S_[i]);
    const double c2 = eos_.gas.c2();
    const double l2 = c2 * (u_[i] + s) / (c2 + u_[i] * s);
    const double l3 = c2 * (u_[i] - s) / (c2 - u_[i] * s);
    vmax = std::max({vmax, std::abs(l2), std::abs(l3)});
  }
  return vmax;
}

void Solver::rhs_acoustic(const std::vector<double>& rho, const std::vector<double>& u,
                          const std::vector<double>& S, std::vector<double>& dD,
                          std::vector<double>& dm) const {
  const int n = grid_.cells;
  const double dx = grid_.dx();
  const double c2 = eos_.gas.c2();
  Ghosted gr{rho, n, grid_.bc}, gu{u, n, grid_.bc}, gS{S, n, grid_.bc};

  // minmod-limited interface states of the primitives
  auto slope = [&](const Ghosted& f, int i) {
    return minmod(f(i + 1) - f(i), f(i) - f(i - 1));
  };

  std::vector<double> FD(n + 1), Fm(n + 1);
  for (int f = 0; f <= n; ++f) {
    const int iL = f - 1, iR = f;
    const double rhoL = std::max(0.0, gr(iL) + 0.5 * slope(gr, iL));
    const double rhoR = std::max(0.0, gr(iR) - 0.5 * slope(gr, iR));
    const double uL = gu(iL) + 0.5 * slope(gu, iL);
    const double uR = gu(iR) - 0.5 * slope(gu, iR);
    const double SL = gS(iL) + 0.5 * slope(gS, iL);
    const double SR = gS(iR) - 0.5 * slope(gS, iR);

    const ConservedState UL = prim_to_cons(rhoL, uL, SL, eos_);
    const ConservedState UR = prim_to_cons(rhoR, uR, SR, eos_);
    const double PL = eos_.pressure(rhoL, SL);
    const double PR = eos_.pressure(rhoR, SR);
    const double fDL = UL.m, fDR = UR.m;
    const double fmL = UL.m * uL + PL, fmR = UR.m * uR + PR;

    const double sL = eos_.sound_speed(rhoL, SL);
    const double sR = eos_.sound_speed(rhoR, SR);
    const double lamL3 = c2 * (uL - sL) / (c2 - uL * sL);
    const double lamR3 = c2 * (uR - sR) / (c2 - uR * sR);
    const double lamL2 = c2 * (uL + sL) / (c2 + uL * sL);
    const double lamR2 = c2 * (uR + sR) / (c2 + uR * sR);
    const double SLw = std::min(lamL3, lamR3);
    const double SRw = std::max(lamL2, lamR2);

    if (SLw >= 0.0) {
      FD[f] = fDL;
      Fm[f] = fmL;
    } else if (SRw <= 0.0) {
      FD[f] = fDR;
      Fm[f] = fmR;
    } else {
      FD[f] = (SRw * fDL - SLw * fDR + SLw * SRw * (UR.D - UL.D)) / (SRw - SLw);
      Fm[f] = (SRw * fmL - SLw * fmR + SLw * SRw * (UR.m - UL.m)) / (SRw - SLw);
    }
  }
  dD.resize(n);
  dm.resize(n);
  for (int i = 0; i < n; ++i) {
    dD[i] = -(FD[i + 1] - FD[i]) / dx;
    dm[i] = -(Fm[i + 1] - Fm[i]) / dx;
  }
}

void Solver::rhs_tracer(const std::vector<double>& u, const std::vector<double>& S,
                        std::vector<double>& dS) const {
  const int n = grid_.cells;
  const double dx = grid_.dx();
  Ghosted gS{S, n, grid_.bc};
  dS.resize(n);
  for (int i = 0; i < n; ++i) {
    const double grad =
        u[i] > 0.0 ? (gS(i) - gS(i - 1)) / dx : (gS(i + 1) - gS(i)) / dx;
    dS[i] = -u[i] * grad;
  }
}

void Solver::recover(std::vector<double>& D, std::vector<double>& m,
                     const std::vector<double>& S, std::vector<double>& rho,
                     std::vector<double>& u) const {
  const int n = grid_.cells;
  for (int i = 0; i < n; ++i) {
    const double Pg = eos_.pressure(std::max(rho[i], 0.0), S[i]);
    RecoveryResult rec = cons_to_prim({D[i], m[i], S[i]}, S[i], eos_, Pg);
    rho[i] = rec.rho;
    u[i] = rec.u;
  }
}

double Solver::step(double dt_cap) {
  const int n = grid_.cells;
  const double vmax = max_signal_speed();
  double dt = cfl_ * grid_.dx() / std::max(vmax, 1e-14);
  if (dt_cap > 0.0) dt = std::min(dt, dt_cap);

  std::vector<double> D0(n), m0(n);
  for (int i = 0; i < n; ++i) {
    ConservedState cs = prim_to_cons(rho_[i], u_[i], S_[i], eos_);
    D0[i] = cs.D;
    m0[i] = cs.m;
  }

  // stage 1
  std::vector<double> dD, dm, dS;
  rhs_acoustic(rho_, u_, S_, dD, dm);
  rhs_tracer(u_, S_, dS);
  std::vector<double> D1(n), m1(n), S1(n), rho1(rho_), u1(u_);
  for (int i = 0; i < n; ++i) {
    D1[i] = D0[i] + dt * dD[i];
    m1[i] = m0[i] + dt * dm[i];
    S1[i] = S_[i] + dt * dS[i];
  }
  recover(D1, m1, S1, rho1, u1);

  // stage 2 (Heun average)
  std::vector<double> dD1, dm1, dS1;
  rhs_acoustic(rho1, u1, S1, dD1, dm1);
  rhs_tracer(u1, S1, dS1);
  for (int i = 0; i < n; ++i) {
    D0[i] = 0.5 * (D0[i] + D1[i] + dt * dD1[i]);
    m0[i] = 0.5 * (m0[i] + m1[i] + dt * dm1[i]);
    S_[i] = 0.5 * (S_[i] + S1[i] + dt * dS1[i]);
  }
  recover(D0, m0, S_, rho_, u_);

  t_ += dt;
  return dt;
}

FieldSnapshot Solver::snapshot() const {
  FieldSnapshot s;
  s.t = t_;
  s.rho = rho_;
  s.u = u_;
  s.S = S_;
  return s;
}

std::pair<double, double> Solver::totals() const {
  double sd = 0.0, sm = 0.0;
  for (int i = 0; i < grid_.cells; ++i) {
    ConservedState cs = prim_to_cons(rho_[i], u_[i], S_[i], eos_);
    sd += cs.D;
    sm += cs.m;
  }
  return {sd * grid_.dx(), sm * grid_.dx()};
}

void RunHistory::state_at(double t, double x, double& rho, double& u, double& S) const {
  if (snaps.empty()) throw domain_error("RunHistory: empty");
  std::size_t k = lower_snap(t);
  const FieldSnapshot& a = snaps[k];
  const FieldSnapshot& b = snaps[std::min(k + 1, snaps.size() - 1)];
  const double ta = times[k];
  const double tb = times[std::min(k + 1, times.size() - 1)];
  const double wt = (tb > ta) ? std::clamp((t - ta) / (tb - ta), 0.0, 1.0) : 0.0;

  auto sample = [&](const FieldSnapshot& s, double& r_, double& u_, double& S_) {
    const int n = grid.cells;
    const double dx = grid.dx();
    double xi = (x - grid.x_min) / dx - 0.5;
    if (grid.bc == Bc::periodic) {
      const double span = n;
      xi = std::fmod(std::fmod(xi, span) + span, span);
    } else {
      xi = std::clamp(xi, 0.0, static_cast<double>(n - 1));
    }
    int i0 = static_cast<int>(std::floor(xi));
    double f = xi - i0;
    int i1 = i0 + 1;
    if (grid.bc == Bc::periodic) {
      i0 = ((i0 % n) + n) % n;
      i1 = (i0 + 1) % n;
    } else {
      i0 = std::clamp(i0, 0, n - 1);
      i1 = std::clamp(i1, 0, n - 1);
    }
    r_ = (1.0 - f) * s.rho[i0] + f * s.rho[i1];
    u_ = (1.0 - f) * s.u[i0] + f * s.u[i1];
    S_ = (1.0 - f) * s.S[i0] + f * s.S[i1];
  };

  double r0, u0, S0, r1, u1, S1;
  sample(a, r0, u0, S0);
  sample(b, r1, u1, S1);
  rho = (1.0 - wt) * r0 + wt * r1;
  u = (1.0 - wt) * u0 + wt * u1;
  S = (1.0 - wt) * S0 + wt * S1;
}

std::size_t RunHistory::lower_snap(double t) const {
  auto it = std::upper_bound(times.begin(), times.end(), t);
  if (it == times.begin()) return 0;
  return std::min<std::size_t>(times.size() - 1, (it - times.begin()) - 1);
}

RunHistory run_solver(Solver& solver, double t_end, int store_stride,
                      const std::function<void(const Solver&)>& on_step) {
  RunHistory hist;
  hist.grid = solver.grid();
  hist.eos = solver.eos();
  hist.times.push_back(solver.time());
  hist.snaps.push_back(solver.snapshot());
  long step_count = 0;
  while (solver.time() < t_end - 1e-14) {
    solver.step(t_end - solver.time());
    ++step_count;
    if (on_step) on_step(solver);
    if (step_count % std::max(1, store_stride) == 0 ||
        solver.time() >= t_end - 1e-14) {
      hist.times.push_back(solver.time());
      hist.snaps.push_back(solver.snapshot());
    }
  }
  return hist;
}

}  // namespace relblow
