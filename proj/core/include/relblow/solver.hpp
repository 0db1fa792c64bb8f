#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "relblow/gas.hpp"

namespace relblow {

enum class Bc { periodic, outflow };

struct GridSpec {
  double x_min = -1.0;
  double x_max = 1.0;
  int cells = 256;
  Bc bc = Bc::periodic;
  double dx() const { return (x_max - x_min) / cells; }
  double x_center(int i) const { return x_min + (i + 0.5) * dx(); }
};

// Pressure law used by the solver: the barotropic P = k^2 rho^gamma or the
// full polytropic law through the rest-mass density root.
struct SolverEos {
  bool isentropic = true;
  GasParams gas;

  double pressure(double rho, double S) const;
  double dP_drho(double rho, double S) const;
  double sound_speed(double rho, double S) const;
};

// Conserved pair of the 2-equation subsystem plus the advected entropy tracer.
struct ConservedState {
  double D = 0.0;      // (c^4 rho + P u^2) / (c^2 (c^2 - u^2))
  double m = 0.0;      // (c^2 rho + P) u / (c^2 - u^2)
  double sigma = 0.0;  // entropy tracer
};

ConservedState prim_to_cons(double rho, double u, double S, const SolverEos& eos);

struct RecoveryResult {
  double rho = 0.0;
  double u = 0.0;
  int iterations = 0;
};

// Inverts the conserved map at fixed tracer S. The two conserved relations are
// enforced algebraically for any pressure iterate, so the Newton loop only
// closes the EOS residual P(rho, S) = P.
RecoveryResult cons_to_prim(const ConservedState& cons, double S_guess,
                            const SolverEos& eos, double P_guess = -1.0);

struct FieldSnapshot {
  double t = 0.0;
  std::vector<double> rho, u, S;
};

// Second-order MUSCL (minmod) + HLL for (D, m); the tracer moves by monotone
// first-order upwind so the entropy maximum principle is exact. Heun stepping.
class Solver {
public:
  Solver(GridSpec grid, SolverEos eos, double cfl = 0.4);

  void set_state(std::vector<double> rho, std::vector<double> u, std::vector<double> S);
  void set_state(const std::function<double(double)>& rho0,
                 const std::function<double(double)>& u0,
                 const std::function<double(double)>& S0);

  // One Heun step; returns the dt taken (capped at dt_cap when positive).
  double step(double dt_cap = -1.0);

  double time() const { return t_; }
  const GridSpec& grid() const { return grid_; }
  const SolverEos& eos() const { return eos_; }
  const std::vector<double>& rho() const { return rho_; }
  const std::vector<double>& u() const { return u_; }
  const std::vector<double>& S() const { return S_; }
  FieldSnapshot snapshot() const;

  // Integrals of D and m over the domain (conservation diagnostics).
  std::pair<double, double> totals() const;

  double max_signal_speed() const;

private:
  void rhs_acoustic(const std::vector<double>& rho, const std::vector<double>& u,
                    const std::vector<double>& S, std::vector<double>& dD,
                    std::vector<double>& dm) const;
  void rhs_tracer(const std::vector<double>& u, const std::vector<double>& S,
                  std::vector<double>& dS) const;
  void recover(std::vector<double>& D, std::vector<double>& m,
               const std::vector<double>& S, std::vector<double>& rho,
               std::vector<double>& u) const;

  GridSpec grid_;
  SolverEos eos_;
  double cfl_;
  double t_ = 0.0;
  std::vector<double> rho_, u_, S_;
};

// Stored run for characteristic tracing and monitoring. Snapshots are kept
// every `stride` steps plus the final state.
struct RunHistory {
  GridSpec grid;
  SolverEos eos;
  std::vector<double> times;
  std::vector<FieldSnapshot> snaps;

  // bilinear space-time interpolation of the primitive state
  void state_at(double t, double x, double& rho, double& u, double& S) const;
  std::size_t lower_snap(double t) const;
};

// Runs the solver to t_end recording history; on_step (optional) sees the
// solver after every step.
RunHistory run_solver(Solver& solver, double t_end, int store_stride = 1,
                      const std::function<void(const Solver&)>& on_step = nullptr);

}  // namespace relblow
