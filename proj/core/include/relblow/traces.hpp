#pragma once

#include <optional>
#include <vector>

#include "relblow/riemann_non.hpp"
#include "relblow/solver.hpp"

namespace relblow {

// Family numbering of the 3x3 system; the barotropic 2x2 system maps its
// 1-family (backward acoustic) to `backward` and its 2-family to `forward`.
enum class CharFamily : int { entropy = 1, forward = 2, backward = 3 };

struct CharTrace {
  CharFamily family = CharFamily::forward;
  bool truncated = false;    // left the domain (outflow boundaries)
  bool has_vacuum = false;   // weight quantities skipped below rho_floor
  std::vector<double> t, x;
  std::vector<double> rho, u, S;
  std::vector<double> w, z;
  std::vector<double> g1, g2;      // xi/zeta (isentropic) or r/q (full law)
  std::vector<double> Y;           // Riccati rate scale (isentropic only)
  std::vector<double> rate;        // damping coefficient of the family
  std::vector<double> cum_rate;    // trapezoidal integral of rate
  std::vector<double> theta1, theta2;  // conserved combinations (full law)
};

struct TraceOptions {
  double rho_floor = default_rho_floor;
  // eps for the full-law weights; ignored for isentropic histories
  double weight_eps = 0.0;
};

// RK2 integration of dx/dt = lambda_family through the interpolated history,
// sampled at the stored snapshot times.
CharTrace trace_characteristic(const RunHistory& hist, CharFamily family, double x0,
                               const TraceOptions& opts = {});

// Per-snapshot gradient extrema: max |dz/dx|, max |dw/dx|, min rho.
struct GradientSeries {
  std::vector<double> t;
  std::vector<double> max_dxz, max_dxw, min_rho;
  double initial_max_dxz = 0.0;
  double initial_max_dxw = 0.0;
};

GradientSeries gradient_series(const RunHistory& hist);

struct BlowupObservation {
  bool threshold_crossed = false;
  double t_cross = -1.0;
  double x_peak = 0.0;
  double growth_factor = 0.0;  // threshold used
  GradientSeries series;
};

// Declares a threshold crossing when max |dz/dx| (or |dw/dx|) exceeds
// growth_factor x its initial value. Confirmation requires the refinement
// signature below; a single-grid threshold alone cannot separate steepening
// from blow-up.
BlowupObservation monitor_blowup(const RunHistory& hist, double growth_factor = 100.0);

struct RefinementSignature {
  double ratio = 0.0;  // fine/coarse peak gradient near the crossing time
  bool doubling = false;
};

RefinementSignature blowup_refinement_signature(const BlowupObservation& coarse,
                                                const BlowupObservation& fine,
                                                double window_frac = 0.08);

// Number of sign changes of x_a(t) - x_b(t) over the common time range.
int crossing_count(const CharTrace& a, const CharTrace& b);

}  // namespace relblow
