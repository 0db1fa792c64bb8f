#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "relblow/gas.hpp"
#include "relblow/thresholds.hpp"

namespace relblow {

// Sampled initial profiles plus derived fields (filled on demand by the
// classifiers; derivatives use fourth-order central differences).
struct InitialData {
  std::vector<double> x;
  std::vector<double> rho0, u0, S0;

  double dx() const;
  void validate() const;
};

// Analytic profile families for one field.
struct ProfileSpec {
  enum class Family { constant, gaussian, tanh_ramp, sine };
  Family family = Family::constant;
  double base = 0.0;
  double amp = 0.0;
  double x0 = 0.0;
  double width = 1.0;

  double operator()(double x) const;
};

InitialData sample_profiles(double x_min, double x_max, int samples,
                            const ProfileSpec& rho, const ProfileSpec& u,
                            const ProfileSpec& S);

// CSV with columns x, rho, u, S.
InitialData load_initial_csv(const std::string& path);

// Data must resolve at least twice the intended solver grid.
void require_resolution(const InitialData& data, int solver_cells);

struct AssumptionCheck {
  std::string name;
  bool pass = false;
  double margin = 0.0;  // positive means satisfied with room
};

enum class IsoVerdict { global, finite_time, outside_theory };
enum class NonisoVerdict { blow_up_guaranteed, inconclusive, outside_theory };

const char* to_string(IsoVerdict v);
const char* to_string(NonisoVerdict v);

struct CriteriaReport {
  std::vector<AssumptionCheck> assumptions;

  // compression intervals by family: x-ranges where the spatial derivative of
  // the corresponding Riemann variable is negative
  std::vector<std::pair<double, double>> forward_compression;   // dz/dx < 0
  std::vector<std::pair<double, double>> backward_compression;  // dw/dx < 0

  // isentropic dichotomy
  std::optional<IsoVerdict> iso_verdict;
  double min_xi0 = 0.0, min_zeta0 = 0.0;
  double argmin_x = 0.0;
  bool vacuum_samples_skipped = false;
  // predicted blow-up window from the reciprocal law with the measured
  // extremes of the damping rate over the data
  double window_lo = -1.0, window_hi = -1.0;

  // non-isentropic criterion
  std::optional<NonisoVerdict> noniso_verdict;
  double min_r0 = 0.0, min_q0 = 0.0;
  double witness_x = 0.0;
  bool informal_compression = false;  // r0 < 0 or q0 < 0 somewhere
  double N1 = 0.0, N2 = 0.0;
  std::optional<CriteriaConstants> constants;
  ThresholdCertificate threshold_cert;

  std::string to_json() const;
};

CriteriaReport classify_iso(const InitialData& data, const GasParams& gas,
                            double rho_floor = default_rho_floor);

// Optional precomputed thresholds short-circuit the N1/N2 search (families of
// data sharing the same box reuse one computation).
CriteriaReport classify_noniso(const InitialData& data, const GasParams& gas,
                               const ThresholdOpts& opts = {},
                               const std::optional<ThresholdResult>& precomputed = {});

// Derived pointwise fields of the non-isentropic classifier (also used by the
// dynamics checks): r0 and q0 on the sample grid.
struct NonisoFields {
  std::vector<double> w0, z0, r0, q0, eta0, nt0, theta1, theta2;
  double tv_S0 = 0.0;
  double eps = 0.0;  // 0.5 inf (z0 - w0)
};

NonisoFields noniso_fields(const InitialData& data, const GasParams& gas);

// Discrete total variation.
double total_variation(const std::vector<double>& v);

}  // namespace relblow
