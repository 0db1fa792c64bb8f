#include "relblow/riemann_iso.hpp"

#include <cmath>

#include "relblow/errors.hpp"
#include "relblow/numerics.hpp"

namespace relblow {

namespace {

// Y = Arctan(y) with y = k rho^{(g-1)/2}/c; equals (z-w)(g-1)/(4 c sqrt(g)).
double angle_from_gap(double gap, const GasParams& gas) {
  return gap * (gas.gamma - 1.0) / (4.0 * gas.c * std::sqrt(gas.gamma));
}

void check_admissible(const RiemannPairIso& pair, const GasParams& gas) {
  if (pair.gap() < 0.0) throw domain_error("riemann_iso: z - w < 0");
  if (pair.gap() >= admissible_gap_max_iso(gas))
    throw domain_error("riemann_iso: gap at or beyond the sonic bound");
}

}  // namespace

double admissible_gap_max_iso(const GasParams& gas) {
  const double sg = std::sqrt(gas.gamma);
  return 4.0 * gas.c * sg / (gas.gamma - 1.0) * std::atan(1.0 / sg);
}

double sound_speed_iso(double rho, const GasParams& gas) {
  if (rho < 0.0) throw domain_error("sound_speed_iso: rho < 0");
  return gas.k * std::sqrt(gas.gamma) * std::pow(rho, 0.5 * (gas.gamma - 1.0));
}

double riemann_gap_iso(double rho, const GasParams& gas) {
  if (rho < 0.0) throw domain_error("riemann_gap_iso: rho < 0");
  const double y = gas.k * std::pow(rho, 0.5 * (gas.gamma - 1.0)) / gas.c;
  return 4.0 * gas.c * std::sqrt(gas.gamma) / (gas.gamma - 1.0) * std::atan(y);
}

double riemann_gap_iso_quadrature(double rho, const GasParams& gas, double tol) {
  if (rho < 0.0) throw domain_error("riemann_gap_iso_quadrature: rho < 0");
  if (rho == 0.0) return 0.0;
  // Substitute sigma = tau^{2/(g-1)} so the sigma^{(g-3)/2} endpoint is flat.
  const double g = gas.gamma;
  const double p = 2.0 / (g - 1.0);
  auto f = [&](double tau) {
    double sigma = std::pow(tau, p);
    double sp = sound_speed_iso(sigma, gas);
    double P = gas.k * gas.k * std::pow(sigma, g);
    double integrand = sp / (sigma + P / gas.c2());
    return integrand * p * std::pow(tau, p - 1.0);
  };
  double tau_max = std::pow(rho, 1.0 / p);
  return 2.0 * num::integrate(f, 0.0, tau_max, tol, tol);
}

RiemannPairIso to_riemann_iso(double rho, double u, const GasParams& gas) {
  if (rho < 0.0) throw domain_error("to_riemann_iso: rho < 0");
  if (!(std::abs(u) < gas.c)) throw domain_error("to_riemann_iso: |u| >= c");
  const double m = 0.5 * gas.c * std::log((gas.c + u) / (gas.c - u));
  const double half_gap = 0.5 * riemann_gap_iso(rho, gas);
  return {m - half_gap, m + half_gap};
}

std::pair<double, double> from_riemann_iso(const RiemannPairIso& pair, const GasParams& gas) {
  check_admissible(pair, gas);
  const double u = gas.c * std::tanh((pair.w + pair.z) / (2.0 * gas.c));
  const double Y = angle_from_gap(pair.gap(), gas);
  const double rho = std::pow(gas.c / gas.k * std::tan(Y), 2.0 / (gas.gamma - 1.0));
  return {rho, u};
}

std::pair<double, double> eigenvalues_iso(double rho, double u, const GasParams& gas) {
  if (rho < 0.0) throw domain_error("eigenvalues_iso: rho < 0");
  if (!(std::abs(u) < gas.c)) throw domain_error("eigenvalues_iso: |u| >= c");
  const double s = sound_speed_iso(rho, gas);
  if (!(s < gas.c)) throw domain_error("eigenvalues_iso: sound speed >= c");
  const double c2 = gas.c2();
  return {(u - s) / (1.0 - u * s / c2), (u + s) / (1.0 + u * s / c2)};
}

std::pair<double, double> eigenvalues_iso(const RiemannPairIso& pair, const GasParams& gas) {
  auto [rho, u] = from_riemann_iso(pair, gas);
  return eigenvalues_iso(rho, u, gas);
}

WeightsIso weights_h1_h2(const RiemannPairIso& pair, const GasParams& gas) {
  check_admissible(pair, gas);
  if (!(pair.gap() > 0.0)) throw domain_error("weights_h1_h2: z == w (vacuum)");
  const double g = gas.gamma;
  const double c = gas.c;
  const double Y = angle_from_gap(pair.gap(), gas);
  const double sg = std::sqrt(g);
  const double cosY = std::cos(Y);
  const double sinY = std::sin(Y);
  const double common = (3.0 * g - 1.0) / (2.0 * g - 2.0) * std::log(cosY) +
                        (g - 3.0) / (2.0 * g - 2.0) * std::log(sinY) +
                        pair.gap() / (2.0 * c);
  const double esum = std::exp((pair.w + pair.z) / c);
  WeightsIso out;
  out.h1 = common - std::log((1.0 + esum) * cosY - (esum - 1.0) * sg * sinY);
  const double e2w = std::exp(2.0 * pair.w / c);
  const double egap = std::exp(pair.gap() / c);
  out.h2 = common - std::log((e2w + egap) * cosY + (e2w - egap) * sg * sinY);
  return out;
}

LambdaPartialsIso lambda_partials_iso(const RiemannPairIso& pair, const GasParams& gas) {
  check_admissible(pair, gas);
  const double g = gas.gamma;
  const double c = gas.c;
  const double Y = angle_from_gap(pair.gap(), gas);
  const double T = std::tan(Y);
  const double sg = std::sqrt(g);
  const double sec2 = 1.0 + T * T;
  // d/dw,z of ln((1 -+ sqrt(g) Tan Y)/(1 +- sqrt(g) Tan Y)) through Y.
  const double q = (g - 1.0) * sec2 / (2.0 * c * (1.0 - g * T * T));
  const double dH1_dw = 1.0 / c + q;
  const double dH1_dz = 1.0 / c - q;
  const double dH2_dw = 1.0 / c - q;
  const double dH2_dz = 1.0 / c + q;

  const double esum = std::exp((pair.w + pair.z) / c);
  const double eH1 = esum * (1.0 - sg * T) / (1.0 + sg * T);
  const double eH2 = esum * (1.0 + sg * T) / (1.0 - sg * T);
  const double f1 = 2.0 * c * eH1 / ((eH1 + 1.0) * (eH1 + 1.0));
  const double f2 = 2.0 * c * eH2 / ((eH2 + 1.0) * (eH2 + 1.0));

  LambdaPartialsIso out;
  out.dl1_dw = f1 * dH1_dw;
  out.dl1_dz = f1 * dH1_dz;
  out.dl2_dw = f2 * dH2_dw;
  out.dl2_dz = f2 * dH2_dz;
  return out;
}

double quantity_Y(double rho, const GasParams& gas) {
  if (!(rho > 0.0)) throw domain_error("quantity_Y: rho <= 0");
  const double g = gas.gamma;
  const double y = gas.k * std::pow(rho, 0.5 * (g - 1.0)) / gas.c;
  const double y2 = y * y;
  return std::pow(y / std::sqrt(1.0 + y2), (3.0 - g) / (2.0 * g - 2.0)) *
         std::pow(1.0 + y2, (g + 1.0) / (4.0 * g - 4.0));
}

double riccati_rate_1(const RiemannPairIso& pair, const GasParams& gas) {
  WeightsIso h = weights_h1_h2(pair, gas);
  return std::exp(-h.h1) * lambda_partials_iso(pair, gas).dl1_dw;
}

double riccati_rate_2(const RiemannPairIso& pair, const GasParams& gas) {
  WeightsIso h = weights_h1_h2(pair, gas);
  return std::exp(-h.h2) * lambda_partials_iso(pair, gas).dl2_dz;
}

GradientStateIso gradient_state_iso(const RiemannPairIso& pair, double dz_dx, double dw_dx,
                                    const GasParams& gas) {
  WeightsIso h = weights_h1_h2(pair, gas);
  GradientStateIso out;
  out.alpha = dz_dx;
  out.beta = dw_dx;
  out.xi = std::exp(h.h1) * dz_dx;
  out.zeta = std::exp(h.h2) * dw_dx;
  return out;
}

RiccatiReconstruction riccati_reciprocal_integral(double xi0, std::span<const double> t,
                                                  std::span<const double> rate) {
  if (xi0 == 0.0) throw domain_error("riccati_reciprocal_integral: xi(0) == 0");
  if (t.size() != rate.size() || t.size() < 2)
    throw domain_error("riccati_reciprocal_integral: need matching samples, size >= 2");
  RiccatiReconstruction out;
  out.inv_xi.resize(t.size());
  out.inv_xi[0] = 1.0 / xi0;
  double acc = 0.0;
  for (std::size_t i = 1; i < t.size(); ++i) {
    acc += 0.5 * (rate[i] + rate[i - 1]) * (t[i] - t[i - 1]);
    out.inv_xi[i] = 1.0 / xi0 + acc;
  }
  if (xi0 < 0.0) out.t_star = num::first_zero_crossing(t, out.inv_xi);
  return out;
}

}  // namespace relblow
