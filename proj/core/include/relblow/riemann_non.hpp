#pragma once

#include <array>
#include <span>
#include <tuple>
#include <vector>

#include "relblow/eos.hpp"
#include "relblow/gas.hpp"

namespace relblow {

// Riemann variables of the 3x3 system: z - w > 0 off vacuum, Shat = S.
struct RiemannTriple {
  double w = 0.0;
  double z = 0.0;
  double Shat = 0.0;
  double half_gap() const { return 0.5 * (z - w); }
};

// Spatial gradient bundle. alpha = dw/dx, beta = dz/dx (note the swap relative
// to the 2x2 system), eta = dS/dx, n_t = c n / sqrt(c^2 - u^2),
// alpha_t = alpha - a eta, beta_t = beta + a eta,
// r = e^h alpha_t - L eta n_t, q = e^g beta_t - M eta n_t.
struct GradientStateNon {
  double alpha = 0.0;
  double beta = 0.0;
  double eta = 0.0;
  double alpha_t = 0.0;
  double beta_t = 0.0;
  double n_t = 0.0;
  double r = 0.0;
  double q = 0.0;
};

// Quantities constant along 1-characteristics of exact solutions:
// theta1 = eta / n_t, theta2 = (dxxS - (eta/n_t) dx n_t) / n_t^2.
struct ConservedAlongFlow {
  double theta1 = 0.0;
  double theta2 = 0.0;
};

// Eigenvalue/weight building blocks at one state.
struct HGState {
  double Lambda = 0.0;  // dP/drho at the state
  double H = 0.0;       // ln((c+lambda3)/(c-lambda3))
  double G = 0.0;       // ln((c+lambda2)/(c-lambda2))
};

// Partial derivatives in (w, z, Shat) of Lambda, H, G, a, n_t (closed forms).
struct CoordDerivs {
  double dLam_dw = 0.0, dLam_dz = 0.0, dLam_dS = 0.0;
  double dH_dw = 0.0, dH_dz = 0.0, dH_dS = 0.0;
  double dG_dw = 0.0, dG_dz = 0.0, dG_dS = 0.0;
  double da_dw = 0.0, da_dz = 0.0;
  double dnt_dw = 0.0, dnt_dz = 0.0, dnt_dS = 0.0;
};

struct WeightsNon {
  double h = 0.0;
  double g = 0.0;
  double L = 0.0;
  double M = 0.0;
};

struct WeightPartials {
  double dh_dw = 0.0, dh_dz = 0.0, dh_dS = 0.0;
  double dg_dw = 0.0, dg_dz = 0.0, dg_dS = 0.0;
};

struct LMPartials {
  double dL_dw = 0.0, dL_dz = 0.0, dL_dS = 0.0;
  double dM_dw = 0.0, dM_dz = 0.0, dM_dS = 0.0;
};

// Coefficients of the decoupled gradient ODEs along the 3- and 2-families.
struct CoefficientsAB {
  double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0, a4 = 0.0;
  double b0 = 0.0, b1 = 0.0, b2 = 0.0, b3 = 0.0, b4 = 0.0;
};

// ---- half-gap integral F and the entropy coupling a ------------------------

// F(rho, S) = (z-w)/2 = integral of c^2 sqrt(dP/dsigma) / (c^2 sigma + P).
// The sigma^{(gamma-3)/2} endpoint is flattened by sigma = tau^{2/(gamma-1)}.
double F_half_gap(double rho, double S, const GasParams& gas, double tol = 1e-12);

// dF/drho = c^2 sqrt(dP/drho) / (c^2 rho + P), closed form.
double dF_drho(double rho, double S, const GasParams& gas);

// dF/dS by quadrature of the closed-form d/dS of the integrand.
double dF_dS(double rho, double S, const GasParams& gas, double tol = 1e-12);

// d/drho of dF/dS (mixed partial, closed form).
double d2F_drhodS(double rho, double S, const GasParams& gas);

// Inverse of F in rho at fixed S (F is strictly increasing).
double rho_from_gap(double half_gap, double S, const GasParams& gas, double tol = 1e-13);

// Entropy coupling a = -dF/dS + (dP/dS / dP/drho) dF/drho, evaluated through
// its integral representation. a(0, S) = 0.
double coupling_a(double rho, double S, const GasParams& gas, double tol = 1e-12);

// Assembled route -dF/dS + (dP/dS / dP/drho) dF/drho (cross-check path).
double coupling_a_assembled(double rho, double S, const GasParams& gas);

// d a / d rho at fixed S, closed form through the EOS derivative pack.
double da_drho(double rho, double S, const GasParams& gas);

// ---- transforms and eigenvalues --------------------------------------------

RiemannTriple to_riemann_non(double rho, double u, double S, const GasParams& gas);
std::tuple<double, double, double> from_riemann_non(const RiemannTriple& t,
                                                    const GasParams& gas);

// Nonzero Jacobian entries of (rho,u,S) -> ((z-w)/2, (z+w)/c, S).
struct PhiJacobian {
  double dF_drho = 0.0;   // (1,1)
  double dF_dS = 0.0;     // (1,3)
  double dm_du = 0.0;     // (2,2) = 2c/(c^2-u^2)
};
PhiJacobian phi_jacobian(double rho, double u, double S, const GasParams& gas);

// lambda1 = u, lambda2/3 = c^2 (u +- s)/(c^2 +- u s) with s = sqrt(dP/drho).
std::array<double, 3> eigenvalues_non(double rho, double u, double S, const GasParams& gas);

// H/G route: lambda2 = c (1 - 2/(e^G + 1)), lambda3 = c (1 - 2/(e^H + 1)).
HGState hg_state(double rho, double u, double S, const GasParams& gas);
std::pair<double, double> lambda23_from_hg(const HGState& s, const GasParams& gas);

double n_tilde(double rho, double u, double S, const GasParams& gas);

// Closed-form derivative pack in the (w, z, Shat) coordinates.
CoordDerivs coord_derivs(double rho, double u, double S, const GasParams& gas,
                         double tol = 1e-12);

// Same pack with a precomputed dF/dS (avoids the quadrature in hot loops).
CoordDerivs coord_derivs_given_dSF(double rho, double u, double S, const GasParams& gas,
                                   double dSF);

// Eigenvalue partials assembled from the pack: dlam2/dx = 2c e^G dG/dx /(e^G+1)^2 etc.
struct LambdaPartialsNon {
  double dl2_dw = 0.0, dl2_dz = 0.0, dl2_dS = 0.0;
  double dl3_dw = 0.0, dl3_dz = 0.0, dl3_dS = 0.0;
};
LambdaPartialsNon lambda_partials_non(double rho, double u, double S, const GasParams& gas);

// ---- integrating weights h, g and the gradient corrections L, M ------------

// eps is the half-gap anchor of the h/g integrals, 0.5 inf(z0 - w0) > 0.
struct WeightContext {
  GasParams gas;
  double eps = 0.0;
  int sweep_steps = 256;  // RK4 resolution of the cumulative path integrals
};

// h, g by direct quadrature (reference-accuracy path used everywhere a single
// state is queried).
std::pair<double, double> weights_h_g(const RiemannTriple& t, const WeightContext& ctx,
                                      double tol = 1e-12);

// L, M by a cumulative sweep in the half-gap variable (see weights_sweep.cpp).
std::pair<double, double> weights_L_M(const RiemannTriple& t, const WeightContext& ctx);

WeightsNon weights_h_g_L_M(const RiemannTriple& t, const WeightContext& ctx);

// Slow nested-quadrature reference for L and M (test oracle).
std::pair<double, double> weights_L_M_reference(const RiemannTriple& t,
                                                const WeightContext& ctx,
                                                double tol = 1e-9);

// dh/d{w,z,S}, dg/d{w,z,S}: endpoint terms are exact, the S-derivative of the
// path integral is accumulated by quadrature.
WeightPartials weight_partials(const RiemannTriple& t, const WeightContext& ctx);

// dL/dz and dM/dw are exact endpoint formulas; the rest use Richardson-
// extrapolated central differences of the sweep evaluation.
LMPartials lm_partials(const RiemannTriple& t, const WeightContext& ctx);

GradientStateNon gradient_state_non(const RiemannTriple& t, double dw_dx, double dz_dx,
                                    double dS_dx, const WeightContext& ctx);

// ---- decoupled ODE coefficients --------------------------------------------

// All directional derivatives reduced to algebraic form through
// d_i S = (lambda_i - lambda_1) eta, d_3 w = a d_3 S, d_2 z = -a d_2 S and the
// conserved combination d_3 eta - (eta/n_t) d_3 n_t = (lambda_3-lambda_1) theta2 n_t^2.
CoefficientsAB coefficients_ab(const RiemannTriple& t, const ConservedAlongFlow& conserved,
                               double eta, double n_t, const WeightContext& ctx);

// RHS of d3 r = -dl3/dw e^{-h} r^2 + a3 r + a4 (family 3) or
// d2 q = -dl2/dz e^{-g} q^2 + b3 q + b4 (family 2), plus the comparison RHS
// -(1/2) dl/d. e^{-.} (v^2 - N^2).
struct OdeRhs {
  double quadratic = 0.0;
  double comparison = 0.0;
  double damping = 0.0;  // dl3/dw e^{-h} or dl2/dz e^{-g}
};

OdeRhs decoupled_ode_rhs_r(double r, double N1, const RiemannTriple& t,
                           const ConservedAlongFlow& conserved, double eta, double n_t,
                           const WeightContext& ctx);
OdeRhs decoupled_ode_rhs_q(double q, double N2, const RiemannTriple& t,
                           const ConservedAlongFlow& conserved, double eta, double n_t,
                           const WeightContext& ctx);

}  // namespace relblow
