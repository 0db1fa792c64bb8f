#pragma once

// Internal cumulative integrator shared by riemann_non.cpp and thresholds.cpp.
//
// Everything the weight machinery needs along a constant-(anchor, S) path is a
// function of the half-gap variable Fhat = (z-w)/2 alone: the density sigma
// with F(sigma,S) = Fhat, the entropy-weight integrals J_h/J_g anchored at
// eps, dF/dS, d(J)/dS, and the path integrals behind L and M. One RK4 sweep in
// s = ln(Fhat) accumulates all of them and reports at the requested query
// points, so a whole z-row of a grid costs one sweep.

#include <span>
#include <vector>

#include "relblow/gas.hpp"
#include "relblow/riemann_non.hpp"

namespace relblow::detail {

struct SweepRow {
  // per query point (ascending Fhat order)
  std::vector<double> fhat;    // the query half-gaps
  std::vector<double> sigma;   // density with F(sigma) = Fhat
  std::vector<double> J_h;     // int_eps^Fhat (c+sqrt(Lam))^2/(2c^2 sqrt(Lam)) dXi
  std::vector<double> J_g;     // same with (c-sqrt(Lam))^2
  std::vector<double> dSF;     // dF/dS at (sigma, S)
  std::vector<double> dSJ;     // d/dS of J_h (== d/dS of J_g)
  std::vector<double> I;       // path integral behind L (left anchor) or M (right anchor)
};

// left_anchor = true: path states are (w = anchor, z = anchor + 2 Fhat); the I
// component accumulates the integral behind L. Otherwise states are
// (w = anchor - 2 Fhat, z = anchor) and I is the integral behind M.
// Queries must be ascending positive half-gaps.
SweepRow run_gap_sweep(double anchor, bool left_anchor, double S,
                       std::span<const double> fhat_queries, const WeightContext& ctx);

// L/M and weight assembly from a sweep row.
// L = -(1/n_t^2) e^{J_h(eps-correction)} I ; M = +(1/n_t^2) e^{...} I.
double weight_L_from_row(const SweepRow& row, std::size_t qi, double anchor_w, double S,
                         const GasParams& gas);
double weight_M_from_row(const SweepRow& row, std::size_t qi, double anchor_z, double S,
                         const GasParams& gas);

}  // namespace relblow::detail
