#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace relblow::num {

// Safeguarded Newton on a bracket [lo, hi]: f(lo) and f(hi) must have opposite
// signs (or one of them vanish). Newton steps that leave the bracket fall back
// to bisection. Returns the root to |f| <= ftol or |step| <= xtol.
double bracketed_newton(const std::function<double(double)>& f,
                        const std::function<double(double)>& df, double lo, double hi,
                        double xtol, double ftol, int max_iter = 100);

// Plain bisection for monotone residuals without a cheap derivative.
double bisect(const std::function<double(double)>& f, double lo, double hi, double xtol,
              int max_iter = 200);

// Golden-section minimum of a unimodal f on [lo, hi]; a coarse pre-scan guards
// against mild non-unimodality. Returns argmin.
double golden_min(const std::function<double(double)>& f, double lo, double hi,
                  double xtol, int pre_scan = 9);

// Adaptive Gauss-Kronrod integral of f on [a, b] (GSL QAG, 15-point rule).
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol = 1e-10, double rel_tol = 1e-10);

// Central difference d/dx with Richardson extrapolation (two stencils h, h/2).
double deriv_central(const std::function<double(double)>& f, double x, double h);

// Second derivative d2/dx2 with Richardson extrapolation.
double deriv2_central(const std::function<double(double)>& f, double x, double h);

// Mixed second derivative d2/dxdy via the 4-point cross stencil with Richardson.
double deriv2_mixed(const std::function<double(double, double)>& f, double x, double y,
                    double hx, double hy);

// Least-squares slope of log(y) vs log(x); x, y must be positive.
double loglog_slope(std::span<const double> x, std::span<const double> y);

// Linear interpolation of the zero crossing of the samples (t_i, v_i); returns
// the first t where v changes sign, or a negative value when there is none.
double first_zero_crossing(std::span<const double> t, std::span<const double> v);

// Runs fn(i) for i in [0, n) across a small thread pool. Each index writes only
// its own outputs, so results are bit-identical to the serial loop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

// Classical RK4 sweep of dy/ds = rhs(s, y) from s0 through sorted query points.
// Steps are subdivided so every query lands on a step boundary; on_query is
// called with the state at each query point in order.
void rk4_sweep(const std::function<void(double, std::span<const double>, std::span<double>)>& rhs,
               std::span<double> y, double s0, std::span<const double> queries,
               double base_step,
               const std::function<void(std::size_t, double, std::span<const double>)>& on_query);

}  // namespace relblow::num
