#include "relblow/numerics.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <thread>

#include "relblow/errors.hpp"

namespace relblow::num {

double bracketed_newton(const std::function<double(double)>& f,
                        const std::function<double(double)>& df, double lo, double hi,
                        double xtol, double ftol, int max_iter) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (flo * fhi > 0.0) throw numerical_error("bracketed_newton: root not bracketed");

  double x = 0.5 * (lo + hi);
  double fx = f(x);
  for (int it = 0; it < max_iter; ++it) {
    if (std::abs(fx) <= ftol) return x;
    if (fx * flo < 0.0) {
      hi = x;
      fhi = fx;
    } else {
      lo = x;
      flo = fx;
    }
    double d = df(x);
    double xn = (d != 0.0) ? x - fx / d : lo;
    if (!(xn > lo) || !(xn < hi)) xn = 0.5 * (lo + hi);  // bisection fallback
    if (std::abs(xn - x) <= xtol) return xn;
    x = xn;
    fx = f(x);
  }
  if (std::abs(fx) <= ftol * 1e3) return x;
  throw numerical_error("bracketed_newton: no convergence");
}

double bisect(const std::function<double(double)>& f, double lo, double hi, double xtol,
              int max_iter) {
  double flo = f(lo);
  if (flo == 0.0) return lo;
  double fhi = f(hi);
  if (fhi == 0.0) return hi;
  if (flo * fhi > 0.0) throw numerical_error("bisect: root not bracketed");
  for (int it = 0; it < max_iter && hi - lo > xtol; ++it) {
    double mid = 0.5 * (lo + hi);
    double fm = f(mid);
    if (fm == 0.0) return mid;
    if (fm * flo < 0.0) {
      hi = mid;
      fhi = fm;
    } else {
      lo = mid;
      flo = fm;
    }
  }
  return 0.5 * (lo + hi);
}

double golden_min(const std::function<double(double)>& f, double lo, double hi,
                  double xtol, int pre_scan) {
  // coarse scan to land in the right basin
  double best_x = lo, best_f = f(lo);
  for (int i = 1; i <= pre_scan; ++i) {
    double x = lo + (hi - lo) * i / pre_scan;
    double v = f(x);
    if (v < best_f) {
      best_f = v;
      best_x = x;
    }
  }
  double a = std::max(lo, best_x - (hi - lo) / pre_scan);
  double b = std::min(hi, best_x + (hi - lo) / pre_scan);
  constexpr double invphi = 0.6180339887498949;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > xtol) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

namespace {

struct GslFn {
  const std::function<double(double)>* f;
};

double gsl_trampoline(double x, void* params) {
  return (*static_cast<GslFn*>(params)->f)(x);
}

struct GslInit {
  GslInit() { gsl_set_error_handler_off(); }
};

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol, double rel_tol) {
  static GslInit init_once;
  if (a == b) return 0.0;
  GslFn wrap{&f};
  gsl_function gf;
  gf.function = &gsl_trampoline;
  gf.params = &wrap;

  constexpr std::size_t limit = 512;
  gsl_integration_workspace* ws = gsl_integration_workspace_alloc(limit);
  double result = 0.0, abserr = 0.0;
  int status = gsl_integration_qag(&gf, a, b, abs_tol, rel_tol, limit,
                                   GSL_INTEG_GAUSS15, ws, &result, &abserr);
  gsl_integration_workspace_free(ws);
  if (status != 0 && status != GSL_EROUND) {
    throw numerical_error("integrate: QAG failed with status " + std::to_string(status));
  }
  return result;
}

double deriv_central(const std::function<double(double)>& f, double x, double h) {
  auto d = [&](double hh) { return (f(x + hh) - f(x - hh)) / (2.0 * hh); };
  double d1 = d(h);
  double d2 = d(0.5 * h);
  return (4.0 * d2 - d1) / 3.0;
}

double deriv2_central(const std::function<double(double)>& f, double x, double h) {
  auto d = [&](double hh) { return (f(x + hh) - 2.0 * f(x) + f(x - hh)) / (hh * hh); };
  double d1 = d(h);
  double d2 = d(0.5 * h);
  return (4.0 * d2 - d1) / 3.0;
}

double deriv2_mixed(const std::function<double(double, double)>& f, double x, double y,
                    double hx, double hy) {
  auto d = [&](double ax, double ay) {
    return (f(x + ax, y + ay) - f(x + ax, y - ay) - f(x - ax, y + ay) +
            f(x - ax, y - ay)) /
           (4.0 * ax * ay);
  };
  double d1 = d(hx, hy);
  double d2 = d(0.5 * hx, 0.5 * hy);
  return (4.0 * d2 - d1) / 3.0;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw domain_error("loglog_slope: need matching arrays of size >= 2");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0))
      throw domain_error("loglog_slope: values must be positive");
    double lx = std::log(x[i]);
    double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double first_zero_crossing(std::span<const double> t, std::span<const double> v) {
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (v[i] == 0.0) return t[i];
    if (v[i - 1] * v[i] < 0.0) {
      double w = v[i - 1] / (v[i - 1] - v[i]);
      return t[i - 1] + w * (t[i] - t[i - 1]);
    }
  }
  return -1.0;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  unsigned hw = std::thread::hardware_concurrency();
  std::size_t workers = std::min<std::size_t>(hw == 0 ? 2 : hw, n);
  if (workers <= 1 || n < 4) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      for (std::size_t i = w; i < n; i += workers) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

void rk4_sweep(const std::function<void(double, std::span<const double>, std::span<double>)>& rhs,
               std::span<double> y, double s0, std::span<const double> queries,
               double base_step,
               const std::function<void(std::size_t, double, std::span<const double>)>& on_query) {
  const std::size_t dim = y.size();
  std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);
  auto advance = [&](double s, double h) {
    rhs(s, y, k1);
    for (std::size_t d = 0; d < dim; ++d) tmp[d] = y[d] + 0.5 * h * k1[d];
    rhs(s + 0.5 * h, tmp, k2);
    for (std::size_t d = 0; d < dim; ++d) tmp[d] = y[d] + 0.5 * h * k2[d];
    rhs(s + 0.5 * h, tmp, k3);
    for (std::size_t d = 0; d < dim; ++d) tmp[d] = y[d] + h * k3[d];
    rhs(s + h, tmp, k4);
    for (std::size_t d = 0; d < dim; ++d)
      y[d] += h / 6.0 * (k1[d] + 2.0 * k2[d] + 2.0 * k3[d] + k4[d]);
  };

  double s = s0;
  for (std::size_t qi = 0; qi < queries.size(); ++qi) {
    double target = queries[qi];
    if (target < s) throw domain_error("rk4_sweep: queries must be ascending");
    double span = target - s;
    if (span > 0.0) {
      int steps = std::max(1, static_cast<int>(std::ceil(span / base_step)));
      double h = span / steps;
      for (int i = 0; i < steps; ++i) {
        advance(s, h);
        s += h;
      }
      s = target;
    }
    on_query(qi, s, y);
  }
}

}  // namespace relblow::num
