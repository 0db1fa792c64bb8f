#include "relblow/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <json.hpp>

#include "relblow/criteria.hpp"
#include "relblow/errors.hpp"
#include "relblow/numerics.hpp"
#include "relblow/riemann_iso.hpp"
#include "relblow/riemann_non.hpp"
#include "relblow/thresholds.hpp"

namespace relblow {

using ordered_json = nlohmann::ordered_json;

std::string IdentitySuiteResult::to_json() const {
  ordered_json j;
  ordered_json arr = ordered_json::array();
  for (const auto& c : checks) {
    arr.push_back({{"name", c.name},
                   {"relation", c.relation},
                   {"samples", c.samples},
                   {"max_residual", c.max_residual},
                   {"tolerance", c.tolerance},
                   {"pass", c.pass}});
  }
  j["checks"] = arr;
  j["all_pass"] = all_pass;
  return j.dump(2);
}

std::string IdentitySuiteResult::to_table() const {
  std::ostringstream os;
  for (const auto& c : checks) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-34s %6zu samples  max %.3e  tol %.1e  %s\n",
                  c.name.c_str(), c.samples, c.max_residual, c.tolerance,
                  c.pass ? "pass" : "FAIL");
    os << buf;
  }
  os << (all_pass ? "ALL PASS\n" : "FAILURES PRESENT\n");
  return os.str();
}

namespace {

struct SuiteBuilder {
  std::vector<CheckResult> checks;

  void add(const std::string& name, const std::string& relation, std::size_t samples,
           double max_residual, double tol) {
    CheckResult c;
    c.name = name;
    c.relation = relation;
    c.samples = samples;
    c.max_residual = max_residual;
    c.tolerance = tol;
    c.pass = !relation.empty() && max_residual <= tol && std::isfinite(max_residual);
    checks.push_back(c);
  }

  IdentitySuiteResult finish() {
    IdentitySuiteResult out;
    std::sort(checks.begin(), checks.end(),
              [](const CheckResult& a, const CheckResult& b) { return a.name < b.name; });
    out.checks = std::move(checks);
    out.all_pass = std::all_of(out.checks.begin(), out.checks.end(),
                               [](const CheckResult& c) { return c.pass; });
    return out;
  }
};

double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(1e-300, std::abs(want));
}

// admissible isentropic sampler: uniform in (w, z-w)
struct IsoSampler {
  const GasParams& gas;
  std::mt19937_64& rng;
  RiemannPairIso operator()() {
    std::uniform_real_distribution<double> ugap(0.05, 0.95);
    std::uniform_real_distribution<double> umid(-1.0, 1.0);
    const double gap = ugap(rng) * admissible_gap_max_iso(gas);
    const double mid = umid(rng) * gas.c;
    return {mid - 0.5 * gap, mid + 0.5 * gap};
  }
};

// admissible full-law sampler: uniform in (w, z-w, S) below a density cap
struct NonSampler {
  const GasParams& gas;
  std::mt19937_64& rng;
  double gap_hi;
  NonSampler(const GasParams& g, std::mt19937_64& r, double rho_cap) : gas(g), rng(r) {
    gap_hi = F_half_gap(rho_cap, g.B, g);
  }
  RiemannTriple operator()() {
    std::uniform_real_distribution<double> ugap(0.05, 1.0);
    std::uniform_real_distribution<double> umid(-0.8, 0.8);
    std::uniform_real_distribution<double> uS(-gas.B, gas.B);
    const double half = ugap(rng) * gap_hi;
    const double mid = umid(rng) * gas.c;
    return {mid - half, mid + half, uS(rng)};
  }
};

}  // namespace

IdentitySuiteResult run_identity_suite(const GasParams& gas, std::uint64_t seed,
                                       int n_samples) {
  gas.validate();
  SuiteBuilder sb;
  std::mt19937_64 rng(seed);
  const int n = std::max(8, n_samples);
  const double c2 = gas.c2();

  // -- EOS derivative pack vs finite differences ----------------------------
  {
    std::uniform_real_distribution<double> uS(-gas.B, gas.B);
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      std::uniform_real_distribution<double> ulog(std::log(1e-3), std::log(1.0));
      const double rho = std::exp(ulog(rng));
      const double S = uS(rng);
      EosDerivs d = eos_derivatives(rho, S, gas);
      const double h1 = std::max(1e-8, 1e-5 * rho);
      const double hS = std::max(1e-8, 1e-5 * std::max(1.0, std::abs(S)));
      auto Pr = [&](double r) { return pressure_full(r, S, gas); };
      auto PS = [&](double s) { return pressure_full(rho, s, gas); };
      worst = std::max(worst, rel_err(num::deriv_central(Pr, rho, h1), d.dP_drho));
      worst = std::max(worst, rel_err(num::deriv_central(PS, S, hS), d.dP_dS));
      const double h2 = std::max(1e-6, 1e-4 * rho);
      worst = std::max(worst, rel_err(num::deriv2_central(Pr, rho, h2), d.d2P_drho2));
      worst = std::max(
          worst, rel_err(num::deriv2_mixed(
                             [&](double r, double s) { return pressure_full(r, s, gas); },
                             rho, S, h2, std::max(1e-6, 1e-4)),
                         d.d2P_drhodS));
      auto nr = [&](double r) { return rest_mass_density(r, S, gas); };
      auto nS = [&](double s) { return rest_mass_density(rho, s, gas); };
      worst = std::max(worst, rel_err(num::deriv_central(nr, rho, h1), d.dn_drho));
      worst = std::max(worst, rel_err(num::deriv_central(nS, S, hS), d.dn_dS));
    }
    sb.add("eos-derivative-pack-fd",
           "closed-form {dP/drho, dP/dS, d2P/drho2, d2P/drhodS, dn/drho, dn/dS} == "
           "central differences of the implicit law",
           n, worst, 1e-6);
  }

  // -- implicit residual and vacuum fixed point ------------------------------
  {
    std::uniform_real_distribution<double> uS(-gas.B, gas.B);
    std::uniform_real_distribution<double> ur(0.0, 2.0);
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      const double rho = ur(rng);
      const double S = uS(rng);
      EosPoint pt = eos_point(rho, S, gas);
      const double res = std::abs(std::pow(pt.n, gas.gamma) * std::exp(S / gas.cv()) +
                                  c2 * (pt.n - rho));
      worst = std::max(worst, res / std::max(1.0, c2 * rho));
    }
    worst = std::max(worst, std::abs(eos_point(0.0, 0.3 * gas.B, gas).n));
    worst = std::max(worst, std::abs(eos_point(0.0, 0.3 * gas.B, gas).P));
    sb.add("eos-implicit-residual",
           "n^gamma e^{S/Cv} + c^2 (n - rho) == 0 within tol_eos; vacuum maps to "
           "n = P = 0",
           n + 1, worst, tol_eos);
  }

  // -- monotonicity ----------------------------------------------------------
  {
    std::uniform_real_distribution<double> uS(-gas.B, gas.B);
    std::uniform_real_distribution<double> ur(1e-6, 2.0);
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      double r1 = ur(rng), r2 = ur(rng);
      if (r2 < r1) std::swap(r1, r2);
      if (r2 - r1 < 1e-9) r2 += 1e-6;
      const double S = uS(rng);
      worst = std::max(worst, rest_mass_density(r1, S, gas) - rest_mass_density(r2, S, gas));
      worst = std::max(worst, pressure_full(r1, S, gas) - pressure_full(r2, S, gas));
      if (gas.B > 0.0) {
        double S2 = std::min(gas.B, S + 0.1);
        if (S2 > S)
          worst = std::max(worst, pressure_full(r1, S, gas) - pressure_full(r1, S2, gas));
      }
    }
    sb.add("eos-monotonicity",
           "n(rho,S) increasing in rho; P(rho,S) increasing in rho and S", n, worst,
           1e-15);
  }

  // -- rho dn/drho <= n with equality in the vacuum limit ---------------------
  {
    double worst_ineq = 0.0;
    double worst_limit = 0.0;
    std::uniform_real_distribution<double> uS(-gas.B, gas.B);
    for (int i = 0; i < n; ++i) {
      std::uniform_real_distribution<double> ulog(std::log(1e-10), std::log(1.0));
      const double rho = std::exp(ulog(rng));
      const double S = uS(rng);
      const double nn = rest_mass_density(rho, S, gas);
      const double lhs = rho * eos_derivatives(rho, S, gas).dn_drho;
      worst_ineq = std::max(worst_ineq, (lhs - nn) / std::max(1e-300, nn));
      // 0 <= 1 - lhs/n <= (gamma-1) rho^{gamma-1} e^{S/Cv} / c^2 exactly
      const double dev = 1.0 - lhs / nn;
      const double bound =
          (gas.gamma - 1.0) * std::pow(rho, gas.gamma - 1.0) * std::exp(S / gas.cv()) / c2;
      worst_limit = std::max(worst_limit, dev - bound * (1.0 + 1e-8));
      worst_limit = std::max(worst_limit, -dev);
    }
    sb.add("eos-dndrho-vacuum-limit",
           "rho dn/drho <= n with 1 - rho dn/drho / n <= (g-1) rho^{g-1} e^{S/Cv}/c^2",
           n, std::max(worst_ineq, worst_limit), 1e-10);
  }

  // -- isentropic transform round trip and quadrature cross-check ------------
  {
    IsoSampler sample{gas, rng};
    double worst = 0.0, worst_q = 0.0;
    for (int i = 0; i < n; ++i) {
      RiemannPairIso p = sample();
      auto [rho, u] = from_riemann_iso(p, gas);
      RiemannPairIso back = to_riemann_iso(rho, u, gas);
      worst = std::max(worst, std::abs(back.w - p.w) / std::max(1.0, std::abs(p.w)));
      worst = std::max(worst, std::abs(back.z - p.z) / std::max(1.0, std::abs(p.z)));
      if (i < std::min(n, 40)) {
        worst_q = std::max(worst_q, std::abs(riemann_gap_iso(rho, gas) -
                                             riemann_gap_iso_quadrature(rho, gas)));
      }
    }
    sb.add("iso-transform-roundtrip", "from(to(rho,u)) == (rho,u)", n, worst, 1e-10);
    sb.add("iso-gap-closed-vs-quadrature",
           "(4 c sqrt(g)/(g-1)) Arctan(k rho^{(g-1)/2}/c) == direct quadrature of the "
           "defining integral",
           std::min(n, 40), worst_q, 1e-10);
  }

  // -- isentropic weight defining relations (finite differences) -------------
  {
    IsoSampler sample{gas, rng};
    double worst = 0.0;
    const int m = std::min(n, 120);
    for (int i = 0; i < m; ++i) {
      RiemannPairIso p = sample();
      const double d = 1e-6 * p.gap();
      auto h1_of = [&](double w, double z) { return weights_h1_h2({w, z}, gas).h1; };
      auto h2_of = [&](double w, double z) { return weights_h1_h2({w, z}, gas).h2; };
      auto l1_of = [&](double w, double z) {
        return eigenvalues_iso(RiemannPairIso{w, z}, gas).first;
      };
      auto l2_of = [&](double w, double z) {
        return eigenvalues_iso(RiemannPairIso{w, z}, gas).second;
      };
      const double dzh1 = (h1_of(p.w, p.z + d) - h1_of(p.w, p.z - d)) / (2.0 * d);
      const double dwh2 = (h2_of(p.w + d, p.z) - h2_of(p.w - d, p.z)) / (2.0 * d);
      const double dzl1 = (l1_of(p.w, p.z + d) - l1_of(p.w, p.z - d)) / (2.0 * d);
      const double dwl2 = (l2_of(p.w + d, p.z) - l2_of(p.w - d, p.z)) / (2.0 * d);
      auto [l1, l2] = eigenvalues_iso(p, gas);
      worst = std::max(worst, std::abs(dzh1 * (l1 - l2) - dzl1));
      worst = std::max(worst, std::abs(dwh2 * (l2 - l1) - dwl2));
    }
    sb.add("iso-weight-defining-relations",
           "dh1/dz (l1-l2) == dl1/dz and dh2/dw (l2-l1) == dl2/dw under central "
           "differencing",
           m, worst, 1e-6);
  }

  // -- isentropic eigenvalue partials vs finite differences ------------------
  {
    IsoSampler sample{gas, rng};
    double worst = 0.0;
    const int m = std::min(n, 120);
    for (int i = 0; i < m; ++i) {
      RiemannPairIso p = sample();
      const double d = 1e-6 * p.gap();
      LambdaPartialsIso lp = lambda_partials_iso(p, gas);
      auto l1_of = [&](double w, double z) {
        return eigenvalues_iso(RiemannPairIso{w, z}, gas).first;
      };
      auto l2_of = [&](double w, double z) {
        return eigenvalues_iso(RiemannPairIso{w, z}, gas).second;
      };
      worst = std::max(worst, std::abs((l1_of(p.w + d, p.z) - l1_of(p.w - d, p.z)) /
                                           (2.0 * d) -
                                       lp.dl1_dw));
      worst = std::max(worst, std::abs((l1_of(p.w, p.z + d) - l1_of(p.w, p.z - d)) /
                                           (2.0 * d) -
                                       lp.dl1_dz));
      worst = std::max(worst, std::abs((l2_of(p.w + d, p.z) - l2_of(p.w - d, p.z)) /
                                           (2.0 * d) -
                                       lp.dl2_dw));
      worst = std::max(worst, std::abs((l2_of(p.w, p.z + d) - l2_of(p.w, p.z - d)) /
                                           (2.0 * d) -
                                       lp.dl2_dz));
    }
    sb.add("iso-lambda-partials-fd",
           "product-form eigenvalue partials == central differences in (w, z)", m, worst,
           1e-6);
  }

  // -- rate positivity and the rate/Y band -----------------------------------
  {
    IsoSampler sample{gas, rng};
    double ratio_min = std::numeric_limits<double>::infinity();
    double ratio_max = 0.0;
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      RiemannPairIso p = sample();
      auto [rho, u] = from_riemann_iso(p, gas);
      if (rho <= default_rho_floor) continue;
      const double rate = riccati_rate_1(p, gas);
      const double Y = quantity_Y(rho, gas);
      if (!(rate > 0.0)) worst = std::max(worst, -rate);
      const double ratio = rate / Y;
      ratio_min = std::min(ratio_min, ratio);
      ratio_max = std::max(ratio_max, ratio);
    }
    if (!(ratio_min > 0.0) || !std::isfinite(ratio_max)) worst = std::max(worst, 1.0);
    sb.add("iso-rate-positivity-and-band",
           "e^{-h1} dl1/dw > 0 with rate/Y inside a finite positive band", n, worst,
           1e-12);
  }

  // -- Y >= 1 for gamma >= 3 --------------------------------------------------
  {
    GasParams g3 = gas;
    g3.gamma = 3.0;
    double worst = 0.0;
    std::uniform_real_distribution<double> ulog(std::log(1e-6), std::log(0.3));
    for (int i = 0; i < n; ++i) {
      const double rho = std::exp(ulog(rng));
      worst = std::max(worst, 1.0 - quantity_Y(rho, g3));
    }
    sb.add("iso-rate-scale-floor-gamma3", "Y(rho) >= 1 when gamma >= 3", n, worst, 0.0);
  }

  // -- reciprocal-law exactness on a constant-rate path -----------------------
  {
    const double kappa = 0.37, xi0 = -1.3;
    std::vector<double> t(41), rate(41, kappa);
    for (int i = 0; i < 41; ++i) t[i] = 0.05 * i;
    RiccatiReconstruction rec = riccati_reciprocal_integral(xi0, t, rate);
    double worst = 0.0;
    for (int i = 0; i < 41; ++i)
      worst = std::max(worst, std::abs(rec.inv_xi[i] - (1.0 / xi0 + kappa * t[i])));
    worst = std::max(worst, std::abs(rec.t_star - (-1.0 / (xi0 * kappa))));
    RiccatiReconstruction rar = riccati_reciprocal_integral(1.3, t, rate);
    if (rar.t_star >= 0.0) worst = std::max(worst, 1.0);
    for (std::size_t i = 1; i < rar.inv_xi.size(); ++i)
      worst = std::max(worst, rar.inv_xi[i - 1] - rar.inv_xi[i]);
    sb.add("iso-reciprocal-law-constant-rate",
           "1/xi(t) = 1/xi0 + kappa t; zero crossing at -1/(xi0 kappa); no crossing "
           "for xi0 > 0",
           41, worst, 1e-12);
  }

  // ===== full-law checks =====================================================
  const double rho_cap = std::isfinite(sonic_density_sup(gas))
                             ? 0.6 * sonic_density_sup(gas)
                             : 1.0;
  NonSampler nsample{gas, rng, rho_cap};

  // -- transform round trip ---------------------------------------------------
  {
    double worst = 0.0;
    const int m = std::min(n, 200);
    for (int i = 0; i < m; ++i) {
      RiemannTriple t = nsample();
      auto [rho, u, S] = from_riemann_non(t, gas);
      RiemannTriple back = to_riemann_non(rho, u, S, gas);
      worst = std::max(worst, std::abs(back.w - t.w) / std::max(1.0, std::abs(t.w)));
      worst = std::max(worst, std::abs(back.z - t.z) / std::max(1.0, std::abs(t.z)));
    }
    sb.add("non-transform-roundtrip", "from(to(rho,u,S)) == (rho,u,S)", m, worst, 1e-9);
  }

  // -- transform Jacobian entries vs finite differences -----------------------
  {
    double worst = 0.0;
    const int m = std::min(n, 60);
    for (int i = 0; i < m; ++i) {
      RiemannTriple t = nsample();
      auto [rho, u, S] = from_riemann_non(t, gas);
      PhiJacobian J = phi_jacobian(rho, u, S, gas);
      const double hr = 1e-5 * rho;
      const double hS = 1e-5 * std::max(1.0, std::abs(S));
      const double hu = 1e-6 * gas.c;
      worst = std::max(worst,
                       rel_err(num::deriv_central(
                                   [&](double r) { return F_half_gap(r, S, gas, 1e-13); },
                                   rho, hr),
                               J.dF_drho));
      worst = std::max(worst,
                       rel_err(num::deriv_central(
                                   [&](double s) { return F_half_gap(rho, s, gas, 1e-13); },
                                   S, hS),
                               J.dF_dS));
      auto mlog = [&](double uu) {
        return std::log((gas.c + uu) / (gas.c - uu));
      };
      worst = std::max(worst, rel_err(num::deriv_central(mlog, u, hu), J.dm_du));
    }
    sb.add("non-jacobian-fd",
           "Jacobian entries {dF/drho, dF/dS, 2c/(c^2-u^2)} of the state map == central "
           "differences",
           m, worst, 1e-6);
  }

  // -- eigenvalue ordering and the H/G route ----------------------------------
  {
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      RiemannTriple t = nsample();
      auto [rho, u, S] = from_riemann_non(t, gas);
      auto lam = eigenvalues_non(rho, u, S, gas);
      if (rho > 0.0) {
        if (!(lam[2] < lam[0] && lam[0] < lam[1])) worst = std::max(worst, 1.0);
      }
      auto [l2h, l3h] = lambda23_from_hg(hg_state(rho, u, S, gas), gas);
      worst = std::max(worst, std::abs(l2h - lam[1]));
      worst = std::max(worst, std::abs(l3h - lam[2]));
    }
    sb.add("non-eigenvalues-ordering-and-hg",
           "lam3 < lam1 < lam2 off vacuum; lam = c(1 - 2/(e^{G,H}+1)) matches the "
           "direct formula",
           n, worst, 1e-10);
  }

  // -- entropy coupling dual route ---------------------------------------------
  {
    double worst = 0.0;
    const int m = std::min(n, 50);
    for (int i = 0; i < m; ++i) {
      RiemannTriple t = nsample();
      auto [rho, u, S] = from_riemann_non(t, gas);
      const double a1 = coupling_a(rho, S, gas);
      const double a2 = coupling_a_assembled(rho, S, gas);
      worst = std::max(worst, std::abs(a1 - a2) / std::max(1e-10, std::abs(a1)));
    }
    sb.add("non-coupling-dual-route",
           "integral form of a == -dF/dS + (dP/dS / dP/drho) dF/drho (FD route)", m,
           worst, 1e-6);
  }

  // -- da/drho closed form vs finite differences --------------------------------
  {
    double worst = 0.0;
    const int m = std::min(n, 50);
    for (int i = 0; i < m; ++i) {
      RiemannTriple t = nsample();
      auto [rho, u, S] = from_riemann_non(t, gas);
      const double h = 1e-5 * rho;
      const double fd = num::deriv_central(
          [&](double r) { return coupling_a(r, S, gas, 1e-13); }, rho, h);
      worst = std::max(worst, rel_err(da_drho(rho, S, gas), fd));
    }
    sb.add("non-da-drho-fd", "closed-form da/drho == central differences of a", m, worst,
           1e-6);
  }

  // -- weight defining relations (Lemma-type) -----------------------------------
  {
    double worst = 0.0;
    const int m = std::min(n, 100);
    const double eps = 0.02 * F_half_gap(rho_cap, 0.0, gas);
    WeightContext ctx{gas, eps, 192};
    for (int i = 0; i < m; ++i) {
      RiemannTriple t = nsample();
      const double d = 1e-4 * t.half_gap();
      auto h_of = [&](double w, double z) {
        return weights_h_g({w, z, t.Shat}, ctx, 1e-13).first;
      };
      auto g_of = [&](double w, double z) {
        return weights_h_g({w, z, t.Shat}, ctx, 1e-13).second;
      };
      auto lam_of = [&](double w, double z) {
        auto [rho, u, S] = from_riemann_non({w, z, t.Shat}, gas);
        return eigenvalues_non(rho, u, S, gas);
      };
      const double dzh = (h_of(t.w, t.z + d) - h_of(t.w, t.z - d)) / (2.0 * d);
      const double dwg = (g_of(t.w + d, t.z) - g_of(t.w - d, t.z)) / (2.0 * d);
      auto lzp = lam_of(t.w, t.z + d);
      auto lzm = lam_of(t.w, t.z - d);
      auto lwp = lam_of(t.w + d, t.z);
      auto lwm = lam_of(t.w - d, t.z);
      auto lam = lam_of(t.w, t.z);
      const double dzl3 = (lzp[2] - lzm[2]) / (2.0 * d);
      const double dwl2 = (lwp[1] - lwm[1]) / (2.0 * d);
      worst = std::max(worst, std::abs(dzh - dzl3 / (lam[2] - lam[1])));
      worst = std::max(worst, std::abs(dwg - dwl2 / (lam[1] - lam[2])));
    }
    sb.add("non-weight-defining-relations",
           "dh/dz == (dl3/dz)/(l3-l2) and dg/dw == (dl2/dw)/(l2-l3) under central "
           "differencing",
           m, worst, 1e-5);
  }

  // -- coordinate-derivative pack vs finite differences ---------------------------
  {
    double worst = 0.0;
    double worst_exact = 0.0;
    const int m = std::min(n, 50);
    for (int i = 0; i < m; ++i) {
      RiemannTriple t = nsample();
      auto [rho, u, S] = from_riemann_non(t, gas);
      CoordDerivs cd = coord_derivs(rho, u, S, gas, 1e-13);
      const double d = 1e-5 * t.half_gap();
      const double dS = 1e-5 * std::max(1.0, gas.B);

      auto state_of = [&](double w, double z, double Sh) {
        auto [r, uu, ss] = from_riemann_non({w, z, Sh}, gas);
        return std::tuple<double, double, double>{r, uu, ss};
      };
      auto Lam_of = [&](double w, double z, double Sh) {
        auto [r, uu, ss] = state_of(w, z, Sh);
        return eos_derivatives(r, ss, gas).dP_drho;
      };
      auto H_of = [&](double w, double z, double Sh) {
        auto [r, uu, ss] = state_of(w, z, Sh);
        return hg_state(r, uu, ss, gas).H;
      };
      auto G_of = [&](double w, double z, double Sh) {
        auto [r, uu, ss] = state_of(w, z, Sh);
        return hg_state(r, uu, ss, gas).G;
      };
      auto a_of = [&](double w, double z, double Sh) {
        auto [r, uu, ss] = state_of(w, z, Sh);
        return coupling_a(r, ss, gas, 1e-13);
      };
      auto nt_of = [&](double w, double z, double Sh) {
        auto [r, uu, ss] = state_of(w, z, Sh);
        return n_tilde(r, uu, ss, gas);
      };

      auto fd_w = [&](auto&& f) { return (f(t.w + d, t.z, t.Shat) - f(t.w - d, t.z, t.Shat)) / (2.0 * d); };
      auto fd_z = [&](auto&& f) { return (f(t.w, t.z + d, t.Shat) - f(t.w, t.z - d, t.Shat)) / (2.0 * d); };
      auto fd_S = [&](auto&& f) { return (f(t.w, t.z, t.Shat + dS) - f(t.w, t.z, t.Shat - dS)) / (2.0 * dS); };

      auto scale = [&](double v) { return std::max(1.0, std::abs(v)); };
      worst = std::max(worst, std::abs(fd_w(Lam_of) - cd.dLam_dw) / scale(cd.dLam_dw));
      worst = std::max(worst, std::abs(fd_z(Lam_of) - cd.dLam_dz) / scale(cd.dLam_dz));
      worst = std::max(worst, std::abs(fd_S(Lam_of) - cd.dLam_dS) / scale(cd.dLam_dS));
      worst = std::max(worst, std::abs(fd_w(H_of) - cd.dH_dw) / scale(cd.dH_dw));
      worst = std::max(worst, std::abs(fd_z(H_of) - cd.dH_dz) / scale(cd.dH_dz));
      worst = std::max(worst, std::abs(fd_S(H_of) - cd.dH_dS) / scale(cd.dH_dS));
      worst = std::max(worst, std::abs(fd_w(G_of) - cd.dG_dw) / scale(cd.dG_dw));
      worst = std::max(worst, std::abs(fd_z(G_of) - cd.dG_dz) / scale(cd.dG_dz));
      worst = std::max(worst, std::abs(fd_S(G_of) - cd.dG_dS) / scale(cd.dG_dS));
      worst = std::max(worst, std::abs(fd_w(a_of) - cd.da_dw) / scale(cd.da_dw));
      worst = std::max(worst, std::abs(fd_z(a_of) - cd.da_dz) / scale(cd.da_dz));
      worst = std::max(worst, std::abs(fd_w(nt_of) - cd.dnt_dw) / scale(cd.dnt_dw));
      worst = std::max(worst, std::abs(fd_z(nt_of) - cd.dnt_dz) / scale(cd.dnt_dz));
      worst = std::max(worst, std::abs(fd_S(nt_of) - cd.dnt_dS) / scale(cd.dnt_dS));

      worst_exact = std::max(worst_exact, std::abs(cd.da_dw + cd.da_dz));
      worst_exact = std::max(worst_exact, std::abs(cd.dH_dS + cd.dG_dS));
    }
    sb.add("non-coord-derivative-pack-fd",
           "closed-form partials of {Lambda, H, G, a, n_t} in (w,z,S) == central "
           "differences",
           m, worst, 1e-5);
    sb.add("non-coord-derivative-exact-twins", "da/dw == -da/dz and dH/dS == -dG/dS", m,
           worst_exact, 1e-12);
  }

  // -- L/M sweep vs nested-quadrature reference ----------------------------------
  {
    double worst = 0.0;
    const int m = std::min(n, 10);
    const double eps = 0.02 * F_half_gap(rho_cap, 0.0, gas);
    WeightContext ctx{gas, eps, 256};
    for (int i = 0; i < m; ++i) {
      RiemannTriple t = nsample();
      auto [L, M] = weights_L_M(t, ctx);
      auto [Lr, Mr] = weights_L_M_reference(t, ctx, 1e-10);
      worst = std::max(worst, std::abs(L - Lr) / std::max(1e-8, std::abs(Lr)));
      worst = std::max(worst, std::abs(M - Mr) / std::max(1e-8, std::abs(Mr)));
    }
    sb.add("non-LM-sweep-vs-reference",
           "cumulative-sweep L, M == nested-quadrature evaluation", m, worst, 1e-5);
  }

  // -- L/M defining differential relations -----------------------------------------
  {
    double worst = 0.0;
    const int m = std::min(n, 30);
    const double eps = 0.02 * F_half_gap(rho_cap, 0.0, gas);
    WeightContext ctx{gas, eps, 256};
    for (int i = 0; i < m; ++i) {
      RiemannTriple t = nsample();
      auto [rho, u, S] = from_riemann_non(t, gas);
      auto [h, g] = weights_h_g(t, ctx);
      const double nt = n_tilde(rho, u, S, gas);
      auto lam = eigenvalues_non(rho, u, S, gas);
      const double dza = da_drho(rho, S, gas) / (2.0 * dF_drho(rho, S, gas));
      const double dwa = -dza;
      const double d = 1e-4 * t.half_gap();

      auto Lnt2_of = [&](double z) {
        RiemannTriple tt{t.w, z, t.Shat};
        auto [r, uu, ss] = from_riemann_non(tt, gas);
        const double ntv = n_tilde(r, uu, ss, gas);
        return weights_L_M(tt, ctx).first * ntv * ntv;
      };
      auto Mnt2_of = [&](double w) {
        RiemannTriple tt{w, t.z, t.Shat};
        auto [r, uu, ss] = from_riemann_non(tt, gas);
        const double ntv = n_tilde(r, uu, ss, gas);
        return weights_L_M(tt, ctx).second * ntv * ntv;
      };
      const double dz_Lnt2 = (Lnt2_of(t.z + d) - Lnt2_of(t.z - d)) / (2.0 * d);
      const double dw_Mnt2 = (Mnt2_of(t.w + d) - Mnt2_of(t.w - d)) / (2.0 * d);
      const double want_L = -std::exp(h) * nt * dza * (lam[0] - lam[1]) / (lam[2] - lam[1]);
      const double want_M = -std::exp(g) * nt * dwa * (lam[0] - lam[2]) / (lam[2] - lam[1]);
      worst = std::max(worst, std::abs(dz_Lnt2 - want_L) / std::max(1.0, std::abs(want_L)));
      worst = std::max(worst, std::abs(dw_Mnt2 - want_M) / std::max(1.0, std::abs(want_M)));
    }
    sb.add("non-LM-endpoint-relations",
           "d/dz (L n_t^2) and d/dw (M n_t^2) equal minus the endpoint integrands", m,
           worst, 1e-3);
  }

  // -- weight partial assembly vs finite differences --------------------------------
  {
    double worst = 0.0;
    const int m = std::min(n, 25);
    const double eps = 0.02 * F_half_gap(rho_cap, 0.0, gas);
    WeightContext ctx{gas, eps, 192};
    for (int i = 0; i < m; ++i) {
      RiemannTriple t = nsample();
      WeightPartials wp = weight_partials(t, ctx);
      const double d = 1e-4 * t.half_gap();
      const double dS = 1e-5 * std::max(1.0, gas.B);
      auto h_of = [&](double w, double z, double Sh) {
        return weights_h_g({w, z, Sh}, ctx, 1e-13).first;
      };
      auto g_of = [&](double w, double z, double Sh) {
        return weights_h_g({w, z, Sh}, ctx, 1e-13).second;
      };
      worst = std::max(worst, std::abs((h_of(t.w + d, t.z, t.Shat) -
                                        h_of(t.w - d, t.z, t.Shat)) /
                                           (2.0 * d) -
                                       wp.dh_dw));
      worst = std::max(worst, std::abs((h_of(t.w, t.z, t.Shat + dS) -
                                        h_of(t.w, t.z, t.Shat - dS)) /
                                           (2.0 * dS) -
                                       wp.dh_dS));
      worst = std::max(worst, std::abs((g_of(t.w, t.z + d, t.Shat) -
                                        g_of(t.w, t.z - d, t.Shat)) /
                                           (2.0 * d) -
                                       wp.dg_dz));
      worst = std::max(worst, std::abs((g_of(t.w, t.z, t.Shat + dS) -
                                        g_of(t.w, t.z, t.Shat - dS)) /
                                           (2.0 * dS) -
                                       wp.dg_dS));
    }
    sb.add("non-weight-partials-fd",
           "assembled {dh/dw, dh/dS, dg/dz, dg/dS} == central differences of the "
           "weight quadratures",
           m, worst, 1e-5);
  }

  // -- coefficients vanish in the constant-entropy limit ------------------------------
  {
    double worst = 0.0;
    const int m = std::min(n, 15);
    const double eps = 0.02 * F_half_gap(rho_cap, 0.0, gas);
    WeightContext ctx{gas, eps, 192};
    for (int i = 0; i < m; ++i) {
      RiemannTriple t = nsample();
      auto [rho, u, S] = from_riemann_non(t, gas);
      const double nt = n_tilde(rho, u, S, gas);
      CoefficientsAB cab = coefficients_ab(t, {0.0, 0.0}, 0.0, nt, ctx);
      worst = std::max({worst, std::abs(cab.a0), std::abs(cab.a1), std::abs(cab.a2),
                        std::abs(cab.a3), std::abs(cab.a4), std::abs(cab.b0),
                        std::abs(cab.b1), std::abs(cab.b2), std::abs(cab.b3),
                        std::abs(cab.b4)});
    }
    sb.add("non-coefficients-isentropic-limit",
           "eta = theta2 = 0 makes every ODE coefficient vanish", m, worst, 1e-14);
  }

  // -- positivity of the damping rates ---------------------------------------------
  {
    double worst = 0.0;
    const int m = std::min(n, 60);
    const double eps = 0.02 * F_half_gap(rho_cap, 0.0, gas);
    WeightContext ctx{gas, eps, 192};
    for (int i = 0; i < m; ++i) {
      RiemannTriple t = nsample();
      auto [rho, u, S] = from_riemann_non(t, gas);
      auto lp = lambda_partials_non(rho, u, S, gas);
      auto [h, g] = weights_h_g(t, ctx);
      if (!(lp.dl2_dz * std::exp(-g) > 0.0)) worst = std::max(worst, 1.0);
      if (!(lp.dl3_dw * std::exp(-h) > 0.0)) worst = std::max(worst, 1.0);
    }
    sb.add("non-damping-rate-positivity", "e^{-g} dl2/dz > 0 and e^{-h} dl3/dw > 0", m,
           worst, 0.0);
  }

  // -- psi monotone, vanishing only at vacuum ---------------------------------------
  {
    double worst = 0.0;
    double prev = 0.0;
    const int m = 24;
    for (int i = 1; i <= m; ++i) {
      const double rho = rho_cap * i / m;
      const double val = psi_lower_gap(rho, gas);
      if (!(val > prev)) worst = std::max(worst, prev - val + 1e-30);
      prev = val;
    }
    worst = std::max(worst, std::abs(psi_lower_gap(0.0, gas)));
    sb.add("non-psi-monotone", "psi strictly increasing with psi(0) == 0", m, worst, 0.0);
  }

  // -- small-density exponents -------------------------------------------------------
  {
    std::vector<double> rhos, Fs, as;
    for (double r = 1e-2; r >= 1e-6 / 1.0001; r /= 4.0) rhos.push_back(r);
    for (double r : rhos) {
      Fs.push_back(F_half_gap(r, 0.3 * gas.B, gas));
      as.push_back(std::abs(coupling_a(r, 0.3 * gas.B, gas)));
    }
    const double sF = num::loglog_slope(rhos, Fs);
    const double want = 0.5 * (gas.gamma - 1.0);
    double worst = std::abs(sF - want) / want;
    bool a_degenerate = gas.B == 0.0;
    if (!a_degenerate) {
      const double sa = num::loglog_slope(rhos, as);
      worst = std::max(worst, std::abs(sa - want) / want - 0.03);  // 5% window below
    }
    sb.add("non-small-density-exponents",
           "log-log slopes: F ~ rho^{(g-1)/2} within 2%, |a| ~ rho^{(g-1)/2} within 5%",
           rhos.size(), worst, 0.02);
  }

  // -- constant-entropy threshold collapse ---------------------------------------------
  {
    ThresholdResult tr = compression_thresholds(gas, 1.0, 1.0, 0.0, 0.0, 0.1);
    const double worst = std::max(tr.N1, tr.N2);
    sb.add("non-thresholds-isentropic-limit",
           "theta bounds 0 force N1 == N2 == 0 exactly", 1, worst, 0.0);
  }

  return sb.finish();
}

}  // namespace relblow
