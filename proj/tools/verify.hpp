#pragma once

// Invariant suites behind `persistlab verify`.

#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include <json.hpp>

#include "persistlab/persistlab.hpp"

namespace persistlab::verify {

struct Check {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double limit = 0.0;
  std::string note;

  nlohmann::json to_json() const {
    nlohmann::json j{{"name", name}, {"pass", pass}, {"value", value}, {"limit", limit}};
    if (!note.empty()) j["note"] = note;
    return j;
  }
};

struct Options {
  std::uint64_t seed = 42;
  unsigned threads = 0;
  std::uint64_t trials = 20000;  // mc tier
  bool strict = false;           // mc tier: require the 95% interval instead of 3 SE
};

// value <= limit
inline Check at_most(std::string name, double value, double limit, std::string note = {}) {
  return {std::move(name), value <= limit, value, limit, std::move(note)};
}

inline std::vector<ProcessModel> fixture_models() {
  return {ProcessModel::fgn(HurstParam(0.3)),
          ProcessModel::fgn(HurstParam(0.5)),
          ProcessModel::fgn(HurstParam(0.7)),
          ProcessModel::fgn_spectral(HurstParam(0.6)),
          ProcessModel::density(HurstParam(0.7), SlowlyVarying::log_power(1.0, 0.5)),
          ProcessModel::profile(HurstParam(0.6), SlowlyVarying::cosine_log(1.0, 0.5))};
}

inline std::vector<Check> fast_tier(const Options& o) {
  std::vector<Check> out;

  double worst = 0.0;
  for (const auto& m : fixture_models()) {
    const auto p = variance_profile(m, 256);
    for (long N = 1; N <= 256; ++N) {
      const double rhs = weighted_variance_sum(p, N);
      worst = std::max(worst, std::abs(second_moment_Ibar(p, N) - rhs) / rhs);
    }
  }
  out.push_back(at_most("variance identity E(I_N+S_N/2)^2 = sum k E S_k^2, N<=256", worst, 1e-10));

  worst = 0.0;
  for (double H : {0.3, 0.5, 0.7}) {
    const auto p = variance_profile(ProcessModel::fgn(HurstParam(H)), 512);
    for (long n = 1; n <= 512; ++n) worst = std::max(worst, std::abs(p(n) / std::pow(n, 2 * H) - 1.0));
  }
  out.push_back(at_most("fGn variance profile E S_n^2 = n^{2H}", worst, 1e-12));

  worst = 0.0;
  for (double H : {0.3, 0.7}) {
    const auto exact = fgn_covariance_sequence(HurstParam(H), 32);
    const auto quad = covariance_sequence(ProcessModel::fgn_spectral(HurstParam(H)), 32);
    for (long k = 0; k <= 32; ++k) worst = std::max(worst, std::abs(quad(k) - exact(k)));
  }
  out.push_back(at_most("fGn covariance from spectral density vs closed form, lags <= 32", worst, 1e-8));

  worst = 0.0;
  for (double H : {0.2, 0.5, 0.8, 0.95}) {
    const auto e = build_embedding(fgn_covariance_sequence(HurstParam(H), 2048), 2048);
    double top = 0.0;
    for (double l : e.eigenvalues) top = std::max(top, l);
    worst = std::max(worst, -e.min_raw / top);
  }
  out.push_back(at_most("circulant embedding of fGn nonnegative (relative negative part)", worst, 1e-12));

  {
    SimConfig cfg{ProcessModel::fgn(HurstParam(0.7))};
    cfg.base_seed = o.seed;
    cfg.threads = o.threads;
    const long N = 128;
    const PathSampler sampler(cfg.model, N);
    struct Acc {
      double assembly = 0.0, gap = 0.0;
      long mism = 0;
      void merge(const Acc& a) {
        assembly = std::max(assembly, a.assembly);
        gap = std::max(gap, a.gap);
        mism += a.mism;
      }
    };
    auto a = simulate_paths(sampler, cfg, 200, Acc{}, [&](Acc& acc, const PathBundle& p) {
      for (long n = -N + 1; n <= N; ++n) {
        acc.assembly = std::max(acc.assembly, std::abs(p.Ibar(n) - p.I(n) - 0.5 * p.S(n)));
        acc.assembly = std::max(acc.assembly, std::abs(p.I(n) - 0.5 * (p.Ibar(n) + p.Ibar(n - 1))));
      }
      const auto h = concave_majorant(p, N);
      const auto c = check_hull(h);
      acc.gap = std::max(acc.gap, c.identity_gap);
      acc.mism += c.nodal_mismatches + c.slope_mismatches;
    });
    out.push_back(at_most("path assembly Ibar = I + S/2 and I_n = (Ibar_n + Ibar_{n-1})/2", a.assembly, 1e-9));
    out.push_back(at_most("hull identity F_sum = gamma0+ - gammaN-, 200 paths N=128", a.gap, 1e-9));
    out.push_back(at_most("hull nodal and consecutive-slope violations", static_cast<double>(a.mism), 0.0));
  }

  {
    long fails = 0;
    for (double H : {0.3, 0.5, 0.7})
      if (!szego_check(ProcessModel::fgn(HurstParam(H)))) ++fails;
    out.push_back(at_most("log-integrability of the fGn spectral density", static_cast<double>(fails), 0.0));
  }

  {
    const auto p = variance_profile(ProcessModel::fgn(HurstParam(0.7)), 64);
    const long idx[] = {-3, -1, 2, 5};
    out.push_back(at_most("shifted I covariance identity (n0 = 7)", shifted_I_covariance_check(p, 7, idx), 1e-9));
  }

  {
    const double d = std::abs(sparre_andersen_one_sided(1) - 0.5) + std::abs(sparre_andersen_one_sided(2) - 0.375) +
                     std::abs(sparre_andersen_one_sided(3) - 0.3125);
    out.push_back(at_most("Sparre Andersen values N = 1, 2, 3", d, 1e-15));
  }

  {
    std::vector<double> N, p, w;
    for (double n : {16.0, 32.0, 64.0, 128.0, 256.0}) {
      N.push_back(n);
      p.push_back(1.0 / n);
      w.push_back(1.0);
    }
    out.push_back(at_most("exponent fit of exact 1/N", std::abs(fit_power_law(N, p, w).slope + 1.0), 1e-12));
  }

  {
    const auto c = build_rkhs(ProcessModel::fgn(HurstParam(0.7)), RkhsParams::defaults(0.7, -0.4), 4096);
    double parity = 0.0;
    for (long n = 1; n <= 4096; ++n) {
      parity = std::max({parity, std::abs(c.h.h(n) - c.h.h(-n)), std::abs(c.f(n) + c.f(-n)), std::abs(c.g(n) - c.g(-n))});
    }
    out.push_back(at_most("rkhs parity h even, f odd, g even", parity, 0.0));
    out.push_back({"rkhs h > 0 on |n| <= 4096 (H=0.7, rho=-0.4)", c.h.h.min_value() > 0.0, c.h.h.min_value(), 0.0, "value must exceed limit"});
    out.push_back(at_most("rkhs ratio drift max over h, f, g", std::max({c.h.h.ratio_drift(), c.f.ratio_drift(), c.g.ratio_drift()}), 0.10));
    CosPowerIntegral G(-0.5);
    const double X = std::numbers::pi / 2 + 20000.0 * std::numbers::pi;
    const double cnum = G(X) + G(X + std::numbers::pi);
    out.push_back(at_most("h1 limit constant at rho=-0.5 vs sqrt(2 pi), relative", std::abs(cnum / std::sqrt(2 * std::numbers::pi) - 1.0), 0.01));
  }

  {
    SimConfig a{ProcessModel::fgn(HurstParam(0.3))};
    a.base_seed = o.seed;
    a.batch_size = 256;
    a.threads = 1;
    SimConfig b = a;
    b.threads = 4;
    const long grid[] = {4, 8, 16, 32};
    const PersistenceQuery q{Process::I, Side::two_sided, Barrier::zero()};
    const auto ra = mc_persistence_grid(a, grid, q, 3000);
    const auto rb = mc_persistence_grid(b, grid, q, 3000);
    double diff = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) diff += std::abs(static_cast<double>(ra[i].hits) - static_cast<double>(rb[i].hits));
    out.push_back(at_most("hit counts independent of worker count", diff, 0.0));
  }
  return out;
}

inline std::vector<Check> oracle_tier(const Options&) {
  std::vector<Check> out;
  const auto m05 = ProcessModel::fgn(HurstParam(0.5));
  for (long N = 1; N <= 5; ++N) {
    const auto r = persistence_exact(m05, N, Process::S, Side::two_sided, Barrier::zero());
    const double sa = sparre_andersen_one_sided(N);
    out.push_back(at_most("two-sided S persistence at H=0.5 vs Sparre Andersen squared, N=" + std::to_string(N),
                          std::abs(r.prob - sa * sa), 3.0 * r.err));
  }
  for (double H : {0.5, 0.7})
    for (long m : {1L, 2L}) {
      const auto r = prekopa_check(ProcessModel::fgn(HurstParam(H)), 2, m);
      char name[96];
      std::snprintf(name, sizeof name, "Prekopa ordering P(A_0) >= P(A_%ld), H=%.1f, N=2", m, H);
      out.push_back(at_most(name, r.pm.prob - r.p0.prob, r.p0.err + r.pm.err));
      std::snprintf(name, sizeof name, "symmetry P(A_%ld) = P(A_-%ld), H=%.1f, N=2", m, m, H);
      out.push_back(at_most(name, std::abs(r.pm.prob - r.pminus.prob), r.pm.err + r.pminus.err));
    }
  {
    Eigen::MatrixXd c(2, 2);
    c << 1, 0.5, 0.5, 1;
    const auto r = orthant_prob({c, Eigen::Vector2d(0, 0)});
    out.push_back(at_most("bivariate orthant, correlation 0.5", std::abs(r.prob - 1.0 / 3.0), std::max(3.0 * r.err, 1e-12)));
  }
  {
    Eigen::MatrixXd one(1, 1);
    one << 1.0;
    Eigen::VectorXd f(1), u(1);
    f << 1.0;
    u << 0.0;
    const auto r = com_bounds_check(one, f, u);
    out.push_back({"change of measure bracket, univariate", r.ok() && r.upper_applies, r.lower_slack(), 0.0,
                   "lower slack; upper slack " + fmt_double(r.upper_slack())});
  }
  return out;
}

inline std::vector<Check> mc_tier(const Options& o) {
  std::vector<Check> out;
  SimConfig cfg{ProcessModel::fgn(HurstParam(0.5))};
  cfg.base_seed = o.seed;
  cfg.threads = o.threads;
  const std::uint64_t T = o.trials;
  auto contains = [&](const std::string& name, const PersistenceEstimate& e, double truth) {
    const double dev = std::abs(e.phat - truth);
    if (o.strict) {
      return Check{name, e.ci_contains(truth), dev, e.phat > truth ? e.phat - e.ci_low : e.ci_high - e.phat,
                   "95% Wilson interval"};
    }
    return Check{name, dev <= 3.0 * std::max(e.se(), 1.0 / static_cast<double>(e.trials)), dev,
                 3.0 * std::max(e.se(), 1.0 / static_cast<double>(e.trials)), "3 standard errors"};
  };
  {
    const long grid[] = {1, 2, 3};
    const auto r = mc_persistence_grid(cfg, grid, PersistenceQuery{Process::S, Side::two_sided, Barrier::zero()}, T);
    for (const auto& e : r) {
      const double sa = sparre_andersen_one_sided(e.N);
      out.push_back(contains("MC two-sided S persistence at H=0.5, N=" + std::to_string(e.N), e, sa * sa));
    }
  }
  out.push_back(contains("MC P(T_2 = 0) at H=0.5", mc_event(cfg, 2, EventSpec::argmax_eq(0), T), 0.375));
  {
    const auto m = mean_F(cfg, 64, T);
    out.push_back(at_most("MC mean F_64 vs 2 mean gamma0+, in combined SE", std::abs(m.mean_F - m.mean_2gamma0),
                          3.0 * m.combined_se()));
  }
  {
    SimConfig c7 = cfg;
    c7.model = ProcessModel::fgn(HurstParam(0.7));
    const long grid[] = {4, 16, 64};
    const auto r = ordering_check(c7, grid, T);
    std::uint64_t v = 0;
    for (auto x : r.violations) v += x;
    out.push_back(at_most("pathwise inclusion Ibar event within I event", static_cast<double>(v), 0.0));
  }
  {
    const auto r = rearrangement_check(cfg, 2, 1, T);
    out.push_back({"rearrangement window vs argmax, N=2 k=1: intervals overlap", r.cis_overlap(),
                   std::abs(r.window.phat - r.argmax.phat), 0.0, ""});
  }
  return out;
}

inline nlohmann::json run(const std::string& tier, const Options& o, bool& all_pass) {
  std::vector<std::pair<std::string, std::function<std::vector<Check>(const Options&)>>> tiers;
  if (tier == "fast" || tier == "all") tiers.emplace_back("fast", fast_tier);
  if (tier == "oracle" || tier == "all") tiers.emplace_back("oracle", oracle_tier);
  if (tier == "mc" || tier == "all") tiers.emplace_back("mc", mc_tier);
  if (tiers.empty()) throw ConfigError("unknown tier '" + tier + "' (fast, mc, oracle or all)");
  nlohmann::json report = nlohmann::json::object();
  all_pass = true;
  for (const auto& [name, fn] : tiers) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : fn(o)) {
      arr.push_back(c.to_json());
      all_pass = all_pass && c.pass;
    }
    report[name] = arr;
  }
  report["pass"] = all_pass;
  return report;
}

}  // namespace persistlab::verify
