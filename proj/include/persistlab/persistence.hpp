#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "persistlab/errors.hpp"
#include "persistlab/hull.hpp"
#include "persistlab/simulate.hpp"
#include "persistlab/spectral.hpp"

namespace persistlab {

enum class Process { S, I, Ibar };
enum class Side { two_sided, one_sided };

inline std::string to_string(Process p) {
  switch (p) {
    case Process::S:
      return "S";
    case Process::I:
      return "I";
    case Process::Ibar:
      return "Ibar";
  }
  return "?";
}

inline std::string to_string(Side s) { return s == Side::two_sided ? "two_sided" : "one_sided"; }

inline Process parse_process(const std::string& s) {
  if (s == "S") return Process::S;
  if (s == "I") return Process::I;
  if (s == "Ibar") return Process::Ibar;
  throw ConfigError("unknown process '" + s + "' (expected S, I or Ibar)");
}

inline Side parse_side(const std::string& s) {
  if (s == "two" || s == "two_sided") return Side::two_sided;
  if (s == "one" || s == "one_sided") return Side::one_sided;
  throw ConfigError("unknown side '" + s + "' (expected two or one)");
}

/// Upper barrier b(n) for events {Z_n <= b(n)}.
class Barrier {
 public:
  enum class Variant { zero, constant, abs_linear, custom };

  static Barrier zero() { return Barrier(Variant::zero, 0.0); }
  static Barrier constant(double b) { return Barrier(Variant::constant, b); }
  /// b(n) = -c |n|
  static Barrier abs_linear(double c) { return Barrier(Variant::abs_linear, c); }
  /// b(n) = values[n - first]
  static Barrier custom(long first, std::vector<double> values) {
    Barrier b(Variant::custom, 0.0);
    b.first_ = first;
    b.table_ = std::move(values);
    return b;
  }

  /// "zero", "inf", "constant:b", "abs_linear:c"
  static Barrier parse(const std::string& s) {
    if (s == "zero") return zero();
    if (s == "inf") return constant(std::numeric_limits<double>::infinity());
    const auto colon = s.find(':');
    if (colon != std::string::npos) {
      const std::string head = s.substr(0, colon);
      double v = 0.0;
      try {
        v = std::stod(s.substr(colon + 1));
      } catch (const std::exception&) {
        throw ConfigError("barrier parameter is not a number: '" + s + "'");
      }
      if (head == "constant") return constant(v);
      if (head == "abs_linear") return abs_linear(v);
    }
    throw ConfigError("unknown barrier '" + s + "' (expected zero, inf, constant:b or abs_linear:c)");
  }

  Variant variant() const { return variant_; }

  double operator()(long n) const {
    switch (variant_) {
      case Variant::zero:
        return 0.0;
      case Variant::constant:
        return param_;
      case Variant::abs_linear:
        return -param_ * static_cast<double>(std::labs(n));
      case Variant::custom:
        if (n < first_ || n >= first_ + static_cast<long>(table_.size())) {
          throw ConfigError("custom barrier undefined at n = " + std::to_string(n));
        }
        return table_[static_cast<std::size_t>(n - first_)];
    }
    return 0.0;
  }

  /// b(lo..hi); throws ConfigError if any index is not covered.
  std::vector<double> table(long lo, long hi) const {
    std::vector<double> t;
    t.reserve(static_cast<std::size_t>(hi - lo + 1));
    for (long n = lo; n <= hi; ++n) t.push_back((*this)(n));
    return t;
  }

  std::string tag() const {
    switch (variant_) {
      case Variant::zero:
        return "zero";
      case Variant::constant:
        return std::isinf(param_) ? "inf" : "constant:" + format(param_);
      case Variant::abs_linear:
        return "abs_linear:" + format(param_);
      case Variant::custom:
        return "custom";
    }
    return "?";
  }

 private:
  Barrier(Variant v, double p) : variant_(v), param_(p) {}
  static std::string format(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
  }

  Variant variant_;
  double param_;
  long first_ = 0;
  std::vector<double> table_;
};

inline constexpr double kWilsonZ = 1.959963984540054;

struct PersistenceEstimate {
  std::uint64_t trials = 0;
  std::uint64_t hits = 0;
  double phat = 0.0;
  double ci_low = 0.0;
  double ci_high = 1.0;
  std::string model;
  long N = 0;
  std::string barrier = "zero";
  std::string side = "two_sided";
  std::string process = "S";

  double halfwidth() const { return 0.5 * (ci_high - ci_low); }
  double se() const { return trials ? std::sqrt(phat * (1.0 - phat) / static_cast<double>(trials)) : 0.0; }
  bool ci_contains(double p) const { return ci_low <= p && p <= ci_high; }
};

/// 95% Wilson score interval.
inline PersistenceEstimate wilson_estimate(std::uint64_t hits, std::uint64_t trials) {
  if (trials == 0) throw ConfigError("estimate needs trials >= 1");
  if (hits > trials) throw ConfigError("hits exceed trials");
  PersistenceEstimate e;
  e.trials = trials;
  e.hits = hits;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(hits) / n;
  const double z2 = kWilsonZ * kWilsonZ;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = kWilsonZ / denom * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  e.phat = p;
  e.ci_low = std::clamp(std::min(centre - half, p), 0.0, 1.0);
  e.ci_high = std::clamp(std::max(centre + half, p), 0.0, 1.0);
  if (hits == 0) e.ci_low = 0.0;
  if (hits == trials) e.ci_high = 1.0;
  return e;
}

struct PersistenceQuery {
  Process process = Process::S;
  Side side = Side::two_sided;
  Barrier barrier = Barrier::zero();
};

namespace detail {

// Left side of the two-sided window: Ibar runs over -N-1..N, the others over -N..N.
inline long left_extent(Process p) { return p == Process::Ibar ? 1 : 0; }

inline double process_value(const PathBundle& path, Process p, long n) {
  switch (p) {
    case Process::S:
      return path.S(n);
    case Process::I:
      return path.I(n);
    case Process::Ibar:
      return path.Ibar_extended(n);
  }
  return 0.0;
}

/// First exit radii of one path from {Z_n <= b(n)}: right = min{n >= 1 : Z_n > b(n)},
/// left = min{n >= 1 : Z_{-n} > b(-n)}, each capped at max + 1.
struct ExitRadii {
  bool origin_ok = true;
  long right = 0;
  long left = 0;

  bool event(Side side, long N, long extra_left) const {
    if (!origin_ok || right <= N) return false;
    return side == Side::one_sided || left > N + extra_left;
  }
};

class QueryEvaluator {
 public:
  QueryEvaluator(const PersistenceQuery& q, long Nmax) : q_(q), Nmax_(Nmax), extra_(left_extent(q.process)) {
    lo_ = -Nmax - extra_;
    b_ = q.barrier.table(lo_, Nmax);
  }

  ExitRadii radii(const PathBundle& path) const {
    ExitRadii r;
    r.origin_ok = process_value(path, q_.process, 0) <= b(0);
    r.right = Nmax_ + 1;
    for (long n = 1; n <= Nmax_; ++n) {
      if (process_value(path, q_.process, n) > b(n)) {
        r.right = n;
        break;
      }
    }
    const long left_max = Nmax_ + extra_;
    r.left = left_max + 1;
    if (q_.side == Side::two_sided) {
      for (long n = 1; n <= left_max; ++n) {
        if (process_value(path, q_.process, -n) > b(-n)) {
          r.left = n;
          break;
        }
      }
    }
    return r;
  }

  long extra_left() const { return extra_; }
  const PersistenceQuery& query() const { return q_; }

 private:
  double b(long n) const { return b_[static_cast<std::size_t>(n - lo_)]; }

  PersistenceQuery q_;
  long Nmax_;
  long extra_;
  long lo_;
  std::vector<double> b_;
};

struct HitCounter {
  std::vector<std::uint64_t> hits;
  std::uint64_t trials = 0;

  void merge(const HitCounter& o) {
    if (hits.size() < o.hits.size()) hits.resize(o.hits.size(), 0);
    for (std::size_t i = 0; i < o.hits.size(); ++i) hits[i] += o.hits[i];
    trials += o.trials;
  }
};

inline long grid_max(std::span<const long> grid) {
  if (grid.empty()) throw ConfigError("N grid is empty");
  long m = 0;
  for (long N : grid) {
    if (N < 1) throw ConfigError("grid values must be >= 1");
    m = std::max(m, N);
  }
  return m;
}

}  // namespace detail

/// Persistence estimates for several queries over an N grid, all evaluated on
/// the same paths simulated at the largest grid value, so hits are nested in N.
/// Result is indexed [query][grid position]. cfg.N is ignored.
inline std::vector<std::vector<PersistenceEstimate>> mc_persistence_grid(const SimConfig& cfg,
                                                                        std::span<const long> grid,
                                                                        std::span<const PersistenceQuery> queries,
                                                                        std::uint64_t trials) {
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (queries.empty()) throw ConfigError("no persistence queries");
  const long Nmax = detail::grid_max(grid);
  std::vector<detail::QueryEvaluator> evals;
  for (const auto& q : queries) evals.emplace_back(q, Nmax);
  const PathSampler sampler(cfg.model, Nmax);
  const std::size_t G = grid.size();
  detail::HitCounter init;
  init.hits.assign(queries.size() * G, 0);
  auto counts = simulate_paths(sampler, cfg, trials, init, [&](detail::HitCounter& acc, const PathBundle& path) {
    ++acc.trials;
    for (std::size_t q = 0; q < evals.size(); ++q) {
      const auto r = evals[q].radii(path);
      const Side side = evals[q].query().side;
      for (std::size_t g = 0; g < G; ++g) {
        if (r.event(side, grid[g], evals[q].extra_left())) ++acc.hits[q * G + g];
      }
    }
  });
  std::vector<std::vector<PersistenceEstimate>> out(queries.size());
  for (std::size_t q = 0; q < queries.size(); ++q) {
    for (std::size_t g = 0; g < G; ++g) {
      auto e = wilson_estimate(counts.hits[q * G + g], counts.trials);
      e.model = cfg.model.tag();
      e.N = grid[g];
      e.barrier = queries[q].barrier.tag();
      e.side = to_string(queries[q].side);
      e.process = to_string(queries[q].process);
      out[q].push_back(std::move(e));
    }
  }
  return out;
}

inline std::vector<PersistenceEstimate> mc_persistence_grid(const SimConfig& cfg, std::span<const long> grid,
                                                           const PersistenceQuery& query, std::uint64_t trials) {
  return mc_persistence_grid(cfg, grid, std::span<const PersistenceQuery>(&query, 1), trials).front();
}

inline PersistenceEstimate mc_persistence(const SimConfig& cfg, long N, Process process, Side side,
                                          const Barrier& barrier, std::uint64_t trials) {
  const long grid[] = {N};
  return mc_persistence_grid(cfg, grid, PersistenceQuery{process, side, barrier}, trials).front();
}

/// Path functionals whose probabilities mc_event estimates.
struct EventSpec {
  enum class Kind { argmax_eq, argmax_in, vartheta_gt };
  Kind kind = Kind::argmax_eq;
  long a = 0;
  long b = 0;
  double x = 0.0;

  static EventSpec argmax_eq(long k) { return {Kind::argmax_eq, k, k, 0.0}; }
  static EventSpec argmax_in(long lo, long hi) { return {Kind::argmax_in, lo, hi, 0.0}; }
  static EventSpec vartheta_gt(double x) { return {Kind::vartheta_gt, 0, 0, x}; }

  std::string tag() const {
    switch (kind) {
      case Kind::argmax_eq:
        return "argmax_eq:" + std::to_string(a);
      case Kind::argmax_in:
        return "argmax_in:" + std::to_string(a) + ":" + std::to_string(b);
      case Kind::vartheta_gt: {
        char buf[48];
        std::snprintf(buf, sizeof buf, "vartheta_gt:%g", x);
        return buf;
      }
    }
    return "?";
  }

  bool holds(const PathBundle& path, long N) const {
    switch (kind) {
      case Kind::argmax_eq:
      case Kind::argmax_in: {
        const long t = argmax_time(S_series(path), N);
        return a <= t && t <= b;
      }
      case Kind::vartheta_gt:
        return vartheta(I_series(path), N) > x;
    }
    return false;
  }
};

/// Event probabilities over an N grid on shared paths.
inline std::vector<PersistenceEstimate> mc_event_grid(const SimConfig& cfg, std::span<const long> grid,
                                                     const EventSpec& spec, std::uint64_t trials) {
  if (trials < 1) throw ConfigError("trials must be >= 1");
  const long Nmax = detail::grid_max(grid);
  const PathSampler sampler(cfg.model, Nmax);
  detail::HitCounter init;
  init.hits.assign(grid.size(), 0);
  auto counts = simulate_paths(sampler, cfg, trials, init, [&](detail::HitCounter& acc, const PathBundle& path) {
    ++acc.trials;
    for (std::size_t g = 0; g < grid.size(); ++g) {
      if (spec.holds(path, grid[g])) ++acc.hits[g];
    }
  });
  std::vector<PersistenceEstimate> out;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    auto e = wilson_estimate(counts.hits[g], counts.trials);
    e.model = cfg.model.tag();
    e.N = grid[g];
    e.barrier = spec.tag();
    e.side = "event";
    e.process = spec.kind == EventSpec::Kind::vartheta_gt ? "I" : "S";
    out.push_back(std::move(e));
  }
  return out;
}

inline PersistenceEstimate mc_event(const SimConfig& cfg, long N, const EventSpec& spec, std::uint64_t trials) {
  const long grid[] = {N};
  return mc_event_grid(cfg, grid, spec, trials).front();
}

/// P(S_n <= 0 : -k <= n <= N-k) and P(T_N = k), estimated on the same paths.
struct RearrangementResult {
  PersistenceEstimate window;
  PersistenceEstimate argmax;
  bool cis_overlap() const { return window.ci_low <= argmax.ci_high && argmax.ci_low <= window.ci_high; }
};

inline RearrangementResult rearrangement_check(const SimConfig& cfg, long N, long k, std::uint64_t trials) {
  if (N < 1 || k < 0 || k > N) throw ConfigError("rearrangement_check needs 0 <= k <= N and N >= 1");
  if (trials < 1) throw ConfigError("trials must be >= 1");
  const PathSampler sampler(cfg.model, N);
  detail::HitCounter init;
  init.hits.assign(2, 0);
  auto counts = simulate_paths(sampler, cfg, trials, init, [&](detail::HitCounter& acc, const PathBundle& path) {
    ++acc.trials;
    bool below = true;
    for (long n = -k; n <= N - k && below; ++n) below = path.S(n) <= 0.0;
    if (below) ++acc.hits[0];
    if (argmax_time(S_series(path), N) == k) ++acc.hits[1];
  });
  RearrangementResult r{wilson_estimate(counts.hits[0], counts.trials), wilson_estimate(counts.hits[1], counts.trials)};
  for (auto* e : {&r.window, &r.argmax}) {
    e->model = cfg.model.tag();
    e->N = N;
    e->process = "S";
  }
  r.window.side = "window:" + std::to_string(-k) + ":" + std::to_string(N - k);
  r.argmax.side = "event";
  r.argmax.barrier = "argmax_eq:" + std::to_string(k);
  return r;
}

/// Streaming mean and variance with an order-aware merge (Chan et al.).
struct RunningStats {
  std::uint64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  void merge(const RunningStats& o) {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    const double na = static_cast<double>(n), nb = static_cast<double>(o.n);
    const double d = o.mean - mean;
    const double tot = na + nb;
    mean += d * nb / tot;
    m2 += o.m2 + d * d * na * nb / tot;
    n += o.n;
  }
  double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
  double se() const { return n > 0 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0; }
};

struct MeanFEstimate {
  long N = 0;
  std::uint64_t trials = 0;
  double mean_F = 0.0;
  double se_F = 0.0;
  double mean_2gamma0 = 0.0;  // sample mean of 2 gamma^+_{0,N}
  double se_2gamma0 = 0.0;
  double se_paired = 0.0;     // standard error of mean(F - 2 gamma^+_0)

  double combined_se() const { return std::hypot(se_F, se_2gamma0); }
  bool agree(double k = 3.0) const { return std::abs(mean_F - mean_2gamma0) <= k * combined_se(); }
};

/// Sample mean of F_N = gamma^+_{0,N} - gamma^-_{N,N} on the right side of each path,
/// and separately of 2 gamma^+_{0,N}.
inline MeanFEstimate mean_F(const SimConfig& cfg, long N, std::uint64_t trials) {
  if (trials < 1) throw ConfigError("trials must be >= 1");
  MeanFEstimate out;
  out.N = N;
  if (N == 1) {
    out.trials = trials;
    return out;
  }
  struct Acc {
    RunningStats f, g, d;
    void merge(const Acc& o) {
      f.merge(o.f);
      g.merge(o.g);
      d.merge(o.d);
    }
  };
  const PathSampler sampler(cfg.model, N);
  auto acc = simulate_paths(sampler, cfg, trials, Acc{}, [&](Acc& a, const PathBundle& path) {
    const auto h = hull_functional(I_series(path), N);
    a.f.add(h.F());
    a.g.add(2.0 * h.gamma0_plus);
    a.d.add(h.F() - 2.0 * h.gamma0_plus);
  });
  out.trials = acc.f.n;
  out.mean_F = acc.f.mean;
  out.se_F = acc.f.se();
  out.mean_2gamma0 = acc.g.mean;
  out.se_2gamma0 = acc.g.se();
  out.se_paired = acc.d.se();
  return out;
}

/// sqrt(2/pi) * || I_N / N - I_1 ||_2, a lower bound for E F_N.
inline double mean_F_lower_bound(const VarianceProfile& p, long N) {
  SCombination x = I_combination(N);
  for (auto& [idx, c] : x) c /= static_cast<double>(N);
  for (auto [idx, c] : I_combination(1)) x.emplace_back(idx, -c);
  return std::sqrt(2.0 / std::numbers::pi) * std::sqrt(std::max(0.0, covariance(p, x, x)));
}

/// Pathwise comparison of {Ibar_n <= 0 : -N-1 <= n <= N} with {I_n <= 0 : |n| <= N}.
struct OrderingReport {
  std::vector<long> N;
  std::vector<std::uint64_t> ibar_hits;
  std::vector<std::uint64_t> i_hits;
  std::vector<std::uint64_t> violations;  // Ibar event holds but I event fails
  std::uint64_t trials = 0;
};

inline OrderingReport ordering_check(const SimConfig& cfg, std::span<const long> grid, std::uint64_t trials) {
  if (trials < 1) throw ConfigError("trials must be >= 1");
  const long Nmax = detail::grid_max(grid);
  const detail::QueryEvaluator ibar({Process::Ibar, Side::two_sided, Barrier::zero()}, Nmax);
  const detail::QueryEvaluator ii({Process::I, Side::two_sided, Barrier::zero()}, Nmax);
  const PathSampler sampler(cfg.model, Nmax);
  const std::size_t G = grid.size();
  detail::HitCounter init;
  init.hits.assign(3 * G, 0);
  auto c = simulate_paths(sampler, cfg, trials, init, [&](detail::HitCounter& acc, const PathBundle& path) {
    ++acc.trials;
    const auto rb = ibar.radii(path);
    const auto ri = ii.radii(path);
    for (std::size_t g = 0; g < G; ++g) {
      const bool eb = rb.event(Side::two_sided, grid[g], ibar.extra_left());
      const bool ei = ri.event(Side::two_sided, grid[g], ii.extra_left());
      acc.hits[g] += eb;
      acc.hits[G + g] += ei;
      acc.hits[2 * G + g] += eb && !ei;
    }
  });
  OrderingReport r;
  r.N.assign(grid.begin(), grid.end());
  r.trials = c.trials;
  r.ibar_hits.assign(c.hits.begin(), c.hits.begin() + G);
  r.i_hits.assign(c.hits.begin() + G, c.hits.begin() + 2 * G);
  r.violations.assign(c.hits.begin() + 2 * G, c.hits.end());
  return r;
}

struct ExponentFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  std::vector<double> N;
  std::vector<double> weights;
};

/// Weighted least squares of log p on log N.
inline ExponentFit fit_power_law(std::span<const double> N, std::span<const double> p,
                                 std::span<const double> weights) {
  if (N.size() != p.size() || N.size() != weights.size()) throw ConfigError("fit_power_law: size mismatch");
  if (N.size() < 4) throw InsufficientData("exponent fit needs at least 4 points");
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < N.size(); ++i) {
    if (!(p[i] > 0.0) || !(N[i] > 0.0)) throw InsufficientData("exponent fit needs positive N and probabilities");
    if (!(weights[i] > 0.0)) throw InsufficientData("exponent fit needs positive weights");
    sw += weights[i];
    sx += weights[i] * std::log(N[i]);
    sy += weights[i] * std::log(p[i]);
  }
  const double xm = sx / sw, ym = sy / sw;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < N.size(); ++i) {
    const double dx = std::log(N[i]) - xm;
    sxx += weights[i] * dx * dx;
    sxy += weights[i] * dx * (std::log(p[i]) - ym);
  }
  if (!(sxx > 0.0)) throw InsufficientData("exponent fit needs at least two distinct N");
  ExponentFit f;
  f.slope = sxy / sxx;
  f.intercept = ym - f.slope * xm;
  f.slope_stderr = std::sqrt(1.0 / sxx);
  f.N.assign(N.begin(), N.end());
  f.weights.assign(weights.begin(), weights.end());
  return f;
}

/// Fit with weights 1 / Var(log phat) = trials * phat / (1 - phat).
inline ExponentFit fit_exponent(std::span<const PersistenceEstimate> estimates) {
  std::vector<double> N, p, w;
  for (const auto& e : estimates) {
    N.push_back(static_cast<double>(e.N));
    p.push_back(e.phat);
    if (e.phat <= 0.0) throw InsufficientData("exponent fit needs phat > 0 at every N");
    w.push_back(e.phat >= 1.0 ? static_cast<double>(e.trials) * 1e12
                              : static_cast<double>(e.trials) * e.phat / (1.0 - e.phat));
  }
  return fit_power_law(N, p, w);
}

}  // namespace persistlab
