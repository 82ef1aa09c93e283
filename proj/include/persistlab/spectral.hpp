#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "persistlab/errors.hpp"
#include "persistlab/model.hpp"
#include "persistlab/quadrature.hpp"

namespace persistlab {

/// r(k) = E xi_j xi_{j+k} for k = 0..K; r(-k) = r(k).
struct CovarianceSequence {
  std::vector<double> r;

  std::size_t max_lag() const { return r.empty() ? 0 : r.size() - 1; }
  double operator()(long k) const { return r.at(static_cast<std::size_t>(std::labs(k))); }
};

/// v(n) = E S_n^2 for n = 0..N.
struct VarianceProfile {
  std::vector<double> v;

  long horizon() const { return static_cast<long>(v.size()) - 1; }
  double operator()(long n) const { return v.at(static_cast<std::size_t>(std::labs(n))); }
};

namespace detail {

// binom(2H, m) for m = 0..count-1
inline std::vector<double> general_binomials(double alpha, int count) {
  std::vector<double> b(count);
  b[0] = 1.0;
  for (int m = 1; m < count; ++m) b[m] = b[m - 1] * (alpha - m + 1) / m;
  return b;
}

}  // namespace detail

/// fGn autocovariance 1/2 (|k+1|^{2H} - 2|k|^{2H} + |k-1|^{2H}).
/// For k >= 8 the second difference is summed as k^{2H} sum_j binom(2H, 2j) k^{-2j},
/// which avoids the cancellation of the direct form.
inline double fgn_covariance(HurstParam Hp, long k) {
  const double H = Hp.value();
  const double a = 2.0 * H;
  k = std::labs(k);
  if (k < 8) {
    const double kd = static_cast<double>(k);
    return 0.5 * (std::pow(kd + 1.0, a) - 2.0 * std::pow(kd, a) + std::pow(std::abs(kd - 1.0), a));
  }
  const auto b = detail::general_binomials(a, 26);
  const double x2 = 1.0 / (static_cast<double>(k) * static_cast<double>(k));
  double term = 1.0;
  double sum = 0.0;
  for (int j = 1; 2 * j < 26; ++j) {
    term *= x2;
    sum += b[2 * j] * term;
  }
  return std::pow(static_cast<double>(k), a) * sum;
}

inline CovarianceSequence fgn_covariance_sequence(HurstParam H, std::size_t K, double scale = 1.0) {
  CovarianceSequence c;
  c.r.resize(K + 1);
  for (std::size_t k = 0; k <= K; ++k) c.r[k] = scale * fgn_covariance(H, static_cast<long>(k));
  return c;
}

/// Covariance of a stationary sequence whose increments-of-partial-sums variance is v:
/// r(k) = 1/2 (v(k+1) - 2 v(k) + v(|k-1|)), v(0) = 0.
template <class V>
CovarianceSequence covariance_from_variance(V&& v, std::size_t K) {
  CovarianceSequence c;
  c.r.resize(K + 1);
  for (std::size_t k = 0; k <= K; ++k) {
    const double kd = static_cast<double>(k);
    c.r[k] = 0.5 * (v(kd + 1.0) - 2.0 * v(kd) + v(std::abs(kd - 1.0)));
  }
  return c;
}

/// Options for spectral-density quadrature.
struct DensityQuadratureOptions {
  double rel_tol = 1e-9;  // relative to r(0), per lag
  int max_refinements = 4;
};

/// r(k) = 2 int_0^pi cos(ku) p(u) du for k = 0..K.
///
/// The interval is split at u_s = min(u0, 1/K). On (0, u_s] the substitution
/// u = t^{1/(2-2H)} makes p(u) du = l~(u)/(2-2H) dt, which removes the
/// |u|^{1-2H} singularity; panels there are graded geometrically. (u_s, pi]
/// uses panels no wider than pi/(K+1). Two Gauss-Legendre rules (16 and 24
/// nodes) on the same panels give the error estimate; panels are halved
/// until every lag agrees to rel_tol * r(0).
inline CovarianceSequence covariance_from_density(const ProcessModel& model, std::size_t K,
                                                  DensityQuadratureOptions opt = {}) {
  if (!model.has_density()) throw ConfigError("covariance_from_density: model " + model.tag() + " has no density");
  const double H = model.H();
  const double a = 2.0 - 2.0 * H;
  const double u_s = std::min(model.u0(), 1.0 / std::max<double>(1.0, static_cast<double>(K)));
  const double t_s = std::pow(u_s, a);
  const double h_max = std::numbers::pi / (static_cast<double>(K) + 1.0);

  struct Panel {
    double lo, hi;
    bool substituted;
  };
  std::vector<Panel> base;
  constexpr int kGrades = 48;
  for (int j = kGrades; j >= 0; --j) {
    const double hi = t_s * std::ldexp(1.0, -j);
    const double lo = j == kGrades ? 0.0 : t_s * std::ldexp(1.0, -j - 1);
    base.push_back({lo, hi, true});
  }
  for (double lo = u_s; lo < std::numbers::pi;) {
    const double w = std::min(lo, h_max);
    const double hi = std::min(lo + w, std::numbers::pi);
    base.push_back({lo, hi, false});
    lo = hi;
  }

  auto apply_rule = [&](const quad::Rule& rule, int refine, std::vector<double>& out) {
    const int sub = 1 << refine;
    std::vector<quad::CompensatedSum> acc(K + 1);
    for (const Panel& p : base) {
      const double step = (p.hi - p.lo) / sub;
      for (int s = 0; s < sub; ++s) {
        const double lo = p.lo + s * step;
        const double half = 0.5 * step;
        const double mid = lo + half;
        for (std::size_t i = 0; i < rule.x.size(); ++i) {
          const double x = mid + half * rule.x[i];
          double u, weight;
          if (p.substituted) {
            u = std::pow(x, 1.0 / a);
            weight = half * rule.w[i] * model.regular_part(u) / a;
          } else {
            u = x;
            weight = half * rule.w[i] * model.density(u);
          }
          // cos(ku) by complex rotation, resynchronised every 32 lags
          const std::complex<double> rot(std::cos(u), std::sin(u));
          std::complex<double> z(1.0, 0.0);
          for (std::size_t k = 0; k <= K; ++k) {
            if (k % 32 == 0) z = std::complex<double>(std::cos(k * u), std::sin(k * u));
            acc[k].add(weight * z.real());
            z *= rot;
          }
        }
      }
    }
    out.resize(K + 1);
    for (std::size_t k = 0; k <= K; ++k) out[k] = 2.0 * acc[k].value();
  };

  std::vector<double> coarse, fine;
  for (int refine = 0; refine <= opt.max_refinements; ++refine) {
    apply_rule(quad::gauss_legendre<16>(), refine, coarse);
    apply_rule(quad::gauss_legendre<24>(), refine, fine);
    double worst = 0.0;
    for (std::size_t k = 0; k <= K; ++k) worst = std::max(worst, std::abs(fine[k] - coarse[k]));
    if (!(fine[0] > 0.0)) throw QuadratureNonConvergence("covariance_from_density: r(0) is not positive");
    if (worst <= opt.rel_tol * fine[0]) return CovarianceSequence{std::move(fine)};
  }
  throw QuadratureNonConvergence("covariance_from_density: lag error estimate above tolerance after refinement budget");
}

/// Covariance sequence of any model up to lag K.
inline CovarianceSequence covariance_sequence(const ProcessModel& model, std::size_t K) {
  const HurstParam H(model.H());
  switch (model.kind()) {
    case ProcessModel::Kind::fgn:
      return fgn_covariance_sequence(H, K, model.sv().c());
    case ProcessModel::Kind::profile: {
      const double twoH = 2.0 * model.H();
      return covariance_from_variance(
          [&](double n) { return n == 0.0 ? 0.0 : std::pow(n, twoH) * model.ell(n); }, K);
    }
    default:
      return covariance_from_density(model, K);
  }
}

/// Exact E S_n^2 by the prefix recurrence v(n) = v(n-1) + r(0) + 2 sum_{k=1}^{n-1} r(k).
inline VarianceProfile variance_profile(const CovarianceSequence& r, long N) {
  if (N < 0 || static_cast<std::size_t>(N) > r.max_lag() + 1) {
    throw ConfigError("variance_profile: need N <= max lag + 1");
  }
  VarianceProfile p;
  p.v.assign(static_cast<std::size_t>(N) + 1, 0.0);
  quad::CompensatedSum inner;
  quad::CompensatedSum outer;
  for (long n = 1; n <= N; ++n) {
    outer.add(r.r[0]);
    outer.add(2.0 * inner.value());
    p.v[n] = outer.value();
    inner.add(r.r[n]);
  }
  return p;
}

inline VarianceProfile variance_profile(const ProcessModel& model, long N) {
  return variance_profile(covariance_sequence(model, static_cast<std::size_t>(std::max(N, 1L))), N);
}

/// Diagnostic v(n) / (n^{2H} l(n)) for n = 1..N (entry 0 unused).
inline std::vector<double> variance_ratio(const VarianceProfile& p, const ProcessModel& model) {
  std::vector<double> out(p.v.size(), 0.0);
  for (std::size_t n = 1; n < p.v.size(); ++n) {
    const double nd = static_cast<double>(n);
    out[n] = p.v[n] / (std::pow(nd, 2.0 * model.H()) * model.ell(nd));
  }
  return out;
}

/// E S_a S_b = 1/2 (v(|a|) + v(|b|) - v(|a-b|)).
inline double cov_S(const VarianceProfile& p, long a, long b) { return 0.5 * (p(a) + p(b) - p(a - b)); }

/// A random variable written as sum_i coeff_i * S_{index_i}.
using SCombination = std::vector<std::pair<long, double>>;

/// I_n = sum_{k=1}^{n-1} S_k + S_n/2 for n > 0 and
/// I_{-m} = -(sum_{k=1}^{m-1} S_{-k} + S_{-m}/2) for m > 0.
inline SCombination I_combination(long n) {
  SCombination c;
  if (n == 0) return c;
  const long m = std::labs(n);
  const double sign = n > 0 ? 1.0 : -1.0;
  for (long k = 1; k < m; ++k) c.emplace_back(n > 0 ? k : -k, sign);
  c.emplace_back(n, 0.5 * sign);
  return c;
}

/// Ibar_n = I_n + S_n / 2.
inline SCombination Ibar_combination(long n) {
  SCombination c = I_combination(n);
  if (n != 0) c.emplace_back(n, 0.5);
  return c;
}

inline SCombination S_combination(long n) {
  if (n == 0) return {};
  return {{n, 1.0}};
}

/// E X Y for two S-combinations.
inline double covariance(const VarianceProfile& p, const SCombination& x, const SCombination& y) {
  quad::CompensatedSum s;
  for (const auto& [i, ci] : x) {
    for (const auto& [j, cj] : y) s.add(ci * cj * cov_S(p, i, j));
  }
  return s.value();
}

inline Eigen::MatrixXd gram_matrix(const VarianceProfile& p, std::span<const SCombination> combos) {
  const auto d = static_cast<Eigen::Index>(combos.size());
  Eigen::MatrixXd G(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      G(i, j) = G(j, i) = covariance(p, combos[i], combos[j]);
    }
  }
  return G;
}

inline Eigen::MatrixXd cov_S(const VarianceProfile& p, std::span<const long> indices) {
  std::vector<SCombination> c;
  for (long n : indices) c.push_back(S_combination(n));
  return gram_matrix(p, c);
}

/// Gram matrix of (I_n) at the given indices.
inline Eigen::MatrixXd cov_I(const VarianceProfile& p, std::span<const long> indices) {
  std::vector<SCombination> c;
  for (long n : indices) c.push_back(I_combination(n));
  return gram_matrix(p, c);
}

inline Eigen::MatrixXd cov_Ibar(const VarianceProfile& p, std::span<const long> indices) {
  std::vector<SCombination> c;
  for (long n : indices) c.push_back(Ibar_combination(n));
  return gram_matrix(p, c);
}

/// E (I_N + S_N/2)^2, evaluated as the Gram entry of sum_{k=1}^N S_k.
inline double second_moment_Ibar(const VarianceProfile& p, long N) {
  return covariance(p, Ibar_combination(N), Ibar_combination(N));
}

/// sum_{k=1}^N k E S_k^2.
inline double weighted_variance_sum(const VarianceProfile& p, long N) {
  quad::CompensatedSum s;
  for (long k = 1; k <= N; ++k) s.add(static_cast<double>(k) * p(k));
  return s.value();
}

/// Centering of the shifted integrated process.
///   S:      I_{n0+n} - I_{n0} - n S_{n0}, equal in law to (I_n)
///   Stilde: I_{n0+n} - I_{n0} - n (S_{n0} + S_{n0-1})/2, off by n xi_{n0}/2
enum class ShiftCentering { S, Stilde };

/// Max |Gram(shifted I) - Gram(I)| over the given indices.
inline double shifted_I_covariance_check(const VarianceProfile& p, long n0, std::span<const long> indices,
                                         ShiftCentering centering = ShiftCentering::S) {
  std::vector<SCombination> shifted;
  for (long n : indices) {
    SCombination c = I_combination(n0 + n);
    for (auto [k, w] : I_combination(n0)) c.emplace_back(k, -w);
    const double nd = static_cast<double>(n);
    if (centering == ShiftCentering::S) {
      c.emplace_back(n0, -nd);
    } else {
      c.emplace_back(n0, -0.5 * nd);
      c.emplace_back(n0 - 1, -0.5 * nd);
    }
    shifted.push_back(std::move(c));
  }
  const Eigen::MatrixXd lhs = gram_matrix(p, shifted);
  const Eigen::MatrixXd rhs = cov_I(p, indices);
  return (lhs - rhs).cwiseAbs().maxCoeff();
}

/// Kolmogorov-Szego condition: int_0^pi log p(u) du > -inf.
/// The |u|^{1-2H} factor is integrated in closed form; log of the remaining
/// factor goes through tanh-sinh quadrature. Any non-positive density value
/// seen on the nodes or on a 4096-point scan makes the integral -inf.
inline bool szego_check(const ProcessModel& model) {
  if (!model.has_density()) throw ConfigError("szego_check: model " + model.tag() + " has no density");
  const double pi = std::numbers::pi;
  for (int i = 0; i < 4096; ++i) {
    const double u = (i + 0.5) * pi / 4096.0;
    const double v = model.regular_part(u);
    if (!(v > 0.0) || !std::isfinite(v)) return false;
  }
  bool vanished = false;
  double value = 0.0;
  try {
    value = quad::integrate_singular(
        [&](double u) {
          const double v = model.regular_part(u);
          if (!(v > 0.0) || !std::isfinite(v)) {
            vanished = true;
            return 0.0;
          }
          return std::log(v);
        },
        0.0, pi, 1e-8);
  } catch (const QuadratureNonConvergence&) {
    return false;
  }
  if (vanished) return false;
  value += (1.0 - 2.0 * model.H()) * (pi * std::log(pi) - pi);
  return std::isfinite(value);
}

/// Number of strict sign changes in a sequence (zeros skipped).
inline int count_sign_changes(std::span<const double> x) {
  int changes = 0;
  int last = 0;
  for (double v : x) {
    const int s = (v > 0.0) - (v < 0.0);
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

}  // namespace persistlab
