#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "persistlab/errors.hpp"
#include "persistlab/model.hpp"
#include "persistlab/normal.hpp"
#include "persistlab/persistence.hpp"
#include "persistlab/philox.hpp"
#include "persistlab/spectral.hpp"

namespace persistlab {

inline constexpr int kMaxOrthantDimension = 12;

/// P(X_i <= upper_i for all i), X ~ N(0, cov).
struct OrthantQuery {
  Eigen::MatrixXd cov;
  Eigen::VectorXd upper;
};

struct OrthantResult {
  double prob = 0.0;
  double err = 0.0;  // 3 x standard error across random shifts
  std::size_t points = 0;
};

struct OrthantOptions {
  double target_err = 1e-5;
  int shifts = 12;
  std::size_t min_points = 1u << 10;
  std::size_t max_points = 1u << 18;  // per shift
  std::uint64_t seed = 0x6f7261636c65ULL;
};

/// Throws NotPSD unless cov is symmetric with min eigenvalue >= -1e-9 max.
inline void require_psd(const Eigen::MatrixXd& cov) {
  if (cov.rows() != cov.cols()) throw ConfigError("covariance matrix must be square");
  if (cov.size() == 0) return;
  const double scale = std::max(1.0, cov.cwiseAbs().maxCoeff());
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) throw NotPSD("covariance matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
  if (lo < -1e-9 * std::max(hi, 0.0)) {
    throw NotPSD("covariance matrix has eigenvalue " + std::to_string(lo) + " (max " + std::to_string(hi) + ")");
  }
}

namespace detail {

// Separation of variables with Genz-Bretz variable prioritisation.
class GenzIntegrand {
 public:
  GenzIntegrand(const Eigen::MatrixXd& cov, const Eigen::VectorXd& upper) : d_(cov.rows()) {
    Eigen::MatrixXd A = cov;
    b_ = upper;
    C_ = Eigen::MatrixXd::Zero(d_, d_);
    Eigen::VectorXd y = Eigen::VectorXd::Zero(d_);
    const double eps = 1e-10 * std::max(1e-300, cov.diagonal().maxCoeff());
    for (Eigen::Index i = 0; i < d_; ++i) {
      Eigen::Index best = -1;
      double best_p = 2.0, best_t = 0.0, best_s = 0.0;
      for (Eigen::Index j = i; j < d_; ++j) {
        double s2 = A(j, j);
        double mu = 0.0;
        for (Eigen::Index k = 0; k < i; ++k) {
          s2 -= C_(j, k) * C_(j, k);
          mu += C_(j, k) * y[k];
        }
        if (s2 <= eps) continue;
        const double t = (b_[j] - mu) / std::sqrt(s2);
        const double p = normal_cdf(t);
        if (p < best_p) {
          best_p = p;
          best = j;
          best_t = t;
          best_s = std::sqrt(s2);
        }
      }
      if (best < 0) {
        // Remaining variables are affine in the earlier ones.
        rank_ = i;
        for (Eigen::Index r = i; r < d_; ++r)
          for (Eigen::Index c = i; c < d_; ++c) C_(r, c) = 0.0;
        return;
      }
      if (best != i) {
        A.row(i).swap(A.row(best));
        A.col(i).swap(A.col(best));
        std::swap(b_[i], b_[best]);
        C_.row(i).head(i).swap(C_.row(best).head(i));
      }
      C_(i, i) = best_s;
      for (Eigen::Index r = i + 1; r < d_; ++r) {
        double v = A(r, i);
        for (Eigen::Index k = 0; k < i; ++k) v -= C_(r, k) * C_(i, k);
        C_(r, i) = v / best_s;
      }
      // Conditional mean of a standard normal truncated above at t.
      const double tail = normal_cdf(best_t);
      y[i] = tail > 1e-300 ? -std::exp(-0.5 * best_t * best_t) / std::sqrt(2.0 * std::numbers::pi) / tail : best_t;
    }
    rank_ = d_;
  }

  Eigen::Index dimension() const { return d_; }
  // Number of uniform coordinates the integrand reads.
  Eigen::Index arity() const { return std::max<Eigen::Index>(rank_ - 1, 0); }

  double operator()(std::span<const double> w, std::vector<double>& y) const {
    double prod = 1.0;
    for (Eigen::Index i = 0; i < d_; ++i) {
      double t = b_[i];
      for (Eigen::Index k = 0; k < std::min(i, rank_); ++k) t -= C_(i, k) * y[k];
      if (i >= rank_) {
        if (t < 0.0) return 0.0;
        continue;
      }
      const double e = normal_cdf(t / C_(i, i));
      prod *= e;
      if (prod <= 0.0) return 0.0;
      if (i + 1 < rank_) {
        const double u = std::clamp(w[i] * e, std::numeric_limits<double>::min(), 1.0 - 1e-16);
        y[i] = normal_quantile(u);
      }
    }
    return prod;
  }

 private:
  Eigen::Index d_;
  Eigen::Index rank_ = 0;
  Eigen::MatrixXd C_;
  Eigen::VectorXd b_;
};

inline bool is_prime(unsigned n) {
  if (n < 2) return false;
  for (unsigned k = 2; k * k <= n; ++k)
    if (n % k == 0) return false;
  return true;
}

// Richtmyer generator: fractional parts of sqrt(p) for the first primes.
inline std::vector<double> richtmyer_generator(std::size_t dim) {
  std::vector<double> z;
  for (unsigned p = 2; z.size() < dim; ++p) {
    if (is_prime(p)) z.push_back(std::sqrt(static_cast<double>(p)) - std::floor(std::sqrt(static_cast<double>(p))));
  }
  return z;
}

}  // namespace detail

/// Orthant probability by separation of variables and a randomly shifted
/// Richtmyer lattice with antithetic points.
inline OrthantResult orthant_prob(const OrthantQuery& q, const OrthantOptions& opt = {}) {
  if (q.cov.rows() != q.upper.size()) throw ConfigError("orthant query: cov and upper sizes differ");
  if (q.cov.rows() > kMaxOrthantDimension) throw DimensionTooLarge("orthant dimension exceeds 12");
  require_psd(q.cov);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < q.upper.size(); ++i) {
    if (std::isnan(q.upper[i])) throw ConfigError("orthant threshold is NaN");
    if (q.upper[i] == -std::numeric_limits<double>::infinity()) return {0.0, 0.0, 0};
    if (q.upper[i] != std::numeric_limits<double>::infinity()) keep.push_back(i);
  }
  const auto d = static_cast<Eigen::Index>(keep.size());
  if (d == 0) return {1.0, 0.0, 0};
  Eigen::MatrixXd cov(d, d);
  Eigen::VectorXd upper(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    upper[i] = q.upper[keep[i]];
    for (Eigen::Index j = 0; j < d; ++j) cov(i, j) = q.cov(keep[i], keep[j]);
  }
  const detail::GenzIntegrand f(cov, upper);
  const auto m = static_cast<std::size_t>(f.arity());
  std::vector<double> y(static_cast<std::size_t>(d)), w(std::max<std::size_t>(m, 1)), wa(w.size());
  if (m == 0) {
    return {f(w, y), 0.0, 1};
  }
  const auto z = detail::richtmyer_generator(m);
  NormalStream rng(opt.seed, 0);
  std::vector<std::vector<double>> shifts(static_cast<std::size_t>(opt.shifts), std::vector<double>(m));
  for (auto& s : shifts)
    for (double& v : s) v = rng.next_uniform();

  OrthantResult res;
  for (std::size_t n = opt.min_points;; n *= 2) {
    std::vector<double> est;
    for (const auto& s : shifts) {
      quad::CompensatedSum acc;
      for (std::size_t k = 1; k <= n; ++k) {
        for (std::size_t j = 0; j < m; ++j) {
          double x = static_cast<double>(k) * z[j] + s[j];
          x -= std::floor(x);
          x = std::abs(2.0 * x - 1.0);  // baker's transform
          w[j] = x;
          wa[j] = 1.0 - x;
        }
        acc.add(0.5 * (f(w, y) + f(wa, y)));
      }
      est.push_back(acc.value() / static_cast<double>(n));
    }
    double mean = 0.0;
    for (double e : est) mean += e;
    mean /= static_cast<double>(est.size());
    double var = 0.0;
    for (double e : est) var += (e - mean) * (e - mean);
    var /= static_cast<double>(est.size() * (est.size() - 1));
    res = {std::clamp(mean, 0.0, 1.0), 3.0 * std::sqrt(var), n};
    if (res.err <= opt.target_err || n >= opt.max_points) break;
  }
  return res;
}

namespace detail {

struct EventCoordinates {
  std::vector<long> indices;
  std::vector<SCombination> combos;
};

inline EventCoordinates event_coordinates(long N, Process process, Side side) {
  EventCoordinates c;
  const long left = side == Side::two_sided ? N + detail::left_extent(process) : 0;
  for (long n = -left; n <= N; ++n) {
    if (n == 0) continue;
    c.indices.push_back(n);
    switch (process) {
      case Process::S:
        c.combos.push_back(S_combination(n));
        break;
      case Process::I:
        c.combos.push_back(I_combination(n));
        break;
      case Process::Ibar:
        c.combos.push_back(Ibar_combination(n));
        break;
    }
  }
  return c;
}

}  // namespace detail

/// Exact persistence probability on the same index windows as mc_persistence.
/// The n = 0 coordinate is zero and dropped; b(0) < 0 gives probability 0.
inline OrthantResult persistence_exact(const ProcessModel& model, long N, Process process, Side side,
                                       const Barrier& barrier, const OrthantOptions& opt = {}) {
  if (N < 1) throw ConfigError("persistence_exact: N must be >= 1");
  if (barrier(0) < 0.0) return {0.0, 0.0, 0};
  const auto c = detail::event_coordinates(N, process, side);
  if (static_cast<long>(c.indices.size()) > kMaxOrthantDimension) {
    throw DimensionTooLarge("persistence_exact: event dimension " + std::to_string(c.indices.size()) + " exceeds 12");
  }
  const auto profile = variance_profile(model, 2 * N + 2);
  OrthantQuery q{gram_matrix(profile, c.combos), Eigen::VectorXd(static_cast<Eigen::Index>(c.indices.size()))};
  for (std::size_t i = 0; i < c.indices.size(); ++i) q.upper[static_cast<Eigen::Index>(i)] = barrier(c.indices[i]);
  return orthant_prob(q, opt);
}

/// binom(2N, N) 4^{-N}
inline double sparre_andersen_one_sided(long N) {
  if (N < 1) throw ConfigError("sparre_andersen_one_sided: N must be >= 1");
  double p = 1.0;
  for (long k = 1; k <= N; ++k) p *= static_cast<double>(2 * k - 1) / static_cast<double>(2 * k);
  return p;
}

/// P(I in A_m) for A_m = {x_n <= -|n| + m n : 1 <= |n| <= N}.
struct PrekopaReport {
  long N = 0;
  long m = 0;
  OrthantResult p0, pm, pminus;
  double margin() const { return p0.prob - pm.prob; }
  bool ordering_ok() const { return p0.prob >= pm.prob - (p0.err + pm.err); }
  bool symmetry_ok() const { return std::abs(pm.prob - pminus.prob) <= pm.err + pminus.err; }
  bool ok() const { return ordering_ok() && symmetry_ok(); }
};

inline Eigen::VectorXd prekopa_thresholds(long N, long m) {
  Eigen::VectorXd b(2 * N);
  Eigen::Index i = 0;
  for (long n = -N; n <= N; ++n) {
    if (n == 0) continue;
    b[i++] = -static_cast<double>(std::labs(n)) + static_cast<double>(m * n);
  }
  return b;
}

inline PrekopaReport prekopa_check(const ProcessModel& model, long N, long m, const OrthantOptions& opt = {}) {
  if (N < 1 || 2 * N > 8) throw DimensionTooLarge("prekopa_check supports 1 <= N <= 4");
  const auto c = detail::event_coordinates(N, Process::I, Side::two_sided);
  const auto profile = variance_profile(model, 2 * N + 2);
  const Eigen::MatrixXd cov = gram_matrix(profile, c.combos);
  PrekopaReport r;
  r.N = N;
  r.m = m;
  r.p0 = orthant_prob({cov, prekopa_thresholds(N, 0)}, opt);
  r.pm = m == 0 ? r.p0 : orthant_prob({cov, prekopa_thresholds(N, m)}, opt);
  r.pminus = m == 0 ? r.p0 : orthant_prob({cov, prekopa_thresholds(N, -m)}, opt);
  return r;
}

/// f^T cov^{-1} f; throws NotInvertible unless min eigenvalue > 1e-9 max.
inline double inverse_quadratic_form(const Eigen::MatrixXd& cov, const Eigen::VectorXd& f) {
  if (cov.rows() != cov.cols() || cov.rows() != f.size()) throw ConfigError("quadratic form: size mismatch");
  if (cov.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  const auto& lam = es.eigenvalues();
  if (!(lam.minCoeff() > 1e-9 * lam.maxCoeff())) {
    throw NotInvertible("covariance matrix is not invertible (eigenvalue ratio " +
                        std::to_string(lam.minCoeff() / lam.maxCoeff()) + ")");
  }
  const Eigen::VectorXd g = es.eigenvectors().transpose() * f;
  return (g.array().square() / lam.array()).sum();
}

/// Change-of-measure bracket for S = {x <= upper} and shift f.
struct ComReport {
  double norm_sq = 0.0;
  OrthantResult base;     // P(X in S)
  OrthantResult shifted;  // P(X + f in S)
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();
  bool upper_applies = false;
  double lower_slack() const { return shifted.prob - lower; }
  double upper_slack() const { return upper - shifted.prob; }
  bool lower_ok() const { return lower_slack() >= -(shifted.err + base.err); }
  bool upper_ok() const { return !upper_applies || upper_slack() >= -(shifted.err + base.err); }
  bool ok() const { return lower_ok() && upper_ok(); }
};

inline ComReport com_bounds_check(const Eigen::MatrixXd& cov, const Eigen::VectorXd& shift,
                                  const Eigen::VectorXd& upper, const OrthantOptions& opt = {}) {
  ComReport r;
  r.norm_sq = inverse_quadratic_form(cov, shift);
  r.base = orthant_prob({cov, upper}, opt);
  r.shifted = orthant_prob({cov, upper - shift}, opt);
  const double P = r.base.prob;
  if (!(P > 0.0 && P < 1.0)) throw NumericalError("change-of-measure bounds need 0 < P(X in S) < 1");
  const double L = std::log(1.0 / P);
  const double root = std::sqrt(2.0 * r.norm_sq * L);
  r.lower = std::exp(-root - 0.5 * r.norm_sq) * P;
  r.upper_applies = r.norm_sq < 2.0 * L;
  if (r.upper_applies) r.upper = std::exp(root - 0.5 * r.norm_sq) * P;
  return r;
}

}  // namespace persistlab
