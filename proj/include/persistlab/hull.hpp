#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "persistlab/errors.hpp"
#include "persistlab/simulate.hpp"

namespace persistlab {

/// Values x_n for n = first .. first + size - 1.
class IndexedSeries {
 public:
  IndexedSeries(std::span<const double> values, long first) : v_(values), first_(first) {}

  double operator()(long n) const { return v_[static_cast<std::size_t>(n - first_)]; }
  long first() const { return first_; }
  long last() const { return first_ + static_cast<long>(v_.size()) - 1; }

 private:
  std::span<const double> v_;
  long first_;
};

inline IndexedSeries I_series(const PathBundle& p) { return {p.I_values(), -p.N()}; }
inline IndexedSeries S_series(const PathBundle& p) { return {p.S_values(), -p.N()}; }

/// min_{1<=n<=m} (x_k - x_{k-n}) / n
inline double gamma_minus(const IndexedSeries& x, long k, long m) {
  if (m < 1) throw EmptyRange("gamma_minus: m must be >= 1");
  if (k - m < x.first() || k > x.last()) throw EmptyRange("gamma_minus: index range outside the path");
  double best = std::numeric_limits<double>::infinity();
  for (long n = 1; n <= m; ++n) best = std::min(best, (x(k) - x(k - n)) / static_cast<double>(n));
  return best;
}

/// max_{1<=n<=m} (x_{k+n} - x_k) / n
inline double gamma_plus(const IndexedSeries& x, long k, long m) {
  if (m < 1) throw EmptyRange("gamma_plus: m must be >= 1");
  if (k + m > x.last() || k < x.first()) throw EmptyRange("gamma_plus: index range outside the path");
  double best = -std::numeric_limits<double>::infinity();
  for (long n = 1; n <= m; ++n) best = std::max(best, (x(k + n) - x(k)) / static_cast<double>(n));
  return best;
}

/// Concave majorant of (n, I_n) on 0..N and the slope functionals built on it.
struct HullSummary {
  long N = 0;
  std::vector<long> nodal_points;    // hull vertices, increasing, contains 0 and N
  std::vector<double> gamma_minus;   // [k] = gamma^-_{k,k},   k = 1..N   (entry 0 unused)
  std::vector<double> gamma_plus;    // [k] = gamma^+_{k,N-k}, k = 0..N-1 (entry N unused)
  double F_sum = 0.0;                // sum_{k=1}^{N-1} (gamma^-_k - gamma^+_k)_+
  double F_hull = 0.0;               // gamma^+_0 - gamma^-_N
  double gamma0_plus = 0.0;
  double gammaN_minus = 0.0;

  bool is_nodal(long k) const { return std::binary_search(nodal_points.begin(), nodal_points.end(), k); }
};

namespace detail {

// Upper hull by monotone chain; collinear points are dropped.
inline std::vector<long> upper_hull(const IndexedSeries& x, long N) {
  std::vector<long> h;
  h.reserve(static_cast<std::size_t>(N + 1));
  for (long n = 0; n <= N; ++n) {
    while (h.size() >= 2) {
      const long a = h[h.size() - 2], b = h.back();
      const double cross = static_cast<double>(b - a) * (x(n) - x(a)) - (x(b) - x(a)) * static_cast<double>(n - a);
      if (cross >= 0.0) {
        h.pop_back();
      } else {
        break;
      }
    }
    h.push_back(n);
  }
  return h;
}

}  // namespace detail

/// Hull and the full gamma arrays of x on 0..N; O(N^2).
inline HullSummary concave_majorant(const IndexedSeries& x, long N) {
  if (N < 1) throw ConfigError("concave_majorant: N must be >= 1");
  if (x.first() > 0 || x.last() < N) throw EmptyRange("concave_majorant: series must cover 0..N");
  HullSummary h;
  h.N = N;
  h.nodal_points = detail::upper_hull(x, N);
  h.gamma_minus.assign(static_cast<std::size_t>(N + 1), 0.0);
  h.gamma_plus.assign(static_cast<std::size_t>(N + 1), 0.0);
  for (long k = 1; k <= N; ++k) h.gamma_minus[k] = gamma_minus(x, k, k);
  for (long k = 0; k < N; ++k) h.gamma_plus[k] = gamma_plus(x, k, N - k);
  for (long k = 1; k < N; ++k) h.F_sum += std::max(0.0, h.gamma_minus[k] - h.gamma_plus[k]);
  h.gamma0_plus = h.gamma_plus[0];
  h.gammaN_minus = h.gamma_minus[N];
  h.F_hull = h.gamma0_plus - h.gammaN_minus;
  return h;
}

inline HullSummary concave_majorant(const PathBundle& p, long N) { return concave_majorant(I_series(p), N); }

/// Violation counts of the hull identities on one summary.
struct HullCheck {
  double identity_gap = 0.0;  // |F_sum - F_hull| / (1 + |F_sum|)
  long nodal_mismatches = 0;  // k with (gamma^-_k > gamma^+_k) != (k nodal)
  long slope_mismatches = 0;  // consecutive vertices with gamma^+_{k_i} != gamma^-_{k_{i+1}}
  bool ok(double tol = 1e-9) const { return identity_gap <= tol && nodal_mismatches == 0 && slope_mismatches == 0; }
};

inline HullCheck check_hull(const HullSummary& h) {
  HullCheck c;
  c.identity_gap = std::abs(h.F_sum - h.F_hull) / (1.0 + std::abs(h.F_sum));
  for (long k = 1; k < h.N; ++k) {
    const bool drop = h.gamma_minus[k] - h.gamma_plus[k] > 0.0;
    if (drop != h.is_nodal(k)) ++c.nodal_mismatches;
  }
  for (std::size_t i = 0; i + 1 < h.nodal_points.size(); ++i) {
    if (h.gamma_plus[h.nodal_points[i]] != h.gamma_minus[h.nodal_points[i + 1]]) ++c.slope_mismatches;
  }
  return c;
}

/// gamma^+_{0,N} and gamma^-_{N,N} in O(N), and F_N as their difference.
struct FastHullFunctional {
  double gamma0_plus;
  double gammaN_minus;
  double F() const { return gamma0_plus - gammaN_minus; }
};

inline FastHullFunctional hull_functional(const IndexedSeries& x, long N) {
  return {gamma_plus(x, 0, N), gamma_minus(x, N, N)};
}

/// (gamma^-_{0,N} - gamma^+_{0,N})_+ on the two-sided path.
inline double vartheta(const IndexedSeries& x, long N) {
  return std::max(0.0, gamma_minus(x, 0, N) - gamma_plus(x, 0, N));
}

inline double vartheta(const PathBundle& p, long N) { return vartheta(I_series(p), N); }

/// vartheta_n for n = 1..N (entry 0 unused), O(N).
inline std::vector<double> vartheta_profile(const IndexedSeries& x, long N) {
  std::vector<double> out(static_cast<std::size_t>(N + 1), 0.0);
  double gm = std::numeric_limits<double>::infinity();
  double gp = -std::numeric_limits<double>::infinity();
  for (long n = 1; n <= N; ++n) {
    gm = std::min(gm, (x(0) - x(-n)) / static_cast<double>(n));
    gp = std::max(gp, (x(n) - x(0)) / static_cast<double>(n));
    out[n] = std::max(0.0, gm - gp);
  }
  return out;
}

/// Smallest index in 0..N where x attains its maximum.
inline long argmax_time(const IndexedSeries& x, long N) {
  if (N < 0 || x.first() > 0 || x.last() < N) throw EmptyRange("argmax_time: series must cover 0..N");
  long best = 0;
  for (long n = 1; n <= N; ++n) {
    if (x(n) > x(best)) best = n;
  }
  return best;
}

inline long argmax_time(const PathBundle& p, long N) { return argmax_time(S_series(p), N); }

}  // namespace persistlab
