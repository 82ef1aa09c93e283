#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "persistlab/errors.hpp"
#include "persistlab/model.hpp"
#include "persistlab/oracle.hpp"
#include "persistlab/quadrature.hpp"
#include "persistlab/simulate.hpp"

namespace persistlab {

/// Parameters of the shift-function construction.
///   rho in (-1, H-1), u0 in (0, pi], delta in (0, 2(H-1-rho)), A > 1.
struct RkhsParams {
  double H = 0.5;
  double rho = -0.75;
  double u0 = std::numbers::pi / 2;
  double delta = 0.25;
  double A = 2.0;

  static double midpoint_rho(double H) { return 0.5 * (-1.0 + (H - 1.0)); }

  static RkhsParams defaults(double H, double rho) {
    RkhsParams p;
    p.H = HurstParam(H).value();
    p.rho = rho;
    p.delta = H - 1.0 - rho;
    p.validate();
    return p;
  }

  void validate() const {
    (void)HurstParam(H);
    if (!(rho > -1.0 && rho < H - 1.0)) throw ConfigError("rho must lie in (-1, H-1)");
    if (!(u0 > 0.0 && u0 <= std::numbers::pi)) throw ConfigError("u0 must lie in (0, pi]");
    if (!(delta > 0.0 && delta < 2.0 * (H - 1.0 - rho))) throw ConfigError("delta must lie in (0, 2(H-1-rho))");
    if (!(A > 1.0)) throw ConfigError("Potter constant A must exceed 1");
  }
};

/// Largest value of l(u0)/l(u) / (A (u/u0)^{-delta}) on a log grid of (0, u0);
/// at most 1 when the Potter bound holds for the model.
inline double potter_ratio(const ProcessModel& model, const RkhsParams& p, int points = 2000) {
  const double l0 = model.regular_part(p.u0);
  double worst = 0.0;
  for (int i = 1; i <= points; ++i) {
    const double u = p.u0 * std::pow(1e-12, static_cast<double>(i) / points);
    const double lhs = l0 / model.regular_part(u);
    const double rhs = p.A * std::pow(u / p.u0, -p.delta);
    worst = std::max(worst, lhs / rhs);
  }
  return worst;
}

/// A function on |n| <= n_max together with its squared RKHS norm.
struct RkhsShiftFunction {
  enum class Parity { even, odd };

  std::vector<double> values;  // n = -n_max..n_max
  double norm_sq = 0.0;
  Parity parity = Parity::even;
  double target_exponent = 0.0;

  long n_max() const { return (static_cast<long>(values.size()) - 1) / 2; }
  double operator()(long n) const {
    if (std::labs(n) > n_max()) throw EmptyRange("shift function evaluated outside |n| <= n_max");
    return values[static_cast<std::size_t>(n + n_max())];
  }
  double ratio(long n) const { return (*this)(n) / std::pow(static_cast<double>(n), target_exponent); }
  /// |ratio(n_max) / ratio(n_max/2) - 1|
  double ratio_drift() const { return std::abs(ratio(n_max()) / ratio(n_max() / 2) - 1.0); }
  double min_positive_side() const {
    double m = std::numeric_limits<double>::infinity();
    for (long n = 1; n <= n_max(); ++n) m = std::min(m, (*this)(n));
    return m;
  }
  double min_value() const { return *std::min_element(values.begin(), values.end()); }
};

namespace detail {

// Builds the symmetric table from h[0..n_max] with the given parity.
inline RkhsShiftFunction reflect(const std::vector<double>& right, RkhsShiftFunction::Parity parity, double exponent,
                                 double norm_sq) {
  RkhsShiftFunction f;
  const long n_max = static_cast<long>(right.size()) - 1;
  f.values.assign(static_cast<std::size_t>(2 * n_max + 1), 0.0);
  const double sign = parity == RkhsShiftFunction::Parity::odd ? -1.0 : 1.0;
  for (long n = 0; n <= n_max; ++n) {
    f.values[static_cast<std::size_t>(n_max + n)] = right[static_cast<std::size_t>(n)];
    f.values[static_cast<std::size_t>(n_max - n)] = sign * right[static_cast<std::size_t>(n)];
  }
  if (parity == RkhsShiftFunction::Parity::odd) f.values[static_cast<std::size_t>(n_max)] = 0.0;
  f.parity = parity;
  f.target_exponent = exponent;
  f.norm_sq = norm_sq;
  return f;
}

// int_0^b u^e q(u) du for e > -1 via u = t^{1/(e+1)}.
template <class Q>
double power_weighted_integral(double e, double b, Q q, double rel_tol = 1e-10) {
  if (!(e > -1.0)) throw ConfigError("power_weighted_integral needs exponent > -1");
  const double k = 1.0 / (e + 1.0);
  auto g = [&](double t) { return t > 0.0 ? q(std::pow(t, k)) : q(std::numeric_limits<double>::min()); };
  return k * quad::integrate(g, 0.0, std::pow(b, e + 1.0), rel_tol, 0.0, 8);
}

template <class F>
double gauss32(F f, double a, double b) {
  const auto& rule = quad::gauss_legendre<32>();
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  quad::CompensatedSum s;
  for (std::size_t i = 0; i < rule.x.size(); ++i) s.add(rule.w[i] * f(mid + half * rule.x[i]));
  return half * s.value();
}

}  // namespace detail

/// G(X) = int_0^X cos(v) v^alpha dv for alpha in (-1, 0). The singular first
/// lobe goes to tanh-sinh; later lobes between zeros of
/// cos are summed with compensation and cached.
class CosPowerIntegral {
 public:
  explicit CosPowerIntegral(double alpha) : alpha_(alpha) {
    if (!(alpha > -1.0 && alpha < 0.0)) throw ConfigError("CosPowerIntegral needs alpha in (-1, 0)");
    zeros_.push_back(head(std::numbers::pi / 2));
  }

  double operator()(double X) {
    if (X <= 0.0) return 0.0;
    if (X <= std::numbers::pi / 2) return head(X);
    const auto k = static_cast<std::size_t>((X - std::numbers::pi / 2) / std::numbers::pi);
    extend(k);
    return zeros_[k] + detail::gauss32(integrand(), zero(k), X);
  }

  /// int_0^infty cos(v) v^alpha dv = Gamma(alpha+1) cos(pi (alpha+1) / 2)
  double limit() const { return std::tgamma(alpha_ + 1.0) * std::cos(std::numbers::pi * (alpha_ + 1.0) / 2.0); }

 private:
  struct Integrand {
    double a;
    double operator()(double v) const { return std::cos(v) * std::pow(v, a); }
  };
  Integrand integrand() const { return {alpha_}; }
  static double zero(std::size_t k) { return std::numbers::pi / 2 + static_cast<double>(k) * std::numbers::pi; }

  double head(double X) const { return quad::integrate_singular(integrand(), 0.0, X, 1e-14); }

  // zeros_[k] = G(pi/2 + k pi)
  void extend(std::size_t k) {
    while (zeros_.size() <= k) {
      const std::size_t j = zeros_.size() - 1;
      sum_.add(detail::gauss32(integrand(), zero(j), zero(j + 1)));
      zeros_.push_back(zeros_.front() + sum_.value());
    }
  }

  double alpha_;
  std::vector<double> zeros_;
  quad::CompensatedSum sum_;
};

/// lim h1(n) n^{-rho} = 2 Gamma(-rho) cos(pi rho / 2)
inline double h1_limit_constant(double rho) { return 2.0 * CosPowerIntegral(-rho - 1.0).limit(); }

/// h1(n) = 2 int_0^{u0} cos(nu) u^{-rho-1} du = 2 n^rho G(n u0), with
/// norm^2 = 2 int_0^{u0} u^{2H-3-2rho} / l(u) du.
inline RkhsShiftFunction build_h1(const ProcessModel& model, const RkhsParams& p, long n_max) {
  p.validate();
  if (!model.has_density()) throw ConfigError("build_h1 needs a model with a spectral density");
  if (n_max < 2) throw ConfigError("n_max must be >= 2");
  CosPowerIntegral G(-p.rho - 1.0);
  std::vector<double> right(static_cast<std::size_t>(n_max + 1));
  right[0] = 2.0 * std::pow(p.u0, -p.rho) / (-p.rho);
  for (long n = 1; n <= n_max; ++n) {
    const double nd = static_cast<double>(n);
    right[static_cast<std::size_t>(n)] = 2.0 * std::pow(nd, p.rho) * G(nd * p.u0);
  }
  const double e = 2.0 * p.H - 3.0 - 2.0 * p.rho;
  const double norm_sq =
      2.0 * detail::power_weighted_integral(e, p.u0, [&](double u) { return 1.0 / model.regular_part(u); });
  return detail::reflect(right, RkhsShiftFunction::Parity::even, p.rho, norm_sq);
}

/// Even bump g(u) = exp(-1 / (1 - (u/w)^2)) on |u| < w and its autocorrelation
/// f(u) = (1/2pi) int g(v) g(u - v) dv.
class Bump {
 public:
  Bump() : w_(1.0), zero_(true) {}
  explicit Bump(double width, bool zero = false) : w_(width), zero_(zero) {
    if (!(width > 0.0)) throw BumpSupportViolation("bump width must be positive");
  }

  double width() const { return w_; }
  bool is_zero() const { return zero_; }

  double g(double u) const {
    const double x = u / w_;
    if (zero_ || std::abs(x) >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - x * x));
  }
  double dg(double u) const {
    const double x = u / w_;
    if (zero_ || std::abs(x) >= 1.0) return 0.0;
    const double d = 1.0 - x * x;
    return g(u) * (-2.0 * x / (w_ * d * d));
  }

  double f(double u) const {
    u = std::abs(u);
    if (zero_ || u >= 2.0 * w_) return 0.0;
    const double lo = u - w_, hi = w_;
    quad::CompensatedSum s;
    constexpr int kPanels = 8;
    const double h = (hi - lo) / kPanels;
    for (int i = 0; i < kPanels; ++i) {
      s.add(detail::gauss32([&](double v) { return g(v) * g(u - v); }, lo + i * h, lo + (i + 1) * h));
    }
    return s.value() / (2.0 * std::numbers::pi);
  }

  /// sup |f''| = (1/2pi) int g'(v)^2 dv, attained at u = 0.
  double sup_f2() const {
    if (zero_) return 0.0;
    // int_0^w g'(u)^2 du = (1/w) int_0^1 (d/dx exp(-1/(1-x^2)))^2 dx
    auto unit = [](double x) {
      const double d = 1.0 - x * x;
      if (d <= 0.0) return 0.0;
      const double v = std::exp(-1.0 / d) * 2.0 * x / (d * d);
      return v * v;
    };
    return quad::integrate(unit, 0.0, 1.0, 1e-10, 0.0, 8) / (w_ * std::numbers::pi);
  }

  /// int_{-w}^{w} g(u) cos(n u) du with absolute accuracy 1e-10.
  double fourier(long n) const {
    if (zero_) return 0.0;
    const double nd = std::abs(static_cast<double>(n));
    auto integrand = [&](double u) { return g(u) * std::cos(nd * u); };
    auto composite = [&](int panels) {
      quad::CompensatedSum s;
      const double h = w_ / panels;
      for (int i = 0; i < panels; ++i) s.add(detail::gauss32(integrand, i * h, (i + 1) * h));
      return 2.0 * s.value();
    };
    int panels = static_cast<int>(std::ceil(nd * w_ / std::numbers::pi)) + 4;
    double prev = composite(panels);
    for (int refine = 0; refine < 4; ++refine) {
      panels *= 2;
      const double next = composite(panels);
      if (std::abs(next - prev) <= 1e-10) return next;
      prev = next;
    }
    throw QuadratureNonConvergence("bump Fourier coefficient did not converge at n = " + std::to_string(n));
  }

 private:
  double w_;
  bool zero_;
};

struct BumpSpec {
  double width = 0.0;  // 0: min(u0/2, pi/(2 n0))
  bool zero = false;   // g identically zero
};

inline double bump_width(const RkhsParams& p, long n0, const BumpSpec& spec) {
  const double cap = n0 > 0 ? std::min(p.u0 / 2, std::numbers::pi / (2.0 * static_cast<double>(n0))) : p.u0 / 2;
  if (spec.width == 0.0) return cap;
  if (spec.width > p.u0 / 2 * (1 + 1e-12)) throw BumpSupportViolation("bump support exceeds [-u0/2, u0/2]");
  if (n0 > 0 && spec.width * static_cast<double>(n0) > std::numbers::pi / 2 * (1 + 1e-12)) {
    throw BumpSupportViolation("bump wider than pi/(2 n0): Fourier coefficients may vanish for |n| <= n0");
  }
  return spec.width;
}

struct H2Result {
  RkhsShiftFunction h2;
  Bump bump;
  double sup_f2 = 0.0;
  double decay_bound(long n) const {
    const double nd = static_cast<double>(n);
    return 2.0 * std::numbers::pi * sup_f2 / (nd * nd);
  }
};

/// int g(u) cos(nu) du for n = 0..n_max by the trapezoid rule on M points of
/// (-pi, pi], evaluated with one FFT. The rule is exact up to aliasing from
/// frequencies >= M - n_max, where the bump coefficients are negligible; the
/// table is compared against the M/2 rule and must agree to 1e-10.
inline std::vector<double> bump_coefficients(const Bump& bump, long n_max) {
  std::vector<double> out(static_cast<std::size_t>(n_max + 1), 0.0);
  if (bump.is_zero()) return out;
  std::size_t M = 1024;
  const double need = std::max(4.0 * static_cast<double>(n_max + 1), 400.0 * std::numbers::pi / bump.width());
  while (static_cast<double>(M) < need) M <<= 1;
  auto table = [&](std::size_t size) {
    const double h = 2.0 * std::numbers::pi / static_cast<double>(size);
    auto in = detail::make_buffer(size);
    auto res = detail::make_buffer(size);
    for (std::size_t j = 0; j < size; ++j) in[j][0] = in[j][1] = 0.0;
    const auto J = static_cast<std::size_t>(bump.width() / h);
    for (std::size_t j = 0; j <= J && j < size / 2; ++j) {
      const double v = bump.g(static_cast<double>(j) * h);
      in[j][0] = v;
      if (j > 0) in[size - j][0] = v;
    }
    detail::FftPlan plan(size);
    plan.execute(in.get(), res.get());
    std::vector<double> t(static_cast<std::size_t>(n_max + 1));
    for (long n = 0; n <= n_max; ++n) t[static_cast<std::size_t>(n)] = h * res[static_cast<std::size_t>(n)][0];
    return t;
  };
  out = table(M);
  const auto coarse = table(M / 2);
  for (std::size_t n = 0; n < out.size(); ++n) {
    if (std::abs(out[n] - coarse[n]) > 1e-10) {
      throw QuadratureNonConvergence("bump Fourier table did not converge at n = " + std::to_string(n));
    }
  }
  return out;
}

/// h2(n) = int f(u) e^{-inu} du = g_n^2 / (2 pi), g_n the cosine coefficients of the bump;
/// norm^2 = int f^2 / p du.
inline H2Result build_h2(const ProcessModel& model, const RkhsParams& p, long n0, long n_max,
                         const BumpSpec& spec = {}) {
  p.validate();
  if (!model.has_density()) throw ConfigError("build_h2 needs a model with a spectral density");
  const Bump bump(bump_width(p, n0, spec), spec.zero);
  std::vector<double> right = bump_coefficients(bump, n_max);
  for (double& c : right) c = c * c / (2.0 * std::numbers::pi);
  double norm_sq = 0.0;
  if (!bump.is_zero()) {
    norm_sq = 2.0 * detail::power_weighted_integral(2.0 * p.H - 1.0, 2.0 * bump.width(), [&](double u) {
      const double fu = bump.f(u);
      return fu * fu / model.regular_part(u);
    });
  }
  H2Result r{detail::reflect(right, RkhsShiftFunction::Parity::even, -2.0, norm_sq), bump, bump.sup_f2()};
  return r;
}

/// Largest |n| with h1(n) <= 0, plus 2; zero when h1 is positive on the table.
inline long detect_n0(const RkhsShiftFunction& h1) {
  long last = -1;
  for (long n = 0; n <= h1.n_max(); ++n) {
    if (h1(n) <= 0.0) last = n;
  }
  return last < 0 ? 0 : last + 2;
}

/// <phi1, phi2> in L^2(mu) = 2 int_0^{2w} u^{2H-2-rho} f(u) / l(u) du.
inline double h1_h2_inner(const ProcessModel& model, const RkhsParams& p, const Bump& bump) {
  if (bump.is_zero()) return 0.0;
  return 2.0 * detail::power_weighted_integral(2.0 * p.H - 2.0 - p.rho, 2.0 * bump.width(),
                                               [&](double u) { return bump.f(u) / model.regular_part(u); });
}

struct CombinedH {
  RkhsShiftFunction h;
  double c2 = 0.0;
  long n0 = 0;
};

/// h = h1 + c2 h2 with c2 = (1 + max_{|n|<=n0} (-h1)_+) / min_{|n|<=n0, h2>0} h2, or 0
/// when h1 is already positive.
inline CombinedH combine_h(const RkhsShiftFunction& h1, const RkhsShiftFunction& h2, long n0, double inner12) {
  CombinedH out;
  out.n0 = n0;
  double worst = 0.0;
  double min_h2 = std::numeric_limits<double>::infinity();
  bool needs = false;
  for (long n = 0; n <= std::min(n0, h1.n_max()); ++n) {
    if (h1(n) <= 0.0) {
      needs = true;
      if (!(h2(n) > 0.0)) throw PositivityUnreachable("h2 vanishes at n = " + std::to_string(n) + " where h1 <= 0");
    }
    worst = std::max(worst, -h1(n));
    if (h2(n) > 0.0) min_h2 = std::min(min_h2, h2(n));
  }
  out.c2 = needs ? (1.0 + worst) / min_h2 : 0.0;
  out.h = h1;
  if (out.c2 > 0.0) {
    for (std::size_t i = 0; i < out.h.values.size(); ++i) out.h.values[i] += out.c2 * h2.values[i];
    out.h.norm_sq = h1.norm_sq + 2.0 * out.c2 * inner12 + out.c2 * out.c2 * h2.norm_sq;
  }
  return out;
}

/// f(n) = (rho+1) sum_{k=1}^n h(k), odd.
inline RkhsShiftFunction lift_to_S(const RkhsShiftFunction& h, double rho, long n_max) {
  if (n_max > h.n_max()) throw EmptyRange("lift_to_S: n_max exceeds the table of h");
  std::vector<double> right(static_cast<std::size_t>(n_max + 1), 0.0);
  quad::CompensatedSum F;
  for (long n = 1; n <= n_max; ++n) {
    F.add(h(n));
    right[static_cast<std::size_t>(n)] = (rho + 1.0) * F.value();
  }
  return detail::reflect(right, RkhsShiftFunction::Parity::odd, rho + 1.0, (rho + 1.0) * (rho + 1.0) * h.norm_sq);
}

/// g(n) = (rho+1)(rho+2) [sum_{k=1}^{n-1} F(k) + F(n)/2], F(k) = sum_{j<=k} h(j), even.
inline RkhsShiftFunction lift_to_I(const RkhsShiftFunction& h, double rho, long n_max) {
  if (n_max > h.n_max()) throw EmptyRange("lift_to_I: n_max exceeds the table of h");
  const double k = (rho + 1.0) * (rho + 2.0);
  std::vector<double> right(static_cast<std::size_t>(n_max + 1), 0.0);
  quad::CompensatedSum F, sumF;
  for (long n = 1; n <= n_max; ++n) {
    F.add(h(n));
    right[static_cast<std::size_t>(n)] = k * (sumF.value() + 0.5 * F.value());
    sumF.add(F.value());
  }
  return detail::reflect(right, RkhsShiftFunction::Parity::even, rho + 2.0, k * k * h.norm_sq);
}

/// Scales `base` so that s * base(n) >= c |n|^exponent for 1 <= |n| <= n_range
/// (n >= 1 only for odd functions). The scale carries a 5% margin.
inline RkhsShiftFunction dominating_shift(const RkhsShiftFunction& base, double c, double exponent, long n_range) {
  if (exponent >= base.target_exponent) {
    throw GrowthMismatch("required growth exponent " + std::to_string(exponent) + " is not below the attainable " +
                         std::to_string(base.target_exponent));
  }
  if (n_range < 1 || n_range > base.n_max()) throw EmptyRange("dominating_shift: n_range outside the table");
  const bool odd = base.parity == RkhsShiftFunction::Parity::odd;
  double s = 0.0;
  for (long n = odd ? 1 : -n_range; n <= n_range; ++n) {
    if (n == 0) continue;
    if (!(base(n) > 0.0)) throw GrowthMismatch("base function is not positive at n = " + std::to_string(n));
    s = std::max(s, c * std::pow(static_cast<double>(std::labs(n)), exponent) / base(n));
  }
  s *= 1.05;
  RkhsShiftFunction out = base;
  for (double& v : out.values) v *= s;
  out.norm_sq *= s * s;
  return out;
}

/// sqrt(f^T cov^{-1} f)
inline double finite_norm(const Eigen::MatrixXd& cov, const Eigen::VectorXd& values) {
  return std::sqrt(inverse_quadratic_form(cov, values));
}

/// The whole construction for one model: h1, h2, h and the lifts f, g.
struct RkhsConstruction {
  RkhsParams params;
  RkhsShiftFunction h1;
  H2Result h2;
  CombinedH h;
  RkhsShiftFunction f;
  RkhsShiftFunction g;
  double potter_ratio = 0.0;
};

inline RkhsConstruction build_rkhs(const ProcessModel& model, const RkhsParams& p, long n_max,
                                   const BumpSpec& bump = {}) {
  RkhsConstruction c;
  c.params = p;
  c.h1 = build_h1(model, p, n_max);
  const long n0 = detect_n0(c.h1);
  c.h2 = build_h2(model, p, n0, n_max, bump);
  c.h = combine_h(c.h1, c.h2.h2, n0, h1_h2_inner(model, p, c.h2.bump));
  c.f = lift_to_S(c.h.h, p.rho, n_max);
  c.g = lift_to_I(c.h.h, p.rho, n_max);
  c.potter_ratio = potter_ratio(model, p);
  return c;
}

}  // namespace persistlab
