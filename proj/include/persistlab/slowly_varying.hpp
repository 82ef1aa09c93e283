#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "persistlab/errors.hpp"

namespace persistlab {

/// A slowly varying factor l(x), x -> infinity.
///
///  - constant:   l(x) = c
///  - log_power:  l(x) = c * log(e + x)^beta
///  - cosine_log: l(x) = c * (1 + eps * cos(pi x) / log x), only for x >= 2
///
/// Construction checks l > 0 on [2, inf) and |l(2x)/l(x) - 1| <= 0.1 at
/// x = 1e3 and x = 1e6.
class SlowlyVarying {
 public:
  enum class Variant { constant, log_power, cosine_log };

  SlowlyVarying() = default;

  static SlowlyVarying constant(double c = 1.0) { return SlowlyVarying(Variant::constant, c, 0.0, 0.0); }
  static SlowlyVarying log_power(double c, double beta) { return SlowlyVarying(Variant::log_power, c, beta, 0.0); }
  static SlowlyVarying cosine_log(double c, double eps) { return SlowlyVarying(Variant::cosine_log, c, 0.0, eps); }

  double operator()(double x) const {
    switch (variant_) {
      case Variant::constant:
        return c_;
      case Variant::log_power:
        return c_ * std::pow(std::log(std::numbers::e + x), beta_);
      case Variant::cosine_log:
        return c_ * (1.0 + eps_ * std::cos(std::numbers::pi * x) / std::log(x));
    }
    return c_;
  }

  Variant variant() const { return variant_; }
  double c() const { return c_; }
  double beta() const { return beta_; }
  double eps() const { return eps_; }

  /// Smallest argument at which the factor is defined.
  double x_min() const { return variant_ == Variant::cosine_log ? 2.0 : 0.0; }

  bool is_constant() const { return variant_ == Variant::constant; }

  std::string name() const {
    switch (variant_) {
      case Variant::constant:
        return "constant";
      case Variant::log_power:
        return "log_power";
      case Variant::cosine_log:
        return "cosine_log";
    }
    return "?";
  }

 private:
  SlowlyVarying(Variant v, double c, double beta, double eps) : variant_(v), c_(c), beta_(beta), eps_(eps) {
    validate();
  }

  void validate() const {
    if (!(c_ > 0.0) || !std::isfinite(c_)) throw ConfigError("slowly varying factor: c must be > 0");
    if (!std::isfinite(beta_) || !std::isfinite(eps_)) throw ConfigError("slowly varying factor: non-finite parameter");
    if (variant_ == Variant::cosine_log) {
      // tail bound: 1 - |eps|/log(x) > 0 beyond x = 256
      if (std::abs(eps_) >= std::log(256.0)) throw ConfigError("slowly varying factor: l(x) > 0 violated for x >= 2");
      for (double x = 2.0; x <= 256.0; x += 1.0 / 128.0) {
        if (!((*this)(x) > 0.0)) throw ConfigError("slowly varying factor: l(x) > 0 violated for x >= 2");
      }
    }
    for (double x : {1e3, 1e6}) {
      const double ratio = (*this)(2.0 * x) / (*this)(x);
      if (!(std::abs(ratio - 1.0) <= 0.1)) {
        throw ConfigError("slowly varying factor: |l(2x)/l(x) - 1| > 0.1 at x = " + std::to_string(x));
      }
    }
  }

  Variant variant_ = Variant::constant;
  double c_ = 1.0;
  double beta_ = 0.0;
  double eps_ = 0.0;
};

}  // namespace persistlab
