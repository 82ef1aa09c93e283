#pragma once

#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <numbers>
#include <string>
#include <utility>

#include <json.hpp>

#include "persistlab/errors.hpp"
#include "persistlab/slowly_varying.hpp"

namespace persistlab {

/// Hurst parameter, strictly inside (0, 1).
class HurstParam {
 public:
  explicit HurstParam(double h) : h_(h) {
    if (!(h > 0.0 && h < 1.0)) throw ConfigError("Hurst parameter must satisfy 0 < H < 1, got " + std::to_string(h));
  }
  double value() const { return h_; }
  operator double() const { return h_; }

 private:
  double h_;
};

/// Low-frequency constant of the fGn spectral density, p(u) ~ m_H |u|^{1-2H}.
inline double fgn_spectral_constant(double H) {
  return std::tgamma(2.0 * H + 1.0) * std::sin(std::numbers::pi * H) / (2.0 * std::numbers::pi);
}

namespace detail {

// sum_{j != 0} |2 pi j + u|^{-s}, truncated at |j| = 50 with an Euler-Maclaurin tail.
inline double fgn_alias_sum(double s, double u) {
  const double two_pi = 2.0 * std::numbers::pi;
  constexpr int kTerms = 50;
  double sum = 0.0;
  for (int j = 1; j <= kTerms; ++j) {
    sum += std::pow(two_pi * j + u, -s) + std::pow(two_pi * j - u, -s);
  }
  auto tail = [&](double shift) {
    const double x = two_pi * (kTerms + 1) + shift;
    const double integral = std::pow(x, 1.0 - s) / (two_pi * (s - 1.0));
    const double f = std::pow(x, -s);
    const double df = -two_pi * s * std::pow(x, -s - 1.0);
    const double d3f = -std::pow(two_pi, 3) * s * (s + 1.0) * (s + 2.0) * std::pow(x, -s - 3.0);
    return integral + 0.5 * f - df / 12.0 + d3f / 720.0;
  };
  return sum + tail(u) + tail(-u);
}

}  // namespace detail

/// p(u) / |u|^{1-2H} for the exact fGn density below; finite as u -> 0.
inline double fgn_regular_part(double H, double u) {
  u = std::abs(u);
  const double s = 2.0 * H + 1.0;
  const double half = std::sin(0.5 * u);
  // 2 (1 - cos u) / u^2, written without cancellation; series below 1e-4
  const double q = u > 1e-4 ? 4.0 * half * half / (u * u) : 1.0 - u * u / 12.0;
  return fgn_spectral_constant(H) * q * (1.0 + std::pow(u, s) * detail::fgn_alias_sum(s, u));
}

/// Exact fGn spectral density in the convention r(k) = int_{-pi}^{pi} e^{iku} p(u) du:
/// p(u) = 2 m_H (1 - cos u) sum_j |2 pi j + u|^{-2H-1}.
inline double fgn_spectral_density(double H, double u) {
  u = std::abs(u);
  return fgn_regular_part(H, u) * std::pow(u, 1.0 - 2.0 * H);
}

/// Law of the stationary increment sequence (xi_n).
///
/// Representations:
///  - fgn:           closed-form fGn covariance scaled by a constant factor c
///  - fgn_spectral:  fGn through its exact spectral density (validation only)
///  - density:       p(u) = m_H l(1/u) |u|^{1-2H} on (0, pi]
///  - custom:        caller supplied density
///  - profile:       E S_n^2 = n^{2H} l(n + 2); covariance by second differences
class ProcessModel {
 public:
  enum class Kind { fgn, fgn_spectral, density, custom, profile };
  using DensityFn = std::function<double(double)>;

  static ProcessModel fgn(HurstParam H, SlowlyVarying sv = SlowlyVarying::constant(1.0)) {
    if (!sv.is_constant()) throw ConfigError("fgn model requires a constant slowly varying factor");
    return ProcessModel(Kind::fgn, H, sv, std::numbers::pi / 2);
  }
  static ProcessModel fgn_spectral(HurstParam H) {
    return ProcessModel(Kind::fgn_spectral, H, SlowlyVarying::constant(1.0), std::numbers::pi / 2);
  }
  static ProcessModel density(HurstParam H, SlowlyVarying sv, double u0 = std::numbers::pi / 2) {
    if (sv.variant() == SlowlyVarying::Variant::cosine_log) {
      throw ConfigError("cosine_log factor is only defined for x >= 2; use it with a profile model");
    }
    return ProcessModel(Kind::density, H, sv, u0);
  }
  static ProcessModel custom_density(HurstParam H, DensityFn p, double u0 = std::numbers::pi / 2,
                                     std::string name = "custom") {
    ProcessModel m(Kind::custom, H, SlowlyVarying::constant(1.0), u0);
    m.custom_ = std::make_shared<const DensityFn>(std::move(p));
    m.custom_name_ = std::move(name);
    return m;
  }
  static ProcessModel profile(HurstParam H, SlowlyVarying sv) { return ProcessModel(Kind::profile, H, sv, std::numbers::pi / 2); }

  Kind kind() const { return kind_; }
  double H() const { return H_; }
  double m_H() const { return fgn_spectral_constant(H_); }
  const SlowlyVarying& sv() const { return sv_; }
  double u0() const { return u0_; }

  bool has_density() const { return kind_ != Kind::profile; }

  /// Spectral density at u in (0, pi]; even extension implied.
  double density(double u) const {
    u = std::abs(u);
    switch (kind_) {
      case Kind::fgn:
        return sv_.c() * fgn_spectral_density(H_, u);
      case Kind::fgn_spectral:
        return fgn_spectral_density(H_, u);
      case Kind::density:
        return m_H() * sv_(1.0 / u) * std::pow(u, 1.0 - 2.0 * H_);
      case Kind::custom:
        return (*custom_)(u);
      case Kind::profile:
        break;
    }
    throw ConfigError("model " + tag() + " has no spectral density");
  }

  /// p(u) / |u|^{1-2H}: the slowly varying part of the density near zero.
  double regular_part(double u) const {
    u = std::abs(u);
    if (kind_ == Kind::density) return m_H() * sv_(1.0 / u);
    if (kind_ == Kind::fgn) return sv_.c() * fgn_regular_part(H_, u);
    if (kind_ == Kind::fgn_spectral) return fgn_regular_part(H_, u);
    return density(u) / std::pow(u, 1.0 - 2.0 * H_);
  }

  /// The factor l(n) with E S_n^2 ~ n^{2H} l(n).
  double ell(double n) const {
    switch (kind_) {
      case Kind::fgn:
        return sv_.c();
      case Kind::density:
        return sv_(n);
      case Kind::profile:
        return sv_(n + 2.0);
      default:
        return 1.0;
    }
  }

  std::string kind_name() const {
    switch (kind_) {
      case Kind::fgn:
        return "fgn";
      case Kind::fgn_spectral:
        return "fgn_spectral";
      case Kind::density:
        return "density";
      case Kind::custom:
        return "custom";
      case Kind::profile:
        return "profile";
    }
    return "?";
  }

  std::string tag() const {
    char buf[64];
    std::snprintf(buf, sizeof buf, "(H=%g)", H_);
    std::string t = (kind_ == Kind::custom ? custom_name_ : kind_name()) + buf;
    if (!sv_.is_constant() || sv_.c() != 1.0) t += "[" + sv_.name() + "]";
    return t;
  }

  nlohmann::json to_json() const {
    nlohmann::json j{{"kind", kind_name()}, {"H", H_}};
    nlohmann::json s{{"variant", sv_.name()}, {"c", sv_.c()}};
    if (sv_.variant() == SlowlyVarying::Variant::log_power) s["beta"] = sv_.beta();
    if (sv_.variant() == SlowlyVarying::Variant::cosine_log) s["eps"] = sv_.eps();
    j["sv"] = s;
    if (kind_ == Kind::density) j["u0"] = u0_;
    return j;
  }

  static ProcessModel from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("kind") || !j.contains("H")) {
      throw ConfigError("model specification needs \"kind\" and \"H\"");
    }
    if (!j["H"].is_number()) throw ConfigError("model specification: \"H\" must be a number");
    const std::string kind = j["kind"].get<std::string>();
    const HurstParam H(j["H"].get<double>());
    SlowlyVarying sv = SlowlyVarying::constant(1.0);
    if (j.contains("sv")) sv = sv_from_json(j["sv"]);
    const double u0 = j.value("u0", std::numbers::pi / 2);
    if (kind == "fgn") return fgn(H, sv);
    if (kind == "fgn_spectral") return fgn_spectral(H);
    if (kind == "density") return density(H, sv, u0);
    if (kind == "profile") return profile(H, sv);
    throw ConfigError("unknown model kind '" + kind + "'");
  }

  static SlowlyVarying sv_from_json(const nlohmann::json& s) {
    const std::string v = s.value("variant", std::string("constant"));
    const double c = s.value("c", 1.0);
    if (v == "constant") return SlowlyVarying::constant(c);
    if (v == "log_power") return SlowlyVarying::log_power(c, s.value("beta", 0.0));
    if (v == "cosine_log") return SlowlyVarying::cosine_log(c, s.value("eps", 1.0));
    throw ConfigError("unknown slowly varying variant '" + v + "'");
  }

 private:
  ProcessModel(Kind k, HurstParam H, SlowlyVarying sv, double u0) : kind_(k), H_(H.value()), sv_(sv), u0_(u0) {
    if (!(u0 > 0.0 && u0 <= std::numbers::pi)) throw ConfigError("cutoff u0 must lie in (0, pi]");
  }

  Kind kind_;
  double H_;
  SlowlyVarying sv_;
  double u0_;
  std::shared_ptr<const DensityFn> custom_;
  std::string custom_name_;
};

}  // namespace persistlab
