#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "persistlab/errors.hpp"

namespace persistlab::quad {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct Rule {
  std::vector<double> x;
  std::vector<double> w;
};

template <unsigned N>
const Rule& gauss_legendre() {
  static const Rule rule = [] {
    using G = boost::math::quadrature::gauss<double, N>;
    Rule r;
    const auto& a = G::abscissa();
    const auto& w = G::weights();
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i] == 0.0) {
        r.x.push_back(0.0);
        r.w.push_back(w[i]);
      } else {
        r.x.push_back(a[i]);
        r.w.push_back(w[i]);
        r.x.push_back(-a[i]);
        r.w.push_back(w[i]);
      }
    }
    return r;
  }();
  return rule;
}

/// Compensated (Neumaier) summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Adaptive Gauss-Kronrod (G30/K61) over [a, b] split into `panels` equal pieces.
/// Throws QuadratureNonConvergence when the summed error estimate exceeds
/// max(abs_tol, rel_tol * L1).
template <class F>
double integrate(F f, double a, double b, double rel_tol, double abs_tol = 0.0, unsigned panels = 1,
                 double* error_out = nullptr) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  if (panels == 0) panels = 1;
  CompensatedSum total;
  double err_total = 0.0;
  double l1_total = 0.0;
  const double h = (b - a) / panels;
  for (unsigned i = 0; i < panels; ++i) {
    const double lo = a + i * h;
    const double hi = (i + 1 == panels) ? b : a + (i + 1) * h;
    double err = 0.0;
    double l1 = 0.0;
    total.add(GK::integrate(f, lo, hi, 15, rel_tol * 0.1, &err, &l1));
    err_total += err;
    l1_total += l1;
  }
  if (error_out) *error_out = err_total;
  if (err_total > std::max(abs_tol, rel_tol * l1_total) && err_total > 1e-300) {
    throw QuadratureNonConvergence("adaptive quadrature did not reach tolerance: error estimate " +
                                   std::to_string(err_total));
  }
  return total.value();
}

/// tanh-sinh quadrature for integrands with endpoint singularities.
template <class F>
double integrate_singular(F f, double a, double b, double rel_tol, double* error_out = nullptr) {
  static thread_local boost::math::quadrature::tanh_sinh<double> ts;
  double err = 0.0;
  double l1 = 0.0;
  const double v = ts.integrate(f, a, b, rel_tol, &err, &l1);
  if (error_out) *error_out = err;
  if (!std::isfinite(v) || err > std::max(1e3 * rel_tol, 1e-6) * std::max(l1, 1e-300)) {
    throw QuadratureNonConvergence("tanh-sinh quadrature did not converge: error estimate " + std::to_string(err));
  }
  return v;
}

}  // namespace persistlab::quad
