#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace driftlab::detail {

/// Adaptive Gauss-Kronrod over a finite [a, b], integrated on the unit
/// interval. Boost compares an unscaled error floor against a tolerance scaled
/// by the half-width, so short intervals would otherwise recurse to max_depth.
template <unsigned N = 21, class F>
double integrate_finite(F f, double a, double b, unsigned max_depth, double tol, double* error = nullptr,
                        double* l1 = nullptr) {
  const double width = b - a;
  auto g = [&](double t) { return f(a + width * t); };
  double err = 0.0;
  double norm1 = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, N>::integrate(g, 0.0, 1.0, max_depth, tol, &err,
                                                                                 &norm1);
  if (error) *error = err * width;
  if (l1) *l1 = norm1 * width;
  return v * width;
}

}  // namespace driftlab::detail
