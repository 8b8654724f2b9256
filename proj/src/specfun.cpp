#include "driftlab/specfun.hpp"

#include <boost/math/special_functions/bessel.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace driftlab {

namespace {

// Above this argument K_ν is evaluated from the Hankel expansion; below it the
// value never underflows for ν <= 50.
constexpr double kHankelThreshold = 600.0;

void require_positive_argument(double s, const char* what) {
  if (!(s > 0.0) || !std::isfinite(s)) {
    throw std::domain_error(std::string(what) + ": argument must be positive and finite, got " +
                            std::to_string(s));
  }
}

// log of Σ_k a_k(ν)/s^k, the Hankel series for e^s sqrt(2s/π) K_ν(s). Summed up
// to the smallest term.
double hankel_log_series(double nu, double s) {
  const double mu = 4.0 * nu * nu;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 400; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = term * (mu - odd * odd) / (8.0 * k * s);
    if (std::abs(next) >= std::abs(term) && k > nu + 1.0) break;
    term = next;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return std::log(sum);
}

}  // namespace

BesselOrder::BesselOrder(double nu) : nu_(std::abs(nu)) {
  if (!std::isfinite(nu) || nu_ > kMaxOrder) {
    throw std::domain_error("BesselOrder: order must be finite with |nu| <= 50, got " +
                            std::to_string(nu));
  }
}

double bessel_k(BesselOrder order, double s) {
  require_positive_argument(s, "bessel_k");
  const double value = boost::math::cyl_bessel_k(order.value(), s);
  if (!std::isfinite(value)) {
    throw std::overflow_error("bessel_k: result not representable; use bessel_k_log");
  }
  return value;
}

double bessel_k_log(BesselOrder order, double s) {
  require_positive_argument(s, "bessel_k_log");
  const double nu = order.value();
  if (s >= kHankelThreshold) {
    return 0.5 * std::log(std::numbers::pi / (2.0 * s)) - s + hankel_log_series(nu, s);
  }
  try {
    const double value = boost::math::cyl_bessel_k(nu, s);
    if (std::isfinite(value) && value >= std::numeric_limits<double>::min()) {
      return std::log(value);
    }
  } catch (const std::overflow_error&) {
  }
  // Overflow only happens for s so small that K_ν(s) = Γ(ν)2^{ν-1}s^{-ν}(1 + O(s²)).
  return std::lgamma(nu) + (nu - 1.0) * std::numbers::ln2 - nu * std::log(s);
}

double gamma_fn(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw std::domain_error("gamma_fn: argument must be positive and finite, got " +
                            std::to_string(x));
  }
  return std::tgamma(x);
}

}  // namespace driftlab
