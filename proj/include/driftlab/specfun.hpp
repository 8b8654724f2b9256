#pragma once

// Special functions used by the Matérn family and its companion.

namespace driftlab {

/// Order of the modified Bessel function K_ν. Negative orders are folded with
/// K_{-ν} = K_ν, so the stored order is always in [0, kMaxOrder].
class BesselOrder {
 public:
  static constexpr double kMaxOrder = 50.0;

  explicit BesselOrder(double nu);

  double value() const { return nu_; }

 private:
  double nu_;
};

/// K_ν(s) for s > 0. Throws std::domain_error for s <= 0 or non-finite s and
/// std::overflow_error when the value is not representable (use bessel_k_log).
double bessel_k(BesselOrder order, double s);

/// log K_ν(s) for s > 0, finite for every positive finite s. Throws
/// std::domain_error for s <= 0.
double bessel_k_log(BesselOrder order, double s);

/// Γ(x) for x > 0.
double gamma_fn(double x);

}  // namespace driftlab
