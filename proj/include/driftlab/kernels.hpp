#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "driftlab/vec.hpp"

namespace driftlab {

enum class KernelFamily { laplace, gaussian, matern };

/// A member of the companion-elliptic kernel family together with the ambient
/// dimension. Immutable; construct through the named factories.
///
///   laplace(τ):    κ(z) = exp(-|z|/τ)
///   gaussian(σ):   κ(z) = exp(-|z|²/(2σ²))
///   matern(ν, ℓ):  κ(z) = ℓ |z|^ν K_ν(|z|/ℓ), continuously extended at 0
///
/// The Matérn representative is fixed exactly as written above. Barycenters,
/// drifts and normalized spectral densities do not depend on the overall
/// positive scale of κ.
class KernelSpec {
 public:
  static KernelSpec laplace(double tau, int dim);
  static KernelSpec gaussian(double sigma, int dim);
  static KernelSpec matern(double nu, double ell, int dim);

  KernelFamily family() const { return family_; }
  int dim() const { return dim_; }
  /// τ, σ or ℓ depending on the family.
  double scale() const { return scale_; }
  /// Matérn smoothness; 1/2 for Laplace, unused for Gaussian.
  double nu() const { return nu_; }

  /// True when κ has a radial cusp at the origin (Laplace and Matérn ν = 1/2).
  bool has_cusp() const;

  std::string to_string() const;

  friend bool operator==(const KernelSpec&, const KernelSpec&) = default;

 private:
  KernelSpec(KernelFamily family, double scale, double nu, int dim)
      : family_(family), scale_(scale), nu_(nu), dim_(dim) {}

  KernelFamily family_;
  double scale_;
  double nu_;
  int dim_;
};

/// Parses `laplace(tau=..)`, `gaussian(sigma=..)` or `matern(nu=..,ell=..)`.
/// The dimension comes from a `dim=..` argument inside the call or from
/// `dim`; one of the two is required. Throws std::invalid_argument.
KernelSpec parse_kernel(std::string_view text, std::optional<int> dim = std::nullopt);

/// Constants coupling κ to its companion η:
///   ∇η(z) = -z κ(z) / c1,   (λ0 - λ1 Δ) η = c2 κ.
struct CompanionConstants {
  double c1;
  double c2;
  double lambda0;
  double lambda1;

  /// c1 c2 / (2 λ1) when λ1 > 0 (the Bessel-potential exponent ν + d/2),
  /// otherwise c1 c2 / (2 λ0) (the Gaussian spectral variance σ²/2).
  double spectral_exponent() const;
};

CompanionConstants companion_constants(const KernelSpec& spec);

// Radial profiles: the same functions as below evaluated at |z| = r >= 0.
double kernel_profile(const KernelSpec& spec, double r);
double kernel_log_profile(const KernelSpec& spec, double r);
double companion_profile(const KernelSpec& spec, double r);

double kernel_eval(const KernelSpec& spec, std::span<const double> z);
double kernel_log_eval(const KernelSpec& spec, std::span<const double> z);
double companion_eval(const KernelSpec& spec, std::span<const double> z);
/// Closed form -z κ(z) / c1.
Vec companion_grad(const KernelSpec& spec, std::span<const double> z);

/// Normalized spectral density κ̂(ξ)/κ̂(0).
double spectral_density(const KernelSpec& spec, std::span<const double> xi);
double spectral_density_radial(const KernelSpec& spec, double xi_norm);

}  // namespace driftlab
