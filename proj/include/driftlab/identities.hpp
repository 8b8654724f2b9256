#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "driftlab/kernels.hpp"
#include "driftlab/measures.hpp"
#include "driftlab/vec.hpp"

namespace driftlab {

/// Outcome of one verifier. `criterion` records how `pass` was decided.
struct VerifierReport {
  std::string check_name;
  std::size_t points_tested = 0;
  double max_abs_error = 0.0;
  double max_rel_error = 0.0;
  Vec worst_point;
  bool pass = false;
  double tolerance = 0.0;
  std::string criterion = "relative";
  bool skipped = false;
  std::string note;
};

nlohmann::json to_json(const VerifierReport& report);

namespace tolerance {
inline constexpr double first_order = 1e-6;
inline constexpr double second_order = 1e-4;
inline constexpr double exact = 1e-12;
}  // namespace tolerance

/// Default finite-difference steps, proportional to the kernel length scale.
double default_gradient_step(const KernelSpec& spec);
double default_laplacian_step(const KernelSpec& spec);

/// Central-difference gradient and 5-point (per axis) Laplacian.
Vec fd_gradient(const std::function<double(std::span<const double>)>& f, std::span<const double> x,
                double h);
double fd_laplacian(const std::function<double(std::span<const double>)>& f,
                    std::span<const double> x, double h);

/// Distance from x to the nearest atom.
double distance_to_atoms(const DiscreteMeasure& r, std::span<const double> x);

/// c1 ∇Ψ_r(x) = (a_r(x) - x) u_r(x), with ∇Ψ taken by central differences of
/// the Ψ value. The relative error is measured against
/// max(|rhs|, 1e-4 u_r L / c1), L the kernel length scale, so isolated
/// critical points of Ψ do not dominate.
VerifierReport check_gradient_identity(const KernelSpec& spec, const DiscreteMeasure& r,
                                       const std::vector<Vec>& points, double h,
                                       double tol = tolerance::first_order);

/// (λ0 - λ1 Δ)Ψ_r = c2 u_r with a finite-difference Laplacian; error relative
/// to c2 u_r. With λ1 = 0 the identity is exact and the tolerance is 1e-12.
/// Kernels with a radial cusp (has_cusp()) skip points within 1e-2 L of an atom.
VerifierReport check_elliptic_identity(const KernelSpec& spec, const DiscreteMeasure& r,
                                       const std::vector<Vec>& points, double h,
                                       double tol = tolerance::second_order);

/// |∇Ψ_r| <= Ψ_r / τ pointwise (Laplace only; std::invalid_argument otherwise).
VerifierReport check_gradient_bound(const KernelSpec& spec, const DiscreteMeasure& r,
                                    const std::vector<Vec>& points);

struct SpectralQuadrature {
  /// Half-width of the integration window; 0 picks it from the kernel tail.
  double half_width = 0.0;
  double tol = tolerance::first_order;
};

/// (a) the spectral ODE ∇κ̂ = -c1 c2 ξ κ̂ / (λ0 + λ1|ξ|²) by central
/// differences for |ξ| >= 0.1; (b) in d = 1, a direct cosine transform of κ
/// against the closed-form normalized density.
VerifierReport check_spectral(const KernelSpec& spec, const std::vector<Vec>& xi_values,
                              const SpectralQuadrature& quadrature = {});

/// 2 ∫_0^L κ(x) cos(ξ x) dx for a d = 1 kernel.
double cosine_transform(const KernelSpec& spec, double xi, double half_width);
/// Window where the neglected kernel tail is below 1e-15 of the total.
double cosine_transform_window(const KernelSpec& spec);

/// Antisymmetry V_{p,q} = -V_{q,p}; V = 0 when p and q have the same atoms;
/// otherwise a grid search over the supports must find |V| > 1e-10.
VerifierReport check_field_axioms(const KernelSpec& spec, const DiscreteMeasure& p,
                                  const DiscreteMeasure& q, const std::vector<Vec>& points);

}  // namespace driftlab
