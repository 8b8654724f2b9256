#include "driftlab/kernels.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "driftlab/grammar.hpp"
#include "driftlab/specfun.hpp"

namespace driftlab {

namespace {

// Below this value of |z|/ℓ the Matérn profiles use their limits at 0.
constexpr double kMaternOriginRadius = 1e-8;

void require_dim(int dim) {
  if (dim < 1) throw std::invalid_argument("kernel dimension must be >= 1");
}

void require_scale(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument(fmt::format("kernel parameter {} must be positive, got {}", name, v));
  }
}

// Relative size of the s^{2μ} term in s^μ K_μ(s) near 0. For μ >= 1 the next
// term is O(s²) and negligible below the cutoff.
double origin_correction(double mu, double s) {
  if (mu >= 1.0 || s == 0.0) return 0.0;
  return std::tgamma(1.0 - mu) / (std::tgamma(mu) * mu) * std::pow(0.5 * s, 2.0 * mu);
}

// ℓ^{μ+1} s^μ K_μ(s) for s = r/ℓ, with its s -> 0 limit ℓ^{μ+1} 2^{μ-1} Γ(μ).
double matern_log_shape(double mu, double ell, double r) {
  const double s = r / ell;
  if (s < kMaternOriginRadius) {
    return (mu + 1.0) * std::log(ell) + (mu - 1.0) * std::numbers::ln2 + std::lgamma(mu) +
           std::log1p(-origin_correction(mu, s));
  }
  return (mu + 1.0) * std::log(ell) + mu * std::log(s) + bessel_k_log(BesselOrder(mu), s);
}

double matern_shape(double mu, double ell, double r) {
  const double s = r / ell;
  if (s < kMaternOriginRadius) {
    return std::pow(ell, mu + 1.0) * std::pow(2.0, mu - 1.0) * gamma_fn(mu) * (1.0 - origin_correction(mu, s));
  }
  try {
    const double value = std::pow(ell, mu + 1.0) * std::pow(s, mu) * bessel_k(BesselOrder(mu), s);
    if (std::isfinite(value) && value > 0.0) return value;
  } catch (const std::overflow_error&) {
  }
  return std::exp(matern_log_shape(mu, ell, r));
}

}  // namespace

KernelSpec KernelSpec::laplace(double tau, int dim) {
  require_scale(tau, "tau");
  require_dim(dim);
  return KernelSpec(KernelFamily::laplace, tau, 0.5, dim);
}

KernelSpec KernelSpec::gaussian(double sigma, int dim) {
  require_scale(sigma, "sigma");
  require_dim(dim);
  return KernelSpec(KernelFamily::gaussian, sigma, 0.0, dim);
}

KernelSpec KernelSpec::matern(double nu, double ell, int dim) {
  require_scale(ell, "ell");
  require_dim(dim);
  // The companion needs K_{ν+1}, so ν + 1 must stay within the Bessel order cap.
  if (!(nu >= 0.5) || !(nu + 1.0 <= BesselOrder::kMaxOrder)) {
    throw std::invalid_argument(fmt::format("matern: nu must lie in [0.5, 49], got {}", nu));
  }
  return KernelSpec(KernelFamily::matern, ell, nu, dim);
}

bool KernelSpec::has_cusp() const {
  return family_ == KernelFamily::laplace || (family_ == KernelFamily::matern && nu_ == 0.5);
}

std::string KernelSpec::to_string() const {
  switch (family_) {
    case KernelFamily::laplace:
      return fmt::format("laplace(tau={},dim={})", scale_, dim_);
    case KernelFamily::gaussian:
      return fmt::format("gaussian(sigma={},dim={})", scale_, dim_);
    case KernelFamily::matern:
      return fmt::format("matern(nu={},ell={},dim={})", nu_, scale_, dim_);
  }
  return {};
}

KernelSpec parse_kernel(std::string_view text, std::optional<int> dim) {
  const CallExpr call = parse_call(text);
  int d = 0;
  if (call.has("dim")) {
    const double raw = call.number("dim");
    if (raw != std::floor(raw) || raw < 1) {
      throw std::invalid_argument("kernel: dim must be a positive integer");
    }
    d = static_cast<int>(raw);
  } else if (dim) {
    d = *dim;
  } else {
    throw std::invalid_argument("kernel: dimension missing (dim=..)");
  }
  if (call.name == "laplace") {
    call.expect_keys({"tau", "dim"});
    return KernelSpec::laplace(call.number("tau"), d);
  }
  if (call.name == "gaussian") {
    call.expect_keys({"sigma", "dim"});
    return KernelSpec::gaussian(call.number("sigma"), d);
  }
  if (call.name == "matern") {
    call.expect_keys({"nu", "ell", "dim"});
    return KernelSpec::matern(call.number("nu"), call.number("ell"), d);
  }
  throw std::invalid_argument("kernel: unknown family '" + call.name + "'");
}

double CompanionConstants::spectral_exponent() const {
  return lambda1 > 0.0 ? c1 * c2 / (2.0 * lambda1) : c1 * c2 / (2.0 * lambda0);
}

CompanionConstants companion_constants(const KernelSpec& spec) {
  const double a = spec.scale();
  const double d = spec.dim();
  switch (spec.family()) {
    case KernelFamily::laplace:
      return {a * a, d + 1.0, 1.0, a * a};
    case KernelFamily::gaussian:
      return {a * a, 1.0, 1.0, 0.0};
    case KernelFamily::matern:
      return {a * a, d + 2.0 * spec.nu(), 1.0, a * a};
  }
  throw std::logic_error("unreachable");
}

double kernel_profile(const KernelSpec& spec, double r) {
  const double a = spec.scale();
  switch (spec.family()) {
    case KernelFamily::laplace:
      return std::exp(-r / a);
    case KernelFamily::gaussian:
      return std::exp(-r * r / (2.0 * a * a));
    case KernelFamily::matern:
      return matern_shape(spec.nu(), a, r);
  }
  throw std::logic_error("unreachable");
}

double kernel_log_profile(const KernelSpec& spec, double r) {
  const double a = spec.scale();
  switch (spec.family()) {
    case KernelFamily::laplace:
      return -r / a;
    case KernelFamily::gaussian:
      return -r * r / (2.0 * a * a);
    case KernelFamily::matern:
      return matern_log_shape(spec.nu(), a, r);
  }
  throw std::logic_error("unreachable");
}

double companion_profile(const KernelSpec& spec, double r) {
  const double a = spec.scale();
  switch (spec.family()) {
    case KernelFamily::laplace:
      return (1.0 + r / a) * std::exp(-r / a);
    case KernelFamily::gaussian:
      return std::exp(-r * r / (2.0 * a * a));
    case KernelFamily::matern:
      // |z|^{ν+1} K_{ν+1}(|z|/ℓ) carries no leading ℓ, unlike κ.
      return matern_shape(spec.nu() + 1.0, a, r) / a;
  }
  throw std::logic_error("unreachable");
}

double kernel_eval(const KernelSpec& spec, std::span<const double> z) {
  return kernel_profile(spec, norm(z));
}

double kernel_log_eval(const KernelSpec& spec, std::span<const double> z) {
  return kernel_log_profile(spec, norm(z));
}

double companion_eval(const KernelSpec& spec, std::span<const double> z) {
  return companion_profile(spec, norm(z));
}

Vec companion_grad(const KernelSpec& spec, std::span<const double> z) {
  const double factor = -kernel_eval(spec, z) / companion_constants(spec).c1;
  return scaled(z, factor);
}

double spectral_density_radial(const KernelSpec& spec, double xi_norm) {
  const CompanionConstants c = companion_constants(spec);
  const double xi2 = xi_norm * xi_norm;
  if (c.lambda1 == 0.0) {
    return std::exp(-c.c1 * c.c2 / (2.0 * c.lambda0) * xi2);
  }
  return std::pow(1.0 + c.lambda1 / c.lambda0 * xi2, -c.spectral_exponent());
}

double spectral_density(const KernelSpec& spec, std::span<const double> xi) {
  return spectral_density_radial(spec, norm(xi));
}

}  // namespace driftlab
