#pragma once

#include <cstdint>
#include <vector>

#include "driftlab/kernels.hpp"
#include "driftlab/measures.hpp"
#include "driftlab/report.hpp"
#include "driftlab/vec.hpp"

namespace driftlab {

/// q_n = (1 - eps) p + eps δ_{z_n}, with |z_n| strictly increasing.
struct SatelliteSchedule {
  DiscreteMeasure base = DiscreteMeasure::zero(1);
  double eps = 0.3;
  std::vector<Vec> satellite_positions;
  std::vector<Vec> compact_grid;

  /// Throws std::invalid_argument describing the first violated invariant.
  void validate() const;
};

/// Lattice [-5, 5]^dim with spacing 0.1.
std::vector<Vec> default_compact_grid(int dim);

/// a_q(x) - a_p(x) for q = (1 - eps) p + eps δ_z, through the closed form
/// eps κ(x-z) / ((1-eps) u_p(x) + eps κ(x-z)) · (z - a_p(x)), evaluated in logs.
Vec satellite_delta_closed_form(const KernelSpec& spec, const DiscreteMeasure& p, double eps,
                                std::span<const double> z, std::span<const double> x);

/// Columns n, z_norm, sup_V_grid, tail_mass, analytic_bound, inside_compact.
/// Rows whose satellite lies inside the grid radius are flagged and left out
/// of the decay assertions.
ExperimentReport satellite_experiment(const KernelSpec& spec, const SatelliteSchedule& schedule,
                                      int threads = 1);

struct TiltSchedule {
  double m = 3.0;
  int dim = 1;
  std::vector<int> n_values;
  std::vector<Vec> eval_grid;
  /// Exponential moment scale; must stay below the kernel's tail rate.
  double lambda = 0.5;
  /// Random probe points for the moment suprema.
  std::uint64_t seed = 20240601;
  int random_probes = 16;
  /// Cells of the graded grid used to discretize p and q_n (d = 2 adds angles).
  int cells = 0;
  int angles = 64;

  void validate() const;
};

/// d = 1: [-10, 10] at spacing 0.1; d = 2: [-10, 10]^2 at spacing 0.5.
std::vector<Vec> default_tilt_grid(int dim);

/// Largest admissible λ (exclusive): 1/ℓ for Laplace and Matérn, +∞ for Gaussian.
double exp_moment_limit(const KernelSpec& spec);

/// ∫ |y-x|^j e^{λ|y-x|} π_x(dy) at every probe x.
std::vector<double> exp_moment_values(const KernelSpec& spec, const PowerLawDensity& base,
                                      double lambda, int j, const std::vector<Vec>& probe_points);

/// max over probes of ∫ |y-x|^j e^{λ|y-x|} π_x(dy), π_x(dy) = κ(x-y) p(dy) / u_p(x).
double exp_moment(const KernelSpec& spec, const PowerLawDensity& base, double lambda, int j,
                  const std::vector<Vec>& probe_points);

/// Probe set {0, ±n, ±2n, ±10n} (along the first axis) plus `count` uniform
/// points in the cube of half-width 10n.
std::vector<Vec> moment_probes(int dim, int n, int count, std::uint64_t seed);

/// Columns n, alpha_n, alpha_over_n, Z_n, sup_V_grid, tail_mass, analytic_bound.
ExperimentReport tilt_experiment(const KernelSpec& spec, const TiltSchedule& schedule, int threads = 1);

}  // namespace driftlab
