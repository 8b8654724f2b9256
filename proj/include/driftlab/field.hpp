#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "driftlab/kernels.hpp"
#include "driftlab/measures.hpp"
#include "driftlab/vec.hpp"

namespace driftlab {

/// u_r(x) = Σ w_i κ(x - y_i). `value` may underflow to zero far from the
/// atoms; `log_value` stays finite.
struct KernelMass {
  double value;
  double log_value;
};

/// Everything the drift V_{p,q}(x) = a_p(x) - a_q(x) is built from.
struct FieldSample {
  Vec x;
  double u_p;
  double u_q;
  Vec a_p;
  Vec a_q;
  Vec V;
  double log_u_p;
  double log_u_q;
};

/// Ψ_r(x) = Σ w_i η(x - y_i) and its gradient Σ w_i ∇η(x - y_i).
struct CompanionPotential {
  double value;
  Vec gradient;
};

/// Normalized local average seen from x: log u_r(x) and a_r(x) together.
struct LocalAverage {
  double log_mass;
  Vec barycenter;
};

// All operations require spec.dim() == r.dim() == x.size() and a non-empty
// measure (std::invalid_argument otherwise).

KernelMass kernel_mass(const KernelSpec& spec, const DiscreteMeasure& r, std::span<const double> x);

/// a_r(x) = Σ ω_i(x) y_i with ω_i = w_i κ(x - y_i) / u_r(x). The weights are
/// formed from log-kernels shifted by their maximum, so the result stays in
/// the convex hull of the atoms even where u_r underflows.
Vec barycenter(const KernelSpec& spec, const DiscreteMeasure& r, std::span<const double> x);

LocalAverage local_average(const KernelSpec& spec, const DiscreteMeasure& r, std::span<const double> x);

/// Requires p and q to be probability measures.
FieldSample drift(const KernelSpec& spec, const DiscreteMeasure& p, const DiscreteMeasure& q,
                  std::span<const double> x);

CompanionPotential companion_potential(const KernelSpec& spec, const DiscreteMeasure& r,
                                       std::span<const double> x);

struct GridReport {
  std::vector<FieldSample> samples;
  double sup_norm = 0.0;
  std::size_t argmax = 0;
  Vec argmax_point;
};

/// Drift at every grid point (row-major order preserved), plus max |V| and
/// the first point attaining it. Points may be evaluated on `threads` threads;
/// the report does not depend on the schedule.
GridReport field_grid_report(const KernelSpec& spec, const DiscreteMeasure& p,
                             const DiscreteMeasure& q, const std::vector<Vec>& grid, int threads = 1);

/// Columns x_1..x_d, u_p, u_q, a_p_1..a_p_d, a_q_1..a_q_d, V_1..V_d, norm_V.
void write_grid_csv(std::ostream& out, const GridReport& report);

/// Lattice with `points_per_axis` points per axis over [lo, hi]^dim, row-major.
std::vector<Vec> lattice(int dim, double lo, double hi, int points_per_axis);

}  // namespace driftlab
