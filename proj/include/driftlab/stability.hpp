#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "driftlab/kernels.hpp"
#include "driftlab/measures.hpp"
#include "driftlab/vec.hpp"

namespace driftlab {

/// Z_p(μ) = Σ_j w_j^μ u_p(x_j). Linear in μ; zero for the zero measure.
double overlap_scalar(const KernelSpec& spec, const DiscreteMeasure& p, const DiscreteMeasure& mu);

enum class AnchorKind { kernel_section, companion_section, overlap };

/// Throws std::invalid_argument for an unknown name.
AnchorKind parse_anchor_kind(std::string_view name);
const char* anchor_kind_name(AnchorKind kind);

/// A positive observable F with its value F(p) at the target.
///   kernel_section:    F(μ) = u_μ(x*)
///   companion_section: F(μ) = Ψ_μ(x*)
///   overlap:           F(μ) = Z_p(μ)
struct AnchorObservable {
  AnchorKind kind;
  Vec point;
  double reference_value;

  static AnchorObservable make(AnchorKind kind, const KernelSpec& spec, const DiscreteMeasure& p,
                               Vec point = {});

  double evaluate(const KernelSpec& spec, const DiscreteMeasure& p, const DiscreteMeasure& mu) const;
};

struct DefectEstimate {
  /// Median of the per-anchor ratios u_q / u_p.
  double c_hat;
  /// max - min of the ratios.
  double dispersion;
  std::vector<Vec> anchor_points;
  std::vector<double> ratios;
};

/// Atoms of p plus the origin (the origin is skipped when it is already an atom).
std::vector<Vec> default_anchors(const DiscreteMeasure& p);

/// Needs at least 3 anchors and a probability p. A sub-probability q is
/// rejected unless `allow_sub_probability` is set.
DefectEstimate defect_ray_estimate(const KernelSpec& spec, const DiscreteMeasure& p,
                                   const DiscreteMeasure& q, const std::vector<Vec>& anchor_points,
                                   bool allow_sub_probability = false);

struct AnchorVerdict {
  bool pass;
  /// min of F(q_n) over the trailing window, the stand-in for liminf.
  double proxy;
  double reference_value;
  double tol;
  std::size_t window;
  std::string observable;
  std::vector<double> trajectory;
};

/// ceil(25%) of the sequence length, at least 1.
std::size_t default_window(std::size_t length);

/// PASS iff min over the last `window` values of F(q_n) >= F(p) - tol.
/// window = 0 selects default_window().
AnchorVerdict anchor_check(const KernelSpec& spec, const DiscreteMeasure& p,
                           const std::vector<DiscreteMeasure>& q_sequence,
                           const AnchorObservable& observable, double tol, std::size_t window = 0);

struct SimulationOptions {
  int steps = 10;
  double step_size = 0.5;
  /// Points where u_q is recorded each step; empty selects default_anchors(p).
  std::vector<Vec> anchors;
  /// Points where |V| is maximized each step; empty reuses the anchors.
  std::vector<Vec> diagnostic_grid;
  int threads = 1;
};

struct StepDiagnostics {
  int step;
  double overlap;
  std::vector<double> anchor_values;
  double field_sup;
};

struct Simulation {
  /// positions[k] holds every particle after k steps (k = 0 is the input).
  std::vector<std::vector<Vec>> positions;
  std::vector<StepDiagnostics> diagnostics;
  std::vector<Vec> anchors;
};

/// Equal-weight empirical measure of the particles.
DiscreteMeasure empirical_measure(const std::vector<Vec>& particles);

/// x_j <- x_j + step_size · V_{p, q}(x_j) with q the empirical measure of the
/// current particles; every particle moves from the same previous state.
/// Diagnostics are taken before the first step and after every step.
/// Throws std::runtime_error when a particle position becomes non-finite.
Simulation drift_simulate(const KernelSpec& spec, const DiscreteMeasure& p,
                          const std::vector<Vec>& particles0, const SimulationOptions& options);

/// Columns step, particle, x_1..x_d.
void write_trajectory_csv(std::ostream& out, const Simulation& sim);
/// Columns step, overlap, anchor_1..anchor_k, field_sup.
void write_diagnostics_csv(std::ostream& out, const Simulation& sim);

}  // namespace driftlab
