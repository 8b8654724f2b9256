#include "driftlab/stability.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "driftlab/field.hpp"
#include "driftlab/parallel.hpp"

namespace driftlab {

double overlap_scalar(const KernelSpec& spec, const DiscreteMeasure& p, const DiscreteMeasure& mu) {
  if (p.dim() != mu.dim() || p.dim() != spec.dim()) {
    throw std::invalid_argument("overlap_scalar: dimension mismatch");
  }
  double total = 0.0;
  for (std::size_t j = 0; j < mu.size(); ++j) {
    if (mu.weight(j) == 0.0) continue;
    total += mu.weight(j) * kernel_mass(spec, p, mu.atom(j)).value;
  }
  return total;
}

AnchorKind parse_anchor_kind(std::string_view name) {
  if (name == "kernel_section") return AnchorKind::kernel_section;
  if (name == "companion_section") return AnchorKind::companion_section;
  if (name == "overlap") return AnchorKind::overlap;
  throw std::invalid_argument(fmt::format("unknown observable kind '{}'", name));
}

const char* anchor_kind_name(AnchorKind kind) {
  switch (kind) {
    case AnchorKind::kernel_section:
      return "kernel_section";
    case AnchorKind::companion_section:
      return "companion_section";
    case AnchorKind::overlap:
      return "overlap";
  }
  return "unknown";
}

AnchorObservable AnchorObservable::make(AnchorKind kind, const KernelSpec& spec, const DiscreteMeasure& p,
                                        Vec point) {
  if (kind != AnchorKind::overlap && static_cast<int>(point.size()) != spec.dim()) {
    throw std::invalid_argument("anchor observable: section point has the wrong dimension");
  }
  AnchorObservable obs{kind, std::move(point), 0.0};
  obs.reference_value = obs.evaluate(spec, p, p);
  if (!(obs.reference_value > 0.0)) {
    throw std::invalid_argument("anchor observable: value at the target must be positive");
  }
  return obs;
}

double AnchorObservable::evaluate(const KernelSpec& spec, const DiscreteMeasure& p,
                                  const DiscreteMeasure& mu) const {
  switch (kind) {
    case AnchorKind::overlap:
      return overlap_scalar(spec, p, mu);
    case AnchorKind::kernel_section:
      return mu.empty() ? 0.0 : kernel_mass(spec, mu, point).value;
    case AnchorKind::companion_section:
      return mu.empty() ? 0.0 : companion_potential(spec, mu, point).value;
  }
  throw std::invalid_argument("unknown observable kind");
}

std::vector<Vec> default_anchors(const DiscreteMeasure& p) {
  std::vector<Vec> anchors;
  const Vec origin(p.dim(), 0.0);
  bool has_origin = false;
  for (std::size_t i = 0; i < p.size(); ++i) {
    anchors.push_back(p.atom(i));
    has_origin |= anchors.back() == origin;
  }
  if (!has_origin) anchors.push_back(origin);
  return anchors;
}

DefectEstimate defect_ray_estimate(const KernelSpec& spec, const DiscreteMeasure& p,
                                   const DiscreteMeasure& q, const std::vector<Vec>& anchor_points,
                                   bool allow_sub_probability) {
  if (anchor_points.size() < 3) throw std::invalid_argument("defect_ray_estimate: need at least 3 anchors");
  if (!p.is_probability()) throw std::invalid_argument("defect_ray_estimate: p must be a probability");
  if (!q.is_probability() && !allow_sub_probability) {
    throw std::invalid_argument("defect_ray_estimate: q must be a probability (sub-probability not allowed)");
  }
  DefectEstimate est{0.0, 0.0, anchor_points, {}};
  for (const Vec& x : anchor_points) {
    const double log_p = kernel_mass(spec, p, x).log_value;
    const double ratio = q.empty() ? 0.0 : std::exp(kernel_mass(spec, q, x).log_value - log_p);
    est.ratios.push_back(ratio);
  }
  std::vector<double> sorted = est.ratios;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t k = sorted.size();
  est.c_hat = k % 2 == 1 ? sorted[k / 2] : 0.5 * (sorted[k / 2 - 1] + sorted[k / 2]);
  est.dispersion = sorted.back() - sorted.front();
  return est;
}

std::size_t default_window(std::size_t length) { return std::max<std::size_t>(1, (length + 3) / 4); }

AnchorVerdict anchor_check(const KernelSpec& spec, const DiscreteMeasure& p,
                           const std::vector<DiscreteMeasure>& q_sequence,
                           const AnchorObservable& observable, double tol, std::size_t window) {
  if (q_sequence.empty()) throw std::invalid_argument("anchor_check: empty sequence");
  if (window == 0) window = default_window(q_sequence.size());
  if (window > q_sequence.size()) throw std::invalid_argument("anchor_check: window longer than the sequence");
  AnchorVerdict v{false, 0.0, observable.reference_value, tol, window, anchor_kind_name(observable.kind), {}};
  for (const DiscreteMeasure& q : q_sequence) v.trajectory.push_back(observable.evaluate(spec, p, q));
  v.proxy = *std::min_element(v.trajectory.end() - static_cast<std::ptrdiff_t>(window), v.trajectory.end());
  v.pass = v.proxy >= v.reference_value - tol;
  return v;
}

DiscreteMeasure empirical_measure(const std::vector<Vec>& particles) {
  if (particles.empty()) throw std::invalid_argument("empirical_measure: no particles");
  return DiscreteMeasure::make(particles, std::vector<double>(particles.size(), 1.0 / particles.size()));
}

namespace {

StepDiagnostics diagnose(const KernelSpec& spec, const DiscreteMeasure& p, const DiscreteMeasure& q,
                         int step, const std::vector<Vec>& anchors, const std::vector<Vec>& grid,
                         int threads) {
  StepDiagnostics d{step, overlap_scalar(spec, p, q), {}, 0.0};
  for (const Vec& x : anchors) d.anchor_values.push_back(kernel_mass(spec, q, x).value);
  d.field_sup = field_grid_report(spec, p, q, grid, threads).sup_norm;
  return d;
}

}  // namespace

Simulation drift_simulate(const KernelSpec& spec, const DiscreteMeasure& p,
                          const std::vector<Vec>& particles0, const SimulationOptions& options) {
  if (particles0.empty()) throw std::invalid_argument("drift_simulate: need at least one particle");
  if (options.steps < 0) throw std::invalid_argument("drift_simulate: steps must be non-negative");
  if (!(options.step_size > 0.0 && options.step_size <= 1.0)) {
    throw std::invalid_argument("drift_simulate: step_size must lie in (0, 1]");
  }
  if (!p.is_probability()) throw std::invalid_argument("drift_simulate: target must be a probability");

  Simulation sim;
  sim.anchors = options.anchors.empty() ? default_anchors(p) : options.anchors;
  const std::vector<Vec>& grid = options.diagnostic_grid.empty() ? sim.anchors : options.diagnostic_grid;

  std::vector<Vec> current = particles0;
  DiscreteMeasure q = empirical_measure(current);
  sim.positions.push_back(current);
  sim.diagnostics.push_back(diagnose(spec, p, q, 0, sim.anchors, grid, options.threads));

  for (int step = 1; step <= options.steps; ++step) {
    std::vector<Vec> next(current.size());
    parallel_for(current.size(), options.threads, [&](std::size_t j) {
      const FieldSample s = drift(spec, p, q, current[j]);
      next[j] = add(current[j], scaled(s.V, options.step_size));
    });
    for (std::size_t j = 0; j < next.size(); ++j) {
      for (double v : next[j]) {
        if (!std::isfinite(v)) {
          throw std::runtime_error(fmt::format("drift_simulate: particle {} left the reals at step {}", j, step));
        }
      }
    }
    current = std::move(next);
    q = empirical_measure(current);
    sim.positions.push_back(current);
    sim.diagnostics.push_back(diagnose(spec, p, q, step, sim.anchors, grid, options.threads));
  }
  return sim;
}

void write_trajectory_csv(std::ostream& out, const Simulation& sim) {
  if (sim.positions.empty() || sim.positions.front().empty()) return;
  const std::size_t dim = sim.positions.front().front().size();
  std::string header = "step,particle";
  for (std::size_t k = 1; k <= dim; ++k) header += fmt::format(",x_{}", k);
  out << header << '\n';
  for (std::size_t s = 0; s < sim.positions.size(); ++s) {
    for (std::size_t j = 0; j < sim.positions[s].size(); ++j) {
      std::string line = fmt::format("{},{}", s, j);
      for (double v : sim.positions[s][j]) line += fmt::format(",{:.17g}", v);
      out << line << '\n';
    }
  }
}

void write_diagnostics_csv(std::ostream& out, const Simulation& sim) {
  std::string header = "step,overlap";
  for (std::size_t k = 1; k <= sim.anchors.size(); ++k) header += fmt::format(",anchor_{}", k);
  out << header << ",field_sup\n";
  for (const StepDiagnostics& d : sim.diagnostics) {
    std::string line = fmt::format("{},{:.17g}", d.step, d.overlap);
    for (double v : d.anchor_values) line += fmt::format(",{:.17g}", v);
    out << line << fmt::format(",{:.17g}\n", d.field_sup);
  }
}

}  // namespace driftlab
