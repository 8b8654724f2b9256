#include "driftlab/field.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "driftlab/parallel.hpp"
#include "driftlab/simd.hpp"

namespace driftlab {

namespace {

void check_inputs(const KernelSpec& spec, const DiscreteMeasure& r, std::span<const double> x) {
  if (r.dim() != spec.dim() || static_cast<int>(x.size()) != spec.dim()) {
    throw std::invalid_argument(fmt::format("dimension mismatch: kernel {}, measure {}, point {}",
                                            spec.dim(), r.dim(), x.size()));
  }
  if (r.empty()) throw std::invalid_argument("field evaluation on an empty measure");
}

// Distances from x to every atom; Gaussian kernels get squared distances.
std::span<const double> atom_distances(const DiscreteMeasure& r, std::span<const double> x,
                                       bool squared) {
  thread_local std::vector<double> buffer;
  buffer.resize(r.size());
  simd::distances(x, r.soa(), r.size(), buffer, squared);
  return buffer;
}

// log κ(x - y_i) for every atom, written into `out`.
void log_kernels(const KernelSpec& spec, const DiscreteMeasure& r, std::span<const double> x,
                 std::vector<double>& out) {
  const bool gaussian = spec.family() == KernelFamily::gaussian;
  const auto dist = atom_distances(r, x, gaussian);
  out.resize(r.size());
  if (gaussian) {
    const double inv = 1.0 / (2.0 * spec.scale() * spec.scale());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = -dist[i] * inv;
  } else if (spec.family() == KernelFamily::laplace) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = -dist[i] / spec.scale();
  } else {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = kernel_log_profile(spec, dist[i]);
  }
}

}  // namespace

LocalAverage local_average(const KernelSpec& spec, const DiscreteMeasure& r, std::span<const double> x) {
  check_inputs(spec, r, x);
  thread_local std::vector<double> logw;
  log_kernels(spec, r, x, logw);
  const auto w = r.weights();
  double shift = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < logw.size(); ++i) {
    logw[i] = w[i] > 0.0 ? logw[i] + std::log(w[i]) : -std::numeric_limits<double>::infinity();
    shift = std::max(shift, logw[i]);
  }
  if (!std::isfinite(shift)) throw std::logic_error("local_average: every atom weight vanished");
  const int dim = r.dim();
  double sum = 0.0;
  Vec moment(dim, 0.0);
  for (std::size_t i = 0; i < logw.size(); ++i) {
    const double omega = std::exp(logw[i] - shift);
    sum += omega;
    for (int k = 0; k < dim; ++k) moment[k] += omega * r.coordinate(k)[i];
  }
  if (!(sum >= 1.0)) throw std::logic_error("local_average: normalized weights underflowed");
  for (double& m : moment) m /= sum;
  return {shift + std::log(sum), std::move(moment)};
}

KernelMass kernel_mass(const KernelSpec& spec, const DiscreteMeasure& r, std::span<const double> x) {
  const LocalAverage local = local_average(spec, r, x);
  return {std::exp(local.log_mass), local.log_mass};
}

Vec barycenter(const KernelSpec& spec, const DiscreteMeasure& r, std::span<const double> x) {
  return local_average(spec, r, x).barycenter;
}

FieldSample drift(const KernelSpec& spec, const DiscreteMeasure& p, const DiscreteMeasure& q,
                  std::span<const double> x) {
  if (!p.is_probability() || !q.is_probability()) {
    throw std::invalid_argument("drift: both measures must be probability measures");
  }
  LocalAverage lp = local_average(spec, p, x);
  LocalAverage lq = local_average(spec, q, x);
  FieldSample s;
  s.x.assign(x.begin(), x.end());
  s.log_u_p = lp.log_mass;
  s.log_u_q = lq.log_mass;
  s.u_p = std::exp(lp.log_mass);
  s.u_q = std::exp(lq.log_mass);
  s.V = subtract(lp.barycenter, lq.barycenter);
  s.a_p = std::move(lp.barycenter);
  s.a_q = std::move(lq.barycenter);
  return s;
}

CompanionPotential companion_potential(const KernelSpec& spec, const DiscreteMeasure& r,
                                       std::span<const double> x) {
  check_inputs(spec, r, x);
  const bool gaussian = spec.family() == KernelFamily::gaussian;
  const auto dist = atom_distances(r, x, false);
  const double c1 = companion_constants(spec).c1;
  const int dim = r.dim();
  CompanionPotential out{0.0, Vec(dim, 0.0)};
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double w = r.weight(i);
    const double k = kernel_profile(spec, dist[i]);
    out.value += w * (gaussian ? k : companion_profile(spec, dist[i]));
    for (int c = 0; c < dim; ++c) {
      out.gradient[c] -= w * (x[c] - r.coordinate(c)[i]) * k / c1;
    }
  }
  return out;
}

GridReport field_grid_report(const KernelSpec& spec, const DiscreteMeasure& p,
                             const DiscreteMeasure& q, const std::vector<Vec>& grid, int threads) {
  if (grid.empty()) throw std::invalid_argument("field_grid_report: empty grid");
  GridReport report;
  report.samples.resize(grid.size());
  parallel_for(grid.size(), threads,
               [&](std::size_t i) { report.samples[i] = drift(spec, p, q, grid[i]); });
  report.sup_norm = -1.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = norm(report.samples[i].V);
    if (v > report.sup_norm) {
      report.sup_norm = v;
      report.argmax = i;
    }
  }
  report.argmax_point = grid[report.argmax];
  return report;
}

void write_grid_csv(std::ostream& out, const GridReport& report) {
  if (report.samples.empty()) return;
  const std::size_t dim = report.samples.front().x.size();
  std::string header;
  auto columns = [&](const char* prefix) {
    for (std::size_t k = 1; k <= dim; ++k) header += fmt::format("{}_{},", prefix, k);
  };
  columns("x");
  header += "u_p,u_q,";
  columns("a_p");
  columns("a_q");
  columns("V");
  header += "norm_V\n";
  out << header;
  for (const FieldSample& s : report.samples) {
    std::string line;
    auto put = [&line](double v) { line += fmt::format("{:.17g},", v); };
    for (double v : s.x) put(v);
    put(s.u_p);
    put(s.u_q);
    for (double v : s.a_p) put(v);
    for (double v : s.a_q) put(v);
    for (double v : s.V) put(v);
    line += fmt::format("{:.17g}\n", norm(s.V));
    out << line;
  }
}

std::vector<Vec> lattice(int dim, double lo, double hi, int points_per_axis) {
  if (dim < 1 || points_per_axis < 1) throw std::invalid_argument("lattice: bad shape");
  std::size_t total = 1;
  for (int k = 0; k < dim; ++k) total *= static_cast<std::size_t>(points_per_axis);
  std::vector<Vec> points;
  points.reserve(total);
  const double step = points_per_axis > 1 ? (hi - lo) / (points_per_axis - 1) : 0.0;
  for (std::size_t idx = 0; idx < total; ++idx) {
    Vec x(dim);
    std::size_t rem = idx;
    for (int k = dim - 1; k >= 0; --k) {
      x[k] = lo + step * static_cast<double>(rem % points_per_axis);
      rem /= points_per_axis;
    }
    points.push_back(std::move(x));
  }
  return points;
}

}  // namespace driftlab
