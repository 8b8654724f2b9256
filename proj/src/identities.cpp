#include "driftlab/identities.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "driftlab/field.hpp"
#include "quadrature.hpp"

namespace driftlab {

namespace {

void require_points(const std::vector<Vec>& points, int dim) {
  if (points.empty()) throw std::invalid_argument("verifier: no test points");
  for (const Vec& x : points) {
    if (static_cast<int>(x.size()) != dim) throw std::invalid_argument("verifier: point dimension mismatch");
  }
}

void require_step(double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("verifier: step must be positive");
}

// Tracks the worst relative error and the absolute error at the same time.
struct Worst {
  double abs = 0.0;
  double rel = 0.0;
  Vec point;

  void update(double abs_err, double rel_err, const Vec& x) {
    abs = std::max(abs, abs_err);
    if (rel_err > rel || point.empty()) {
      rel = rel_err;
      point = x;
    }
  }
};

}  // namespace

nlohmann::json to_json(const VerifierReport& report) {
  nlohmann::json j;
  j["check"] = report.check_name;
  j["tolerance"] = report.tolerance;
  j["points"] = report.points_tested;
  j["max_abs"] = report.max_abs_error;
  j["max_rel"] = report.max_rel_error;
  j["worst_point"] = report.worst_point;
  j["pass"] = report.pass;
  j["criterion"] = report.criterion;
  if (report.skipped) j["skipped"] = true;
  if (!report.note.empty()) j["note"] = report.note;
  return j;
}

double default_gradient_step(const KernelSpec& spec) { return 1e-5 * spec.scale(); }
double default_laplacian_step(const KernelSpec& spec) { return 1e-3 * spec.scale(); }

Vec fd_gradient(const std::function<double(std::span<const double>)>& f, std::span<const double> x,
                double h) {
  Vec probe(x.begin(), x.end());
  Vec grad(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    probe[k] = x[k] + h;
    const double up = f(probe);
    probe[k] = x[k] - h;
    const double down = f(probe);
    probe[k] = x[k];
    grad[k] = (up - down) / (2.0 * h);
  }
  return grad;
}

double fd_laplacian(const std::function<double(std::span<const double>)>& f,
                    std::span<const double> x, double h) {
  Vec probe(x.begin(), x.end());
  const double center = f(x);
  double sum = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    probe[k] = x[k] + h;
    const double up = f(probe);
    probe[k] = x[k] - h;
    const double down = f(probe);
    probe[k] = x[k];
    sum += (up - 2.0 * center + down) / (h * h);
  }
  return sum;
}

double distance_to_atoms(const DiscreteMeasure& r, std::span<const double> x) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < r.size(); ++i) {
    double acc = 0.0;
    for (int k = 0; k < r.dim(); ++k) {
      const double d = x[k] - r.coordinate(k)[i];
      acc += d * d;
    }
    best = std::min(best, std::sqrt(acc));
  }
  return best;
}

VerifierReport check_gradient_identity(const KernelSpec& spec, const DiscreteMeasure& r,
                                       const std::vector<Vec>& points, double h, double tol) {
  require_step(h);
  require_points(points, spec.dim());
  const CompanionConstants cc = companion_constants(spec);
  auto psi = [&](std::span<const double> y) { return companion_potential(spec, r, y).value; };

  Worst worst;
  for (const Vec& x : points) {
    const Vec fd = fd_gradient(psi, x, h);
    const LocalAverage local = local_average(spec, r, x);
    const double u = std::exp(local.log_mass);
    const Vec rhs = scaled(subtract(local.barycenter, x), u / cc.c1);
    const double abs_err = norm(subtract(fd, rhs));
    const double floor = 1e-4 * u * spec.scale() / cc.c1;
    worst.update(abs_err, abs_err / std::max(norm(rhs), floor), x);
  }
  VerifierReport rep;
  rep.check_name = "gradient_identity";
  rep.points_tested = points.size();
  rep.max_abs_error = worst.abs;
  rep.max_rel_error = worst.rel;
  rep.worst_point = worst.point;
  rep.tolerance = tol;
  rep.pass = worst.rel <= tol;
  rep.criterion = "relative to max(|rhs|, 1e-4 u L / c1)";
  return rep;
}

VerifierReport check_elliptic_identity(const KernelSpec& spec, const DiscreteMeasure& r,
                                       const std::vector<Vec>& points, double h, double tol) {
  require_step(h);
  require_points(points, spec.dim());
  const CompanionConstants cc = companion_constants(spec);
  auto psi = [&](std::span<const double> y) { return companion_potential(spec, r, y).value; };
  const bool exact = cc.lambda1 == 0.0;
  const double exclusion = spec.has_cusp() ? 1e-2 * spec.scale() : 0.0;

  Worst worst;
  std::size_t tested = 0;
  std::size_t excluded = 0;
  for (const Vec& x : points) {
    if (exclusion > 0.0 && distance_to_atoms(r, x) < exclusion) {
      ++excluded;
      continue;
    }
    double lhs = cc.lambda0 * psi(x);
    if (!exact) lhs -= cc.lambda1 * fd_laplacian(psi, x, h);
    const double rhs = cc.c2 * kernel_mass(spec, r, x).value;
    const double abs_err = std::abs(lhs - rhs);
    worst.update(abs_err, abs_err / rhs, x);
    ++tested;
  }
  VerifierReport rep;
  rep.check_name = "elliptic_identity";
  rep.points_tested = tested;
  rep.max_abs_error = worst.abs;
  rep.max_rel_error = worst.rel;
  rep.worst_point = worst.point;
  rep.tolerance = exact ? tolerance::exact : tol;
  rep.pass = tested > 0 && worst.rel <= rep.tolerance;
  rep.criterion = "relative to c2 u";
  if (exact) rep.note = "lambda1 = 0: companion equals kernel, no finite differences";
  if (excluded > 0) rep.note = fmt::format("{} points within {:.3g} of an atom excluded", excluded, exclusion);
  return rep;
}

VerifierReport check_gradient_bound(const KernelSpec& spec, const DiscreteMeasure& r,
                                    const std::vector<Vec>& points) {
  if (spec.family() != KernelFamily::laplace) {
    throw std::invalid_argument("gradient bound holds for the Laplace kernel only");
  }
  require_points(points, spec.dim());
  const double tau = spec.scale();
  double max_excess = -std::numeric_limits<double>::infinity();
  double max_ratio = 0.0;
  Vec worst_point = points.front();
  std::size_t violations = 0;
  for (const Vec& x : points) {
    const CompanionPotential cp = companion_potential(spec, r, x);
    const double g = norm(cp.gradient);
    const double bound = cp.value / tau;
    if (g > bound * (1.0 + tolerance::exact)) ++violations;
    max_excess = std::max(max_excess, g - bound);
    const double ratio = bound > 0.0 ? g / bound : 0.0;
    if (ratio > max_ratio) {
      max_ratio = ratio;
      worst_point = x;
    }
  }
  VerifierReport rep;
  rep.check_name = "gradient_bound";
  rep.points_tested = points.size();
  rep.max_abs_error = max_excess;
  rep.max_rel_error = max_ratio;
  rep.worst_point = worst_point;
  rep.tolerance = tolerance::exact;
  rep.pass = violations == 0;
  rep.criterion = "ratio tau |grad Psi| / Psi <= 1 + 1e-12 everywhere";
  rep.note = fmt::format("{} violations", violations);
  return rep;
}

double cosine_transform_window(const KernelSpec& spec) {
  const double k0 = kernel_profile(spec, 0.0);
  const double s_min = spec.family() == KernelFamily::matern ? 2.0 * spec.nu() + 2.0 : 2.0;
  double s = std::max(4.0, s_min);
  while (kernel_profile(spec, s * spec.scale()) > 1e-17 * k0) s += 1.0;
  return s * spec.scale();
}

double cosine_transform(const KernelSpec& spec, double xi, double half_width) {
  if (spec.dim() != 1) throw std::invalid_argument("cosine_transform: d = 1 kernels only");
  const double w = std::min(spec.scale(), xi != 0.0 ? 1.0 / std::abs(xi) : spec.scale());
  const int panels = static_cast<int>(std::ceil(half_width / w));
  const double step = half_width / panels;
  auto f = [&](double x) { return kernel_profile(spec, x) * std::cos(xi * x); };
  double total = 0.0;
  double error_total = 0.0;
  double scale_total = 0.0;
  for (int i = 0; i < panels; ++i) {
    double err = 0.0;
    double l1 = 0.0;
    total += detail::integrate_finite<31>(f, i * step, (i + 1) * step, 15, 1e-13, &err, &l1);
    error_total += err;
    scale_total += l1;
  }
  if (!(error_total <= 1e-12 * scale_total)) {
    throw std::runtime_error(
        fmt::format("cosine_transform did not converge: error {:.3g} at xi = {}", error_total, xi));
  }
  return 2.0 * total;
}

VerifierReport check_spectral(const KernelSpec& spec, const std::vector<Vec>& xi_values,
                              const SpectralQuadrature& quadrature) {
  require_points(xi_values, spec.dim());
  for (const Vec& xi : xi_values) {
    for (double v : xi) {
      if (!std::isfinite(v)) throw std::invalid_argument("check_spectral: non-finite frequency");
    }
  }
  const CompanionConstants cc = companion_constants(spec);
  const double h = 1e-5 / spec.scale();
  auto density = [&](std::span<const double> xi) { return spectral_density(spec, xi); };

  Worst ode;
  std::size_t ode_points = 0;
  for (const Vec& xi : xi_values) {
    const double n = norm(xi);
    const double f = density(xi);
    if (n * spec.scale() < 1e-3 || f < 1e-280) continue;
    const Vec fd = fd_gradient(density, xi, h);
    const Vec rhs = scaled(xi, -cc.c1 * cc.c2 * f / (cc.lambda0 + cc.lambda1 * n * n));
    const double abs_err = norm(subtract(fd, rhs));
    ode.update(abs_err, abs_err / norm(rhs), xi);
    ++ode_points;
  }

  Worst transform;
  std::size_t transform_points = 0;
  if (spec.dim() == 1) {
    const double width = quadrature.half_width > 0.0 ? quadrature.half_width : cosine_transform_window(spec);
    const double at_zero = cosine_transform(spec, 0.0, width);
    for (const Vec& xi : xi_values) {
      if (std::abs(xi[0]) > 5.0) continue;
      const double numeric = cosine_transform(spec, xi[0], width) / at_zero;
      const double closed = density(xi);
      const double abs_err = std::abs(numeric - closed);
      transform.update(abs_err, abs_err / closed, xi);
      ++transform_points;
    }
  }

  VerifierReport rep;
  rep.check_name = "spectral";
  rep.points_tested = ode_points + transform_points;
  rep.max_abs_error = std::max(ode.abs, transform.abs);
  const bool transform_worse = transform.rel > ode.rel;
  rep.max_rel_error = transform_worse ? transform.rel : ode.rel;
  rep.worst_point = transform_worse ? transform.point : ode.point;
  rep.tolerance = quadrature.tol;
  rep.pass = rep.points_tested > 0 && ode.rel <= quadrature.tol && transform.rel <= quadrature.tol;
  rep.criterion = "relative, ODE residual and d = 1 cosine transform";
  rep.note = fmt::format("ode: {} points, max_rel {:.3g}; transform: {} points, max_rel {:.3g}",
                         ode_points, ode.rel, transform_points, transform.rel);
  return rep;
}

VerifierReport check_field_axioms(const KernelSpec& spec, const DiscreteMeasure& p,
                                  const DiscreteMeasure& q, const std::vector<Vec>& points) {
  require_points(points, spec.dim());
  if (!p.is_probability() || !q.is_probability()) {
    throw std::invalid_argument("check_field_axioms: p and q must be probability measures");
  }
  const bool equal = p.same_atoms_as(q);
  const int dim = spec.dim();

  std::vector<Vec> probes = points;
  if (!equal) {
    Vec lo(dim, std::numeric_limits<double>::infinity());
    Vec hi(dim, -std::numeric_limits<double>::infinity());
    for (const DiscreteMeasure* m : {&p, &q}) {
      for (std::size_t i = 0; i < m->size(); ++i) {
        for (int k = 0; k < dim; ++k) {
          lo[k] = std::min(lo[k], m->coordinate(k)[i]);
          hi[k] = std::max(hi[k], m->coordinate(k)[i]);
        }
        probes.push_back(m->atom(i));
      }
    }
    const int per_axis = dim == 1 ? 601 : dim == 2 ? 61 : dim == 3 ? 17 : 5;
    const double pad = spec.scale();
    const auto unit = lattice(dim, 0.0, 1.0, per_axis);
    for (const Vec& t : unit) {
      Vec x(dim);
      for (int k = 0; k < dim; ++k) x[k] = lo[k] - pad + t[k] * (hi[k] - lo[k] + 2.0 * pad);
      probes.push_back(std::move(x));
    }
  }

  double antisym = 0.0;
  double equal_residual = 0.0;
  double witness = 0.0;
  Vec witness_point = probes.front();
  Vec worst_point = probes.front();
  for (const Vec& x : probes) {
    const FieldSample pq = drift(spec, p, q, x);
    const FieldSample qp = drift(spec, q, p, x);
    const double a = norm(add(pq.V, qp.V));
    if (a > antisym) {
      antisym = a;
      worst_point = x;
    }
    const double v = norm(pq.V);
    if (equal && v > equal_residual) {
      equal_residual = v;
      worst_point = x;
    }
    if (v > witness) {
      witness = v;
      witness_point = x;
    }
  }

  VerifierReport rep;
  rep.check_name = "field_axioms";
  rep.points_tested = probes.size();
  rep.max_abs_error = std::max(antisym, equal_residual);
  rep.max_rel_error = rep.max_abs_error;
  rep.tolerance = tolerance::exact;
  const bool axioms = antisym <= tolerance::exact && equal_residual <= tolerance::exact;
  if (equal) {
    rep.worst_point = worst_point;
    rep.pass = axioms;
    rep.criterion = "absolute: |V_pq + V_qp| and |V| (p = q) <= 1e-12";
  } else {
    rep.worst_point = witness_point;
    rep.pass = axioms && witness > 1e-10;
    rep.criterion = "absolute antisymmetry <= 1e-12; witness |V| > 1e-10";
    rep.note = fmt::format("witness |V| = {:.17g}", witness);
  }
  return rep;
}

}  // namespace driftlab
