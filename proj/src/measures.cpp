#include "driftlab/measures.hpp"

#include "quadrature.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace driftlab {

namespace {

template <class F>
double integrate(F f, double a, double b) {
  if (!(b > a)) return 0.0;
  return detail::integrate_finite(f, a, b, 15, 1e-14);
}

void check_dim(int dim) {
  if (dim < 1 || dim > DiscreteMeasure::kMaxDim) {
    throw std::invalid_argument(fmt::format("measure dimension must be in [1, 16], got {}", dim));
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// DiscreteMeasure

DiscreteMeasure::DiscreteMeasure(int dim, std::vector<double> coords, std::vector<double> weights)
    : dim_(dim), coords_(std::move(coords)), weights_(std::move(weights)) {
  total_ = std::accumulate(weights_.begin(), weights_.end(), 0.0);
}

DiscreteMeasure DiscreteMeasure::from_rows(int dim, std::span<const double> rows,
                                           std::vector<double> weights, bool normalize) {
  check_dim(dim);
  const std::size_t n = weights.size();
  if (n == 0) throw std::invalid_argument("measure must have at least one atom");
  if (rows.size() != n * static_cast<std::size_t>(dim)) {
    throw std::invalid_argument("atom coordinates do not match the number of weights");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) {
      throw std::invalid_argument(fmt::format("weights must be finite and non-negative, got {}", w));
    }
    total += w;
  }
  if (!(total > 0.0)) throw std::invalid_argument("measure has zero total mass");
  if (normalize) {
    for (double& w : weights) w /= total;
  } else if (total > 1.0 + kMassTolerance) {
    throw std::invalid_argument(fmt::format("total mass {} exceeds 1", total));
  }
  std::vector<double> coords(rows.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (int k = 0; k < dim; ++k) {
      const double x = rows[i * dim + k];
      if (!std::isfinite(x)) throw std::invalid_argument("atom coordinates must be finite");
      coords[static_cast<std::size_t>(k) * n + i] = x;
    }
  }
  return DiscreteMeasure(dim, std::move(coords), std::move(weights));
}

DiscreteMeasure DiscreteMeasure::make(const std::vector<Vec>& atoms, std::vector<double> weights,
                                      bool normalize) {
  if (atoms.size() != weights.size()) {
    throw std::invalid_argument(fmt::format("{} atoms but {} weights", atoms.size(), weights.size()));
  }
  if (atoms.empty()) throw std::invalid_argument("measure must have at least one atom");
  const int dim = static_cast<int>(atoms.front().size());
  std::vector<double> rows;
  rows.reserve(atoms.size() * atoms.front().size());
  for (const Vec& a : atoms) {
    if (static_cast<int>(a.size()) != dim) {
      throw std::invalid_argument("atoms have inconsistent dimensions");
    }
    rows.insert(rows.end(), a.begin(), a.end());
  }
  return from_rows(dim, rows, std::move(weights), normalize);
}

DiscreteMeasure DiscreteMeasure::dirac(Vec x, double mass) { return make({std::move(x)}, {mass}); }

DiscreteMeasure DiscreteMeasure::zero(int dim) {
  check_dim(dim);
  return DiscreteMeasure(dim, {}, {});
}

bool DiscreteMeasure::is_probability() const {
  return !empty() && std::abs(total_ - 1.0) <= kMassTolerance;
}

Vec DiscreteMeasure::atom(std::size_t i) const {
  Vec x(dim_);
  for (int k = 0; k < dim_; ++k) x[k] = coords_[static_cast<std::size_t>(k) * size() + i];
  return x;
}

DiscreteMeasure DiscreteMeasure::scaled(double c) const {
  if (!(c >= 0.0 && c <= 1.0)) {
    throw std::invalid_argument(fmt::format("scale factor must lie in [0, 1], got {}", c));
  }
  if (c == 0.0 || empty()) return zero(dim_);
  std::vector<double> w(weights_);
  for (double& v : w) v *= c;
  return DiscreteMeasure(dim_, coords_, std::move(w));
}

DiscreteMeasure DiscreteMeasure::translated(std::span<const double> t) const {
  if (static_cast<int>(t.size()) != dim_) throw std::invalid_argument("translation dimension mismatch");
  std::vector<double> coords(coords_);
  for (int k = 0; k < dim_; ++k) {
    for (std::size_t i = 0; i < size(); ++i) coords[static_cast<std::size_t>(k) * size() + i] += t[k];
  }
  return DiscreteMeasure(dim_, std::move(coords), weights_);
}

DiscreteMeasure DiscreteMeasure::normalized() const {
  if (empty()) throw std::invalid_argument("cannot normalize the zero measure");
  std::vector<double> w(weights_);
  for (double& v : w) v /= total_;
  return DiscreteMeasure(dim_, coords_, std::move(w));
}

bool DiscreteMeasure::same_atoms_as(const DiscreteMeasure& other) const {
  if (dim_ != other.dim_ || size() != other.size()) return false;
  auto sorted_rows = [](const DiscreteMeasure& m) {
    std::vector<Vec> rows(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
      rows[i] = m.atom(i);
      rows[i].push_back(m.weight(i));
    }
    std::sort(rows.begin(), rows.end());
    return rows;
  };
  return sorted_rows(*this) == sorted_rows(other);
}

DiscreteMeasure combine(double alpha, const DiscreteMeasure& a, double beta,
                        const DiscreteMeasure& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("combine: dimension mismatch");
  if (!(alpha >= 0.0) || !(beta >= 0.0)) {
    throw std::invalid_argument("combine: coefficients must be non-negative");
  }
  std::vector<double> rows;
  std::vector<double> weights;
  auto append = [&](double c, const DiscreteMeasure& m) {
    if (c == 0.0) return;
    for (std::size_t i = 0; i < m.size(); ++i) {
      const Vec x = m.atom(i);
      rows.insert(rows.end(), x.begin(), x.end());
      weights.push_back(c * m.weight(i));
    }
  };
  append(alpha, a);
  append(beta, b);
  if (weights.empty()) return DiscreteMeasure::zero(a.dim());
  return DiscreteMeasure::from_rows(a.dim(), rows, std::move(weights));
}

DiscreteMeasure satellite(const DiscreteMeasure& p, double eps, std::span<const double> z) {
  if (!(eps > 0.0 && eps < 1.0)) {
    throw std::invalid_argument(fmt::format("satellite: eps must lie in (0, 1), got {}", eps));
  }
  if (!p.is_probability()) throw std::invalid_argument("satellite: base must be a probability measure");
  if (static_cast<int>(z.size()) != p.dim()) throw std::invalid_argument("satellite: dimension mismatch");
  std::vector<double> rows;
  std::vector<double> weights;
  bool merged = false;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Vec x = p.atom(i);
    double w = (1.0 - eps) * p.weight(i);
    if (!merged && std::equal(x.begin(), x.end(), z.begin())) {
      w += eps;
      merged = true;
    }
    rows.insert(rows.end(), x.begin(), x.end());
    weights.push_back(w);
  }
  if (!merged) {
    rows.insert(rows.end(), z.begin(), z.end());
    weights.push_back(eps);
  }
  return DiscreteMeasure::from_rows(p.dim(), rows, std::move(weights));
}

double tail_mass(const DiscreteMeasure& measure, double R) {
  double mass = 0.0;
  for (std::size_t i = 0; i < measure.size(); ++i) {
    if (norm(measure.atom(i)) > R) mass += measure.weight(i);
  }
  return mass;
}

// ---------------------------------------------------------------------------
// Power law and tilt

namespace {

double sphere_area(int dim) { return dim == 1 ? 2.0 : 2.0 * std::numbers::pi; }

}  // namespace

PowerLawDensity::PowerLawDensity(double m, int dim) : m_(m), dim_(dim) {
  if (dim != 1 && dim != 2) {
    throw std::invalid_argument(fmt::format("power law densities support dim 1 or 2, got {}", dim));
  }
  if (!(m > dim) || !std::isfinite(m)) {
    throw std::invalid_argument(fmt::format("power law exponent must exceed the dimension, got m={}", m));
  }
  z_ = dim == 1 ? 2.0 / (m - 1.0) : 2.0 * std::numbers::pi / ((m - 1.0) * (m - 2.0));
}

double PowerLawDensity::density(double r) const { return std::pow(1.0 + r, -m_) / z_; }

double PowerLawDensity::radial_density(double r) const {
  const double shell = dim_ == 1 ? 2.0 : 2.0 * std::numbers::pi * r;
  return shell * density(r);
}

double PowerLawDensity::tail(double R) const {
  if (R <= 0.0) return 1.0;
  const double base = std::pow(1.0 + R, 1.0 - m_);
  return dim_ == 1 ? base : base * (1.0 + (m_ - 1.0) * R);
}

TailConstants PowerLawDensity::tail_constants() const {
  // For r >= 1: 2^{-m} r^{-m} <= (1 + r)^{-m} <= r^{-m}; integrate r^{d-1-m}.
  const double c_plus = sphere_area(dim_) / (z_ * (m_ - dim_));
  return {std::pow(2.0, -m_) * c_plus, c_plus};
}

double cutoff(double r) { return std::clamp(r - 1.0, 0.0, 1.0); }

TiltedDensity::TiltedDensity(const PowerLawDensity& base, int n) : base_(base), n_(n) {
  if (n < 1) throw std::invalid_argument(fmt::format("tilt index n must be >= 1, got {}", n));
  t_n_ = base_.tail(2.0 * n);
  alpha_n_ = -std::log(t_n_);
  z_n_ = tilted_tail(0.0);
  if (!std::isfinite(z_n_) || z_n_ < 1.0 - 1e-12) {
    throw std::runtime_error(fmt::format("tilt normalizer quadrature failed: Z_n = {}", z_n_));
  }
}

double TiltedDensity::tilted_tail(double R) const {
  const double n = n_;
  double total = 0.0;
  if (R < n) total += base_.tail(std::max(R, 0.0)) - base_.tail(n);
  const double ramp_from = std::max(R, n);
  if (ramp_from < 2.0 * n) {
    total += integrate(
        [this](double r) { return std::exp(tilt(r)) * base_.radial_density(r); }, ramp_from, 2.0 * n);
  }
  total += std::exp(alpha_n_) * base_.tail(std::max(R, 2.0 * n));
  return total;
}

double TiltedDensity::radial_density(double r) const {
  return std::exp(tilt(r)) * base_.radial_density(r) / z_n_;
}

double TiltedDensity::tail(double R) const { return tilted_tail(R) / z_n_; }

TiltedDensity tilt_density(const PowerLawDensity& base, int n) { return TiltedDensity(base, n); }

double tail_mass(const PowerLawDensity& density, double R) { return density.tail(R); }
double tail_mass(const TiltedDensity& density, double R) { return density.tail(R); }

// ---------------------------------------------------------------------------
// Discretization

namespace {

double bisect_radius(auto tail_fn, double target) {
  double lo = 0.0;
  double hi = 1.0;
  while (tail_fn(hi) > target) {
    hi *= 2.0;
    if (hi > 1e15) throw std::runtime_error("default_radius: tail does not decay");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-9 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (tail_fn(mid) > target ? lo : hi) = mid;
  }
  return hi;
}

void check_grid(const RadialGrid& grid) {
  if (!(grid.r_max > 0.0) || grid.cells < 1 || !(grid.core > 0.0) || grid.angles < 1) {
    throw std::invalid_argument("discretize_density: r_max, cells, core and angles must be positive");
  }
}

double grid_edge(const RadialGrid& grid, double t) {
  return grid.core * std::sinh(t * std::asinh(grid.r_max / grid.core));
}

// radial_mass(a, b) = mass of the shell a <= |y| <= b.
template <class RadialMass>
Discretization discretize(int dim, const RadialGrid& grid, RadialMass radial_mass, double truncated) {
  check_grid(grid);
  std::vector<double> rows;
  std::vector<double> weights;
  double error = 0.0;
  if (dim == 1) {
    for (int k = 0; k < grid.cells; ++k) {
      double a = grid_edge(grid, -1.0 + 2.0 * k / grid.cells);
      double b = grid_edge(grid, -1.0 + 2.0 * (k + 1) / grid.cells);
      if (k == 0) a = -grid.r_max;
      if (k + 1 == grid.cells) b = grid.r_max;
      double mass = 0.0;
      if (a >= 0.0) {
        mass = 0.5 * radial_mass(a, b);
      } else if (b <= 0.0) {
        mass = 0.5 * radial_mass(-b, -a);
      } else {
        mass = 0.5 * (radial_mass(0.0, -a) + radial_mass(0.0, b));
      }
      rows.push_back(0.5 * (a + b));
      weights.push_back(mass);
      error += mass * (b - a) * (b - a) / 24.0;
    }
  } else {
    const double dtheta = 2.0 * std::numbers::pi / grid.angles;
    for (int k = 0; k < grid.cells; ++k) {
      const double a = k == 0 ? 0.0 : grid_edge(grid, static_cast<double>(k) / grid.cells);
      const double b = k + 1 == grid.cells ? grid.r_max : grid_edge(grid, static_cast<double>(k + 1) / grid.cells);
      const double shell = radial_mass(a, b) / grid.angles;
      const double r = 0.5 * (a + b);
      for (int j = 0; j < grid.angles; ++j) {
        const double theta = (j + 0.5) * dtheta;
        rows.push_back(r * std::cos(theta));
        rows.push_back(r * std::sin(theta));
        weights.push_back(shell);
        error += shell * ((b - a) * (b - a) + r * r * dtheta * dtheta) / 24.0;
      }
    }
  }
  return {DiscreteMeasure::from_rows(dim, rows, std::move(weights)), truncated, error};
}

}  // namespace

Discretization discretize_density(const PowerLawDensity& density, const RadialGrid& grid) {
  auto radial_mass = [&density](double a, double b) {
    return integrate([&density](double r) { return density.radial_density(r); }, a, b);
  };
  return discretize(density.dim(), grid, radial_mass, density.tail(grid.r_max));
}

Discretization discretize_density(const TiltedDensity& density, const RadialGrid& grid) {
  const double n = density.n();
  auto radial_mass = [&density, n](double a, double b) {
    // Split at the breakpoints of the cutoff so each piece is smooth.
    const double cuts[] = {a, std::clamp(n, a, b), std::clamp(2.0 * n, a, b), b};
    double total = 0.0;
    for (int i = 0; i < 3; ++i) {
      total += integrate([&density](double r) { return density.radial_density(r); }, cuts[i], cuts[i + 1]);
    }
    return total;
  };
  return discretize(density.base().dim(), grid, radial_mass, density.tail(grid.r_max));
}

double default_radius(const PowerLawDensity& density, double tail) {
  return bisect_radius([&density](double R) { return density.tail(R); }, tail);
}

double default_radius(const TiltedDensity& density, double tail) {
  return bisect_radius([&density](double R) { return density.tail(R); }, tail);
}

}  // namespace driftlab
