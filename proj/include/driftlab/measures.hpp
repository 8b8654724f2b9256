#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "driftlab/vec.hpp"

namespace driftlab {

/// Weighted atom cloud with total mass in (0, 1], or the zero measure.
///
/// Coordinates are stored structure-of-arrays: coordinate(k) is the k-th
/// component of every atom, contiguous. The field kernels rely on this layout.
class DiscreteMeasure {
 public:
  static constexpr double kMassTolerance = 1e-12;
  static constexpr int kMaxDim = 16;

  /// Validates and builds a measure. With `normalize`, weights are rescaled to
  /// total mass 1. Throws std::invalid_argument on dimension mismatch, negative
  /// or non-finite weights, zero total mass, or total mass above 1.
  static DiscreteMeasure make(const std::vector<Vec>& atoms, std::vector<double> weights,
                              bool normalize = false);
  /// Same as make() with atoms given row-major (n × dim).
  static DiscreteMeasure from_rows(int dim, std::span<const double> rows,
                                   std::vector<double> weights, bool normalize = false);
  static DiscreteMeasure dirac(Vec x, double mass = 1.0);
  /// The zero measure (the c = 0 end of the defect ray).
  static DiscreteMeasure zero(int dim);

  int dim() const { return dim_; }
  std::size_t size() const { return weights_.size(); }
  bool empty() const { return weights_.empty(); }
  double total_mass() const { return total_; }
  bool is_probability() const;

  std::span<const double> coordinate(int k) const {
    return {coords_.data() + static_cast<std::size_t>(k) * size(), size()};
  }
  /// All coordinates, dim blocks of size() values.
  std::span<const double> soa() const { return coords_; }
  std::span<const double> weights() const { return weights_; }
  double weight(std::size_t i) const { return weights_[i]; }
  Vec atom(std::size_t i) const;

  /// c·μ for c in [0, 1]; c = 0 gives the zero measure.
  DiscreteMeasure scaled(double c) const;
  DiscreteMeasure translated(std::span<const double> t) const;
  DiscreteMeasure normalized() const;

  /// Same multiset of (atom, weight) pairs, ignoring order.
  bool same_atoms_as(const DiscreteMeasure& other) const;

 private:
  DiscreteMeasure(int dim, std::vector<double> coords, std::vector<double> weights);

  int dim_ = 1;
  std::vector<double> coords_;
  std::vector<double> weights_;
  double total_ = 0.0;
};

inline DiscreteMeasure make_discrete(const std::vector<Vec>& atoms, std::vector<double> weights,
                                     bool normalize = false) {
  return DiscreteMeasure::make(atoms, std::move(weights), normalize);
}

/// α·a + β·b with α, β >= 0; the result must have mass <= 1.
DiscreteMeasure combine(double alpha, const DiscreteMeasure& a, double beta,
                        const DiscreteMeasure& b);

/// (1 - eps)·p + eps·δ_z. An existing atom at exactly z absorbs the new mass.
DiscreteMeasure satellite(const DiscreteMeasure& p, double eps, std::span<const double> z);

/// Σ of weights of atoms with |atom| > R.
double tail_mass(const DiscreteMeasure& measure, double R);

struct TailConstants {
  double c_minus;
  double c_plus;
};

/// ρ(y) = Z^{-1} (1 + |y|)^{-m} on R^d, d in {1, 2}, m > d.
class PowerLawDensity {
 public:
  PowerLawDensity(double m, int dim);

  double m() const { return m_; }
  int dim() const { return dim_; }
  double normalizer() const { return z_; }

  double density(double r) const;
  /// Density of |Y|: |S^{d-1}| r^{d-1} ρ(r).
  double radial_density(double r) const;
  /// p(|Y| > R), closed form.
  double tail(double R) const;
  /// Constants with c- R^{d-m} <= p(|Y| > R) <= c+ R^{d-m} for R >= 1.
  TailConstants tail_constants() const;

 private:
  double m_;
  int dim_;
  double z_;
};

/// ψ(r) = clamp(r - 1, 0, 1): 0 on [0,1], 1 on [2,∞), Lipschitz 1.
double cutoff(double r);

/// q_n ∝ exp(α_n ψ(|x|/n)) p with t_n = p(|Y| > 2n) and α_n = -log t_n.
class TiltedDensity {
 public:
  TiltedDensity(const PowerLawDensity& base, int n);

  const PowerLawDensity& base() const { return base_; }
  int n() const { return n_; }
  double t_n() const { return t_n_; }
  double alpha_n() const { return alpha_n_; }
  double normalizer() const { return z_n_; }
  /// Lip(φ_n) <= α_n / n.
  double lipschitz() const { return alpha_n_ / n_; }

  double tilt(double r) const { return alpha_n_ * cutoff(r / n_); }
  double radial_density(double r) const;
  /// q_n(|X| > R).
  double tail(double R) const;

 private:
  // ∫_{|y| > R} e^{φ_n} dp, unnormalized.
  double tilted_tail(double R) const;

  PowerLawDensity base_;
  int n_;
  double t_n_;
  double alpha_n_;
  double z_n_;
};

TiltedDensity tilt_density(const PowerLawDensity& base, int n);

double tail_mass(const PowerLawDensity& density, double R);
double tail_mass(const TiltedDensity& density, double R);

/// Graded grid for discretizing radial densities. In d = 1 the cells tile
/// [-r_max, r_max] through x = core·sinh(t·asinh(r_max/core)), t uniform in
/// [-1, 1]; in d = 2 the same map on t in [0, 1] gives radial shells, each
/// split into `angles` sectors. Cells are finest near the origin and grow
/// geometrically beyond `core`.
struct RadialGrid {
  double r_max = 0.0;
  int cells = 0;
  double core = 1.0;
  int angles = 64;
};

struct Discretization {
  DiscreteMeasure measure;
  /// Analytic mass beyond r_max (not represented by any atom).
  double truncated_mass;
  /// Σ w_i h_i² / 24: the midpoint-placement error coefficient. The error of
  /// ∫ f for a test function f is about this times sup |Hess f|.
  double quadrature_error;
};

/// Atoms at cell midpoints carrying the exact cell masses (adaptive quadrature,
/// split at the tilt breakpoints). The result is a sub-probability measure of
/// mass 1 - truncated_mass; call measure.normalized() for a probability.
Discretization discretize_density(const PowerLawDensity& density, const RadialGrid& grid);
Discretization discretize_density(const TiltedDensity& density, const RadialGrid& grid);

/// Radius beyond which the analytic tail is below `tail`.
double default_radius(const PowerLawDensity& density, double tail = 1e-6);
double default_radius(const TiltedDensity& density, double tail = 1e-6);

}  // namespace driftlab
