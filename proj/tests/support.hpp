#pragma once

#include <random>
#include <vector>

#include "driftlab/kernels.hpp"
#include "driftlab/measures.hpp"

namespace driftlab::testing {

inline double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

/// Every kernel family at the parameters the identity sweeps use.
inline std::vector<KernelSpec> kernel_sweep(int dim) {
  return {KernelSpec::laplace(0.5, dim),      KernelSpec::laplace(1.0, dim),
          KernelSpec::laplace(2.0, dim),      KernelSpec::gaussian(0.5, dim),
          KernelSpec::gaussian(1.0, dim),     KernelSpec::gaussian(2.0, dim),
          KernelSpec::matern(0.5, 1.0, dim),  KernelSpec::matern(1.0, 1.0, dim),
          KernelSpec::matern(1.5, 0.7, dim),  KernelSpec::matern(2.5, 1.3, dim)};
}

/// Probability measure with 1..max_atoms atoms uniform in [-spread, spread]^dim.
inline DiscreteMeasure random_measure(std::mt19937_64& rng, int dim, int max_atoms, double spread) {
  std::uniform_int_distribution<int> count(1, max_atoms);
  std::uniform_real_distribution<double> coord(-spread, spread);
  std::uniform_real_distribution<double> weight(0.1, 1.0);
  const int n = count(rng);
  std::vector<Vec> atoms(n, Vec(dim));
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) {
    for (double& c : atoms[i]) c = coord(rng);
    w[i] = weight(rng);
  }
  return DiscreteMeasure::make(atoms, std::move(w), true);
}

inline std::vector<Vec> random_points(std::mt19937_64& rng, int dim, int count, double spread) {
  std::uniform_real_distribution<double> coord(-spread, spread);
  std::vector<Vec> pts(count, Vec(dim));
  for (Vec& x : pts) {
    for (double& c : x) c = coord(rng);
  }
  return pts;
}

}  // namespace driftlab::testing
