#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "driftlab/field.hpp"
#include "driftlab/identities.hpp"
#include "support.hpp"

using namespace driftlab;
using driftlab::testing::kernel_sweep;
using driftlab::testing::random_measure;
using driftlab::testing::random_points;

namespace {

const DiscreteMeasure kOrigin = DiscreteMeasure::dirac({0.0});
const DiscreteMeasure kPair = make_discrete({{-1.0}, {1.0}}, {0.5, 0.5});

}  // namespace

TEST_CASE("finite difference helpers") {
  auto f = [](std::span<const double> x) { return x[0] * x[0] * x[0] + 2.0 * x[0] * x[1]; };
  const Vec x{1.0, 2.0};
  const Vec g = fd_gradient(f, x, 1e-4);
  CHECK(std::abs(g[0] - 7.0) <= 1e-7);
  CHECK(std::abs(g[1] - 2.0) <= 1e-9);
  CHECK(std::abs(fd_laplacian(f, x, 1e-3) - 6.0) <= 1e-6);
  CHECK(distance_to_atoms(kPair, Vec{0.25}) == 0.75);
}

TEST_CASE("gradient identity examples") {
  const auto lap = KernelSpec::laplace(1.0, 1);
  const auto rep = check_gradient_identity(lap, kOrigin, {{1.0}}, 1e-5);
  CHECK(rep.pass);
  CHECK(rep.max_rel_error <= 1e-6);
  CHECK(rep.points_tested == 1);
  CHECK(rep.tolerance == tolerance::first_order);

  std::mt19937_64 rng(51);
  std::vector<Vec> atoms(16, Vec(2));
  std::uniform_real_distribution<double> coord(-2.0, 2.0);
  for (Vec& a : atoms)
    for (double& c : a) c = coord(rng);
  const auto r = DiscreteMeasure::make(atoms, std::vector<double>(16, 1.0), true);
  const auto g = KernelSpec::gaussian(1.0, 2);
  CHECK(check_gradient_identity(g, r, random_points(rng, 2, 10, 3.0), default_gradient_step(g)).pass);

  CHECK_THROWS_AS(check_gradient_identity(lap, kOrigin, {{1.0}}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(check_gradient_identity(lap, kOrigin, {}, 1e-5), std::invalid_argument);
}

TEST_CASE("elliptic identity examples") {
  const auto lap = KernelSpec::laplace(1.0, 1);
  const auto rep = check_elliptic_identity(lap, kOrigin, {{0.7}}, 1e-3);
  CHECK(rep.pass);
  CHECK(rep.max_rel_error <= 1e-4);

  std::mt19937_64 rng(52);
  const auto g = KernelSpec::gaussian(1.0, 2);
  const auto r = random_measure(rng, 2, 8, 2.0);
  const auto exact = check_elliptic_identity(g, r, random_points(rng, 2, 10, 3.0), 1e-3);
  CHECK(exact.pass);
  CHECK(exact.tolerance == tolerance::exact);
  CHECK(exact.max_rel_error <= 1e-12);

  std::vector<Vec> atoms(8, Vec(2));
  std::uniform_real_distribution<double> coord(-1.5, 1.5);
  for (Vec& a : atoms)
    for (double& c : a) c = coord(rng);
  const auto r8 = DiscreteMeasure::make(atoms, std::vector<double>(8, 0.125));
  const auto m = KernelSpec::matern(1.5, 1.0, 2);
  CHECK(check_elliptic_identity(m, r8, random_points(rng, 2, 10, 2.5), default_laplacian_step(m)).pass);
}

TEST_CASE("cusp kernels skip points next to atoms") {
  for (const auto& spec : {KernelSpec::laplace(1.0, 1), KernelSpec::matern(0.5, 1.0, 1)}) {
    const auto rep = check_elliptic_identity(spec, kPair, {{1.0}, {1.005}, {0.3}}, 1e-3);
    CHECK(rep.points_tested == 1);
    CHECK(rep.pass);
  }
  const auto smooth = check_elliptic_identity(KernelSpec::matern(1.5, 1.0, 1), kPair, {{1.0}, {1.005}, {0.3}}, 1e-3);
  CHECK(smooth.points_tested == 3);
  CHECK(smooth.pass);
}

TEST_CASE("gradient bound") {
  const auto lap = KernelSpec::laplace(1.0, 1);
  // Single atom: |∇Ψ| / Ψ = |z| / (τ + |z|) < 1/τ.
  const auto single = check_gradient_bound(lap, kOrigin, {{0.5}, {3.0}, {-20.0}});
  CHECK(single.pass);
  CHECK(std::abs(single.max_rel_error - 20.0 / 21.0) <= 1e-12);

  std::mt19937_64 rng(53);
  std::vector<Vec> atoms(10, Vec(2));
  std::uniform_real_distribution<double> coord(-3.0, 3.0);
  for (Vec& a : atoms)
    for (double& c : a) c = coord(rng);
  const auto r = DiscreteMeasure::make(atoms, std::vector<double>(10, 0.1));
  auto points = random_points(rng, 2, 100, 5.0);
  points.push_back(atoms[3]);
  CHECK(check_gradient_bound(KernelSpec::laplace(0.7, 2), r, points).pass);

  const auto at_atom = check_gradient_bound(lap, kOrigin, {{0.0}});
  CHECK(at_atom.pass);
  CHECK(at_atom.max_rel_error == 0.0);
  CHECK_THROWS_AS(check_gradient_bound(KernelSpec::gaussian(1.0, 1), kOrigin, {{1.0}}), std::invalid_argument);
}

TEST_CASE("gradient identity error shrinks with the step") {
  std::mt19937_64 rng(54);
  for (const auto& spec : kernel_sweep(2)) {
    const auto r = random_measure(rng, 2, 6, 1.5);
    std::vector<Vec> points;
    for (const auto& x : random_points(rng, 2, 20, 2.5)) {
      if (distance_to_atoms(r, x) > 0.2 * spec.scale()) points.push_back(x);
    }
    REQUIRE_FALSE(points.empty());
    const double h = 2e-2 * spec.scale();
    const double coarse = check_gradient_identity(spec, r, points, h).max_abs_error;
    const double fine = check_gradient_identity(spec, r, points, h / 2).max_abs_error;
    CHECK(fine <= 0.5 * coarse);
  }
}

TEST_CASE("spectral checks") {
  const std::vector<Vec> xi{{0.0}, {0.5}, {1.0}, {2.0}, {5.0}};
  for (const auto& spec : {KernelSpec::gaussian(1.0, 1), KernelSpec::laplace(1.0, 1), KernelSpec::matern(1.5, 0.7, 1)}) {
    const auto rep = check_spectral(spec, xi);
    CHECK(rep.pass);
    CHECK(rep.max_rel_error <= 1e-6);
  }
  const auto g = KernelSpec::gaussian(1.0, 1);
  const double w = cosine_transform_window(g);
  CHECK(std::abs(cosine_transform(g, 2.0, w) / cosine_transform(g, 0.0, w) - std::exp(-2.0)) <= 1e-6 * std::exp(-2.0));
  const auto l = KernelSpec::laplace(1.0, 1);
  const double wl = cosine_transform_window(l);
  CHECK(std::abs(cosine_transform(l, 1.0, wl) / cosine_transform(l, 0.0, wl) - 0.5) <= 5e-7);
  CHECK(cosine_transform(l, 0.0, wl) / cosine_transform(l, 0.0, wl) == 1.0);
  // In d > 1 only the ODE part runs.
  CHECK(check_spectral(KernelSpec::matern(2.5, 1.3, 3), {{0.5, 0.0, 0.0}, {1.0, 2.0, 2.0}}).pass);
}

TEST_CASE("field axioms") {
  const auto lap = KernelSpec::laplace(1.0, 1);
  const auto grid = lattice(1, -3.0, 3.0, 61);
  const auto same = check_field_axioms(lap, kPair, kPair, grid);
  CHECK(same.pass);
  CHECK(same.max_abs_error <= 1e-12);

  const auto constant = check_field_axioms(lap, kOrigin, DiscreteMeasure::dirac({2.0}), grid);
  CHECK(constant.pass);
  CHECK(constant.note.find("witness") != std::string::npos);

  const auto pair = check_field_axioms(lap, kPair, kOrigin, grid);
  CHECK(pair.pass);
  // Brute-force search on the same grid finds a nonzero field.
  double best = 0.0;
  for (const auto& x : grid) best = std::max(best, norm(drift(lap, kPair, kOrigin, x).V));
  CHECK(best > 1e-10);

  CHECK_THROWS_AS(check_field_axioms(lap, kPair.scaled(0.5), kOrigin, grid), std::invalid_argument);
}

TEST_CASE("report serialization") {
  const auto rep = check_gradient_identity(KernelSpec::laplace(1.0, 1), kOrigin, {{1.0}, {2.0}}, 1e-5);
  const auto j = to_json(rep);
  CHECK(j["check"] == rep.check_name);
  CHECK(j["points"] == 2);
  CHECK(j["pass"] == true);
  CHECK(j["tolerance"] == 1e-6);
  CHECK(j.contains("max_abs"));
  CHECK(j.contains("max_rel"));
  CHECK(j["worst_point"].is_array());
}

TEST_CASE("verifiers are deterministic") {
  std::mt19937_64 rng(55);
  const auto spec = KernelSpec::matern(2.5, 1.3, 2);
  const auto r = random_measure(rng, 2, 10, 2.0);
  const auto pts = random_points(rng, 2, 10, 3.0);
  const auto a = check_elliptic_identity(spec, r, pts, 1e-3);
  const auto b = check_elliptic_identity(spec, r, pts, 1e-3);
  CHECK(a.max_rel_error == b.max_rel_error);
  CHECK(a.worst_point == b.worst_point);
}
