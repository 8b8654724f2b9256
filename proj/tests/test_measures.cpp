#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "driftlab/field.hpp"
#include "driftlab/measures.hpp"
#include "support.hpp"

using namespace driftlab;
using driftlab::testing::rel_err;

namespace {

// Composite Simpson on [a, b] with n (even) panels.
template <class F>
double simpson(F f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

// d = 1, m = 3: ρ(y) = (1 + |y|)^{-3}, so |Y| has density 2(1 + r)^{-3}.
double tilt_normalizer_oracle(int n) {
  const double alpha = 2.0 * std::log(1.0 + 2.0 * n);
  const double inner = 1.0 - std::pow(1.0 + n, -2.0);
  const double outer = std::exp(alpha) * std::pow(1.0 + 2.0 * n, -2.0);
  const double ramp = simpson([&](double r) { return std::exp(alpha * (r / n - 1.0)) * 2.0 * std::pow(1.0 + r, -3.0); },
                              n, 2.0 * n, 20000);
  return inner + outer + ramp;
}

}  // namespace

TEST_CASE("make_discrete examples") {
  const auto d0 = make_discrete({{0.0}}, {1.0});
  CHECK(d0.size() == 1);
  CHECK(d0.is_probability());
  const auto two = make_discrete({{-1.0}, {1.0}}, {0.5, 0.5});
  CHECK(two.is_probability());
  CHECK(two.atom(0) == Vec{-1.0});
  const auto sub = make_discrete({{0.0}}, {0.4});
  CHECK(sub.total_mass() == 0.4);
  CHECK_FALSE(sub.is_probability());
}

TEST_CASE("make_discrete validation") {
  CHECK_THROWS_AS(make_discrete({{0.0}, {1.0, 2.0}}, {0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(make_discrete({{0.0}}, {-0.1}), std::invalid_argument);
  CHECK_THROWS_AS(make_discrete({{0.0}}, {0.0}), std::invalid_argument);
  CHECK_THROWS_AS(make_discrete({{0.0}, {1.0}}, {0.7, 0.7}), std::invalid_argument);
  CHECK_THROWS_AS(make_discrete({{0.0}}, {0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(make_discrete({}, {}), std::invalid_argument);
  CHECK_THROWS_AS(make_discrete({{std::nan("")}}, {1.0}), std::invalid_argument);
  const auto n = make_discrete({{0.0}, {1.0}}, {3.0, 1.0}, true);
  CHECK(n.weight(0) == 0.75);
  CHECK(n.is_probability());
  // Mass within the tolerance of 1 counts as a probability.
  CHECK(make_discrete({{0.0}}, {1.0 + 5e-13}).is_probability());
}

TEST_CASE("structure of arrays layout") {
  const auto m = make_discrete({{1.0, 2.0}, {3.0, 4.0}, {5.0, 6.0}}, {0.2, 0.3, 0.5});
  CHECK(std::vector<double>(m.coordinate(0).begin(), m.coordinate(0).end()) == Vec{1.0, 3.0, 5.0});
  CHECK(std::vector<double>(m.coordinate(1).begin(), m.coordinate(1).end()) == Vec{2.0, 4.0, 6.0});
  CHECK(m.atom(2) == Vec{5.0, 6.0});
  const auto t = m.translated(Vec{1.0, -1.0});
  CHECK(t.atom(0) == Vec{2.0, 1.0});
  CHECK(m.scaled(0.5).total_mass() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(m.scaled(0.0).empty());
  CHECK(m.same_atoms_as(make_discrete({{5.0, 6.0}, {1.0, 2.0}, {3.0, 4.0}}, {0.5, 0.2, 0.3})));
  CHECK_FALSE(m.same_atoms_as(make_discrete({{5.0, 6.0}, {1.0, 2.0}, {3.0, 4.0}}, {0.2, 0.5, 0.3})));
}

TEST_CASE("satellite examples") {
  const auto q = satellite(DiscreteMeasure::dirac({0.0}), 0.3, Vec{10.0});
  REQUIRE(q.size() == 2);
  CHECK(q.atom(0) == Vec{0.0});
  CHECK(q.weight(0) == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(q.atom(1) == Vec{10.0});
  CHECK(q.weight(1) == 0.3);
  CHECK(q.is_probability());

  const double eps = 0.3;
  const auto twice = satellite(q, eps, Vec{10.0});
  REQUIRE(twice.size() == 2);
  CHECK(std::abs(twice.weight(1) - (eps + (1 - eps) * eps)) <= 1e-15);
  CHECK(std::abs(twice.total_mass() - 1.0) <= 1e-15);

  const auto p = make_discrete({{-1.0}, {1.0}}, {0.5, 0.5});
  CHECK(tail_mass(satellite(p, 0.3, Vec{10.0}), 5.0) >= 0.3);
  CHECK_THROWS_AS(satellite(p, 0.0, Vec{1.0}), std::invalid_argument);
  CHECK_THROWS_AS(satellite(p, 1.0, Vec{1.0}), std::invalid_argument);
  CHECK_THROWS_AS(satellite(p.scaled(0.5), 0.3, Vec{1.0}), std::invalid_argument);
}

TEST_CASE("satellite preserves total mass") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = driftlab::testing::random_measure(rng, 2, 12, 3.0);
    const auto q = satellite(p, 0.05 + 0.04 * trial, Vec{1.0 * trial, -2.0});
    CHECK(std::abs(q.total_mass() - 1.0) <= 1e-12);
    CHECK(q.is_probability());
  }
}

TEST_CASE("discrete tail mass") {
  const auto d0 = DiscreteMeasure::dirac({0.0});
  for (double R : {1e-9, 0.5, 3.0}) CHECK(tail_mass(d0, R) == 0.0);
  const auto m = make_discrete({{0.0, 0.0}, {3.0, 4.0}}, {0.25, 0.75});
  CHECK(tail_mass(m, 4.9) == 0.75);
  CHECK(tail_mass(m, 5.0) == 0.0);
}

TEST_CASE("power law tails") {
  const PowerLawDensity p(3.0, 1);
  CHECK(p.normalizer() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(rel_err(tail_mass(p, 2.0), 1.0 / 9.0) <= 1e-14);
  for (double m : {2.5, 3.0, 4.0}) {
    const PowerLawDensity q(m, 1);
    CHECK(rel_err(q.normalizer(), 2.0 / (m - 1.0)) <= 1e-14);
    for (double R : {0.5, 3.0, 40.0}) {
      // Closed form: 2∫_R^∞ (1+r)^{-m} dr / Z.
      CHECK(rel_err(tail_mass(q, R), std::pow(1.0 + R, 1.0 - m)) <= 1e-13);
    }
  }
}

TEST_CASE("two-dimensional power law against quadrature") {
  for (double m : {3.0, 4.5}) {
    const PowerLawDensity p(m, 2);
    // With u = 1/(1+r), ∫_R^∞ 2π r (1+r)^{-m} dr = ∫_0^{1/(1+R)} 2π (1-u) u^{m-3} du.
    auto mapped = [&](double lo) {
      return simpson([&](double u) { return 2.0 * std::numbers::pi * (1.0 - u) * std::pow(u, m - 3.0); }, 0.0,
                     1.0 / (1.0 + lo), 200000);
    };
    const double z = mapped(0.0);
    CHECK(rel_err(p.normalizer(), z) <= 1e-8);
    for (double R : {1.0, 4.0, 20.0}) CHECK(rel_err(tail_mass(p, R), mapped(R) / z) <= 1e-7);
    double total = 0.0;
    total = simpson([&](double r) { return p.radial_density(r); }, 0.0, 50.0, 20000) + tail_mass(p, 50.0);
    CHECK(std::abs(total - 1.0) <= 1e-8);
  }
}

TEST_CASE("power law tail sandwich") {
  for (int dim : {1, 2}) {
    const PowerLawDensity p(dim + 2.0, dim);
    const auto c = p.tail_constants();
    CHECK(c.c_minus > 0.0);
    for (double R : {1.0, 2.0, 4.0, 8.0, 100.0}) {
      const double scale = std::pow(R, dim - p.m());
      CHECK(c.c_minus * scale <= tail_mass(p, R));
      CHECK(tail_mass(p, R) <= c.c_plus * scale);
    }
  }
  CHECK_THROWS_AS(PowerLawDensity(1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(PowerLawDensity(4.0, 3), std::invalid_argument);
}

TEST_CASE("cutoff ramp") {
  CHECK(cutoff(0.0) == 0.0);
  CHECK(cutoff(1.0) == 0.0);
  CHECK(cutoff(1.5) == 0.5);
  CHECK(cutoff(2.0) == 1.0);
  CHECK(cutoff(7.0) == 1.0);
}

TEST_CASE("tilt schedule") {
  const PowerLawDensity p(3.0, 1);
  const auto q1 = tilt_density(p, 1);
  CHECK(rel_err(q1.t_n(), 1.0 / 9.0) <= 1e-14);
  CHECK(std::abs(q1.alpha_n() - 2.1972245773362196) <= 1e-12);
  double prev = q1.lipschitz();
  for (int n : {2, 4, 8, 16, 32}) {
    const auto q = tilt_density(p, n);
    CHECK(rel_err(q.alpha_n(), 2.0 * std::log(1.0 + 2.0 * n)) <= 1e-13);
    CHECK(q.lipschitz() < prev);
    prev = q.lipschitz();
  }
  CHECK(tilt_density(p, 4).lipschitz() < q1.lipschitz());
  CHECK_THROWS_AS(tilt_density(p, 0), std::invalid_argument);
}

TEST_CASE("tilt normalizer bounds and oracle") {
  const PowerLawDensity p(3.0, 1);
  for (int n : {1, 2, 3, 5, 10, 50}) {
    const auto q = tilt_density(p, n);
    const double bound = 1.0 + std::pow((1.0 + 2.0 * n) / (1.0 + n), 2.0);
    CHECK(q.normalizer() >= 1.0);
    CHECK(q.normalizer() <= std::exp(q.alpha_n()));
    CHECK(q.normalizer() <= bound);
    CHECK(bound <= 5.0);
    CHECK(q.normalizer() <= 1.0 + tail_mass(p, n) / q.t_n());
    CHECK(rel_err(q.normalizer(), tilt_normalizer_oracle(n)) <= 1e-9);
  }
}

TEST_CASE("tilt mass identity") {
  for (int dim : {1, 2}) {
    const PowerLawDensity p(dim + 2.0, dim);
    for (int n : {1, 2, 4, 9}) {
      const auto q = tilt_density(p, n);
      CHECK(std::abs(tail_mass(q, 2.0 * n) * q.normalizer() - 1.0) <= 1e-8);
    }
  }
  const auto q1 = tilt_density(PowerLawDensity(3.0, 1), 1);
  CHECK(std::abs(tail_mass(q1, 2.0) - 1.0 / q1.normalizer()) <= 1e-8);
  // Tilted tail is monotone and starts at 1.
  CHECK(std::abs(tail_mass(q1, 1e-12) - 1.0) <= 1e-8);
  CHECK(tail_mass(q1, 1.5) > tail_mass(q1, 3.0));
}

TEST_CASE("tilted density integrates to one") {
  const auto q = tilt_density(PowerLawDensity(3.0, 1), 3);
  const double inner = simpson([&](double r) { return q.radial_density(r); }, 0.0, 3.0, 2000) +
                       simpson([&](double r) { return q.radial_density(r); }, 3.0, 6.0, 2000) +
                       simpson([&](double r) { return q.radial_density(r); }, 6.0, 400.0, 200000);
  CHECK(std::abs(inner + tail_mass(q, 400.0) - 1.0) <= 1e-8);
}

TEST_CASE("discretization examples") {
  const PowerLawDensity p(3.0, 1);
  const auto d = discretize_density(p, RadialGrid{100.0, 4000});
  CHECK(d.measure.total_mass() >= 1.0 - std::pow(101.0, -2.0) - 1e-12);
  CHECK(std::abs(d.measure.total_mass() + d.truncated_mass - 1.0) <= 1e-10);
  CHECK(rel_err(d.truncated_mass, std::pow(101.0, -2.0)) <= 1e-12);

  const auto q1 = tilt_density(p, 1);
  const auto dq = discretize_density(q1, RadialGrid{default_radius(q1), 2000});
  CHECK(std::abs(dq.measure.total_mass() - 1.0) <= 1e-5);
  CHECK(dq.measure.normalized().is_probability());

  const auto single = discretize_density(p, RadialGrid{1.0, 1});
  CHECK(single.measure.size() == 1);
  CHECK(single.measure.atom(0) == Vec{0.0});
  CHECK(rel_err(single.measure.total_mass(), 1.0 - 0.25) <= 1e-12);

  CHECK_THROWS_AS(discretize_density(p, RadialGrid{0.0, 10}), std::invalid_argument);
  CHECK_THROWS_AS(discretize_density(p, RadialGrid{10.0, 0}), std::invalid_argument);
}

TEST_CASE("two-dimensional discretization carries exact cell masses") {
  const PowerLawDensity p(4.0, 2);
  const auto d = discretize_density(p, RadialGrid{50.0, 100, 1.0, 32});
  CHECK(std::abs(d.measure.total_mass() - (1.0 - tail_mass(p, 50.0))) <= 1e-10);
  CHECK(std::abs(d.measure.total_mass() - tail_mass(d.measure, 50.0) - (1.0 - tail_mass(p, 50.0))) <= 1e-10);
}

TEST_CASE("default radius meets the requested tail") {
  for (int dim : {1, 2}) {
    const PowerLawDensity p(dim + 2.0, dim);
    const double r = default_radius(p);
    CHECK(tail_mass(p, r) <= 1e-6);
    CHECK(tail_mass(p, 0.9 * r) > 1e-6);
    const auto q = tilt_density(p, 4);
    CHECK(tail_mass(q, default_radius(q)) <= 1e-6);
  }
}

TEST_CASE("discretization converges within the reported error") {
  const PowerLawDensity p(3.0, 1);
  const auto spec = KernelSpec::gaussian(1.0, 1);
  for (int cells : {200, 400, 800}) {
    const auto coarse = discretize_density(p, RadialGrid{100.0, cells});
    const auto fine = discretize_density(p, RadialGrid{100.0, 2 * cells});
    // sup |∂²κ| = 1/σ² for the Gaussian.
    for (double x : {0.0, 0.3, 2.0, 10.0}) {
      const double diff = std::abs(kernel_mass(spec, coarse.measure, Vec{x}).value -
                                   kernel_mass(spec, fine.measure, Vec{x}).value);
      CHECK(diff <= 4.0 * coarse.quadrature_error);
    }
  }
}
