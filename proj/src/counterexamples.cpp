#include "driftlab/counterexamples.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include "driftlab/field.hpp"
#include "quadrature.hpp"

namespace driftlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<Vec> spaced_lattice(int dim, double half_width, double spacing) {
  const int per_axis = static_cast<int>(std::lround(2.0 * half_width / spacing)) + 1;
  return lattice(dim, -half_width, half_width, per_axis);
}

double grid_radius(const std::vector<Vec>& grid) {
  double r = 0.0;
  for (const Vec& x : grid) r = std::max(r, norm(x));
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// Satellite

void SatelliteSchedule::validate() const {
  if (!base.is_probability()) throw std::invalid_argument("satellite schedule: base must be a probability");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("satellite schedule: eps must lie in (0, 1)");
  if (satellite_positions.empty()) throw std::invalid_argument("satellite schedule: no satellite positions");
  if (compact_grid.empty()) throw std::invalid_argument("satellite schedule: empty compact grid");
  double previous = -1.0;
  for (const Vec& z : satellite_positions) {
    if (static_cast<int>(z.size()) != base.dim()) {
      throw std::invalid_argument("satellite schedule: position dimension mismatch");
    }
    const double r = norm(z);
    if (!(r > previous)) {
      throw std::invalid_argument("satellite schedule: satellite norms must be strictly increasing");
    }
    previous = r;
  }
  for (const Vec& x : compact_grid) {
    if (static_cast<int>(x.size()) != base.dim()) {
      throw std::invalid_argument("satellite schedule: grid dimension mismatch");
    }
  }
}

std::vector<Vec> default_compact_grid(int dim) { return spaced_lattice(dim, 5.0, 0.1); }

Vec satellite_delta_closed_form(const KernelSpec& spec, const DiscreteMeasure& p, double eps,
                                std::span<const double> z, std::span<const double> x) {
  if (!p.is_probability()) throw std::invalid_argument("satellite delta: p must be a probability");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("satellite delta: eps must lie in (0, 1)");
  const LocalAverage local = local_average(spec, p, x);
  const Vec offset = subtract(z, x);
  const double log_sat = std::log(eps) + kernel_log_eval(spec, offset);
  const double log_base = std::log1p(-eps) + local.log_mass;
  const double coefficient = 1.0 / (1.0 + std::exp(log_base - log_sat));
  Vec zv(z.begin(), z.end());
  return scaled(subtract(zv, local.barycenter), coefficient);
}

ExperimentReport satellite_experiment(const KernelSpec& spec, const SatelliteSchedule& schedule,
                                      int threads) {
  schedule.validate();
  if (spec.dim() != schedule.base.dim()) throw std::invalid_argument("satellite experiment: dimension mismatch");
  const DiscreteMeasure& p = schedule.base;
  const auto& grid = schedule.compact_grid;
  const double radius = grid_radius(grid);
  const double eps = schedule.eps;

  // c_K = min u_p and A_K = max |a_p - x| over the grid.
  double log_c = kInf;
  double a_max = 0.0;
  for (const Vec& x : grid) {
    const LocalAverage local = local_average(spec, p, x);
    log_c = std::min(log_c, local.log_mass);
    a_max = std::max(a_max, norm(subtract(local.barycenter, x)));
  }

  ExperimentReport rep;
  rep.name = "satellite";
  rep.columns = {"n", "z_norm", "sup_V_grid", "tail_mass", "analytic_bound", "inside_compact"};
  rep.meta = {{"kernel", spec.to_string()}, {"eps", eps},         {"grid_points", grid.size()},
              {"grid_radius", radius},     {"c_K", std::exp(log_c)}, {"A_K", a_max}};

  std::vector<double> outside_sups;
  double min_tail = kInf;
  for (std::size_t i = 0; i < schedule.satellite_positions.size(); ++i) {
    const Vec& z = schedule.satellite_positions[i];
    const int n = static_cast<int>(i) + 1;
    const DiscreteMeasure q = satellite(p, eps, z);
    const double sup = field_grid_report(spec, p, q, grid, threads).sup_norm;
    const double tail = tail_mass(q, radius);

    double log_peak = -kInf;
    for (const Vec& x : grid) {
      const Vec d = subtract(x, z);
      log_peak = std::max(log_peak, std::log(norm(d) + a_max) + kernel_log_eval(spec, d));
    }
    const double bound = std::exp(std::log(eps) - std::log1p(-eps) - log_c + log_peak);
    const bool inside = norm(z) <= radius;
    rep.rows.push_back({double(n), norm(z), sup, tail, bound, inside ? 1.0 : 0.0});

    if (inside) {
      rep.meta["flags"].push_back(fmt::format("n={}: satellite inside compact set", n));
      continue;
    }
    rep.assert_that(fmt::format("n={} sup within bound", n), sup <= bound + 1e-10,
                    fmt::format("sup {:.17g}, bound {:.17g}", sup, bound));
    rep.assert_that(fmt::format("n={} tail equals eps", n), tail == eps,
                    fmt::format("tail {:.17g}", tail));
    outside_sups.push_back(sup);
    min_tail = std::min(min_tail, tail);
  }

  if (outside_sups.empty()) {
    rep.assert_that("satellite leaves the compact set", false, "every satellite lies inside the grid radius");
    return rep;
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < outside_sups.size(); ++i) decreasing &= outside_sups[i] < outside_sups[i - 1];
  rep.assert_that("sup strictly decreasing", decreasing);
  rep.assert_that("field decays while tail mass stays",
                  outside_sups.back() <= 0.2 * outside_sups.front() && min_tail >= eps,
                  fmt::format("final/initial {:.6g}, min tail {:.17g}",
                              outside_sups.back() / outside_sups.front(), min_tail));
  return rep;
}

// ---------------------------------------------------------------------------
// Tilt

void TiltSchedule::validate() const {
  if (dim != 1 && dim != 2) throw std::invalid_argument("tilt schedule: dim must be 1 or 2");
  if (!(m > dim)) throw std::invalid_argument("tilt schedule: m must exceed dim");
  if (n_values.empty()) throw std::invalid_argument("tilt schedule: n_values is empty");
  for (std::size_t i = 0; i < n_values.size(); ++i) {
    if (n_values[i] < 1) throw std::invalid_argument("tilt schedule: n_values must be positive");
    if (i > 0 && n_values[i] <= n_values[i - 1]) {
      throw std::invalid_argument("tilt schedule: n_values must be strictly increasing");
    }
  }
  if (eval_grid.empty()) throw std::invalid_argument("tilt schedule: empty evaluation grid");
  for (const Vec& x : eval_grid) {
    if (static_cast<int>(x.size()) != dim) throw std::invalid_argument("tilt schedule: grid dimension mismatch");
  }
  if (!(lambda > 0.0)) throw std::invalid_argument("tilt schedule: lambda must be positive");
  if (random_probes < 0 || cells < 0 || angles < 1) {
    throw std::invalid_argument("tilt schedule: probe and cell counts must be non-negative");
  }
}

std::vector<Vec> default_tilt_grid(int dim) {
  return dim == 1 ? spaced_lattice(1, 10.0, 0.1) : spaced_lattice(dim, 10.0, 0.5);
}

double exp_moment_limit(const KernelSpec& spec) {
  return spec.family() == KernelFamily::gaussian ? kInf : 1.0 / spec.scale();
}

namespace {

struct Quadrature {
  double value = 0.0;
  double error = 0.0;
  double l1 = 0.0;

  template <class F>
  void add(F f, double a, double b) {
    if (!(b > a)) return;
    double err = 0.0;
    double l1_piece = 0.0;
    if (std::isfinite(a) && std::isfinite(b)) {
      value += detail::integrate_finite<31>(f, a, b, 15, 1e-12, &err, &l1_piece);
    } else {
      value += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, 1e-12, &err, &l1_piece);
    }
    error += err;
    l1 += l1_piece;
  }

  void check(const char* what) const {
    if (!std::isfinite(value) || !(error <= 1e-8 * l1 + 1e-300)) {
      throw std::runtime_error(fmt::format("exp_moment: {} quadrature diverged (value {}, error {})", what,
                                           value, error));
    }
  }
};

// ∫ w(s) ρ(x + s) ds with w(s) = |s|^j e^{λ|s|} κ(s), as numerator/denominator pair.
std::pair<double, double> local_moment_1d(const KernelSpec& spec, const PowerLawDensity& base,
                                          double lambda, int j, double x) {
  auto weight = [&](double s, double lam, int power) {
    if (!std::isfinite(s)) return 0.0;
    const double r = std::abs(s);
    const double w = std::exp(kernel_log_profile(spec, r) + lam * r);
    return (power == 0 ? w : w * std::pow(r, power)) * base.density(std::abs(x + s));
  };
  const double lo = std::min(0.0, -x);
  const double hi = std::max(0.0, -x);
  Quadrature num;
  Quadrature den;
  for (auto* q : {&num, &den}) {
    const double lam = q == &num ? lambda : 0.0;
    const int power = q == &num ? j : 0;
    auto f = [&](double s) { return weight(s, lam, power); };
    q->add(f, -kInf, lo);
    q->add(f, lo, hi);
    q->add(f, hi, kInf);
  }
  num.check("moment");
  den.check("normalizer");
  return {num.value, den.value};
}

std::pair<double, double> local_moment_2d(const KernelSpec& spec, const PowerLawDensity& base,
                                          double lambda, int j, const Vec& x) {
  constexpr int kAngles = 256;
  const double rx = norm(x);
  auto angular = [&](double s) {
    double sum = 0.0;
    for (int k = 0; k < kAngles; ++k) {
      const double theta = 2.0 * std::numbers::pi * (k + 0.5) / kAngles;
      const double y0 = x[0] + s * std::cos(theta);
      const double y1 = x[1] + s * std::sin(theta);
      sum += base.density(std::hypot(y0, y1));
    }
    return sum * 2.0 * std::numbers::pi / kAngles;
  };
  Quadrature num;
  Quadrature den;
  for (auto* q : {&num, &den}) {
    const double lam = q == &num ? lambda : 0.0;
    const int power = q == &num ? j : 0;
    auto f = [&](double s) {
      if (!std::isfinite(s)) return 0.0;
      const double w = std::exp(kernel_log_profile(spec, s) + lam * s) * s;
      return (power == 0 ? w : w * std::pow(s, power)) * angular(s);
    };
    q->add(f, 0.0, rx);
    q->add(f, rx, kInf);
  }
  num.check("moment");
  den.check("normalizer");
  return {num.value, den.value};
}

}  // namespace

std::vector<double> exp_moment_values(const KernelSpec& spec, const PowerLawDensity& base,
                                      double lambda, int j, const std::vector<Vec>& probe_points) {
  if (!(lambda > 0.0) || !(lambda < exp_moment_limit(spec))) {
    throw std::invalid_argument(fmt::format("exp_moment: lambda = {} outside (0, {})", lambda,
                                            exp_moment_limit(spec)));
  }
  if (j < 0 || j > 2) throw std::invalid_argument("exp_moment: j must be 0, 1 or 2");
  if (spec.dim() != base.dim()) throw std::invalid_argument("exp_moment: dimension mismatch");
  if (probe_points.empty()) throw std::invalid_argument("exp_moment: no probe points");
  std::vector<double> values;
  values.reserve(probe_points.size());
  for (const Vec& x : probe_points) {
    if (static_cast<int>(x.size()) != base.dim()) throw std::invalid_argument("exp_moment: probe dimension");
    const auto [num, den] =
        base.dim() == 1 ? local_moment_1d(spec, base, lambda, j, x[0]) : local_moment_2d(spec, base, lambda, j, x);
    values.push_back(num / den);
  }
  return values;
}

double exp_moment(const KernelSpec& spec, const PowerLawDensity& base, double lambda, int j,
                  const std::vector<Vec>& probe_points) {
  const auto values = exp_moment_values(spec, base, lambda, j, probe_points);
  return *std::max_element(values.begin(), values.end());
}

std::vector<Vec> moment_probes(int dim, int n, int count, std::uint64_t seed) {
  std::vector<Vec> probes;
  for (double c : {0.0, 1.0, -1.0, 2.0, -2.0, 10.0, -10.0}) {
    Vec x(dim, 0.0);
    x[0] = c * n;
    probes.push_back(std::move(x));
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(-10.0 * n, 10.0 * n);
  for (int i = 0; i < count; ++i) {
    Vec x(dim);
    for (double& v : x) v = uniform(rng);
    probes.push_back(std::move(x));
  }
  return probes;
}

ExperimentReport tilt_experiment(const KernelSpec& spec, const TiltSchedule& schedule, int threads) {
  schedule.validate();
  if (spec.dim() != schedule.dim) throw std::invalid_argument("tilt experiment: kernel dimension mismatch");
  if (!(schedule.lambda < exp_moment_limit(spec))) {
    throw std::invalid_argument(fmt::format("tilt experiment: lambda = {} not below the kernel tail rate {}",
                                            schedule.lambda, exp_moment_limit(spec)));
  }
  const PowerLawDensity base(schedule.m, schedule.dim);
  const TailConstants tc = base.tail_constants();
  const double c_star = tc.c_plus / tc.c_minus * std::pow(2.0, schedule.m - schedule.dim);
  const double tail_floor = 1.0 / (1.0 + c_star);
  const double tol = schedule.dim == 1 ? 1e-6 : 1e-4;
  const int cells = schedule.cells > 0 ? schedule.cells : (schedule.dim == 1 ? 4000 : 400);

  ExperimentReport rep;
  rep.name = "tilt";
  rep.columns = {"n", "alpha_n", "alpha_over_n", "Z_n", "sup_V_grid", "tail_mass", "analytic_bound"};
  rep.meta = {{"kernel", spec.to_string()}, {"m", schedule.m},           {"dim", schedule.dim},
              {"lambda", schedule.lambda},  {"C_star", c_star},           {"tail_floor", tail_floor},
              {"cells", cells},             {"grid_points", schedule.eval_grid.size()}};

  double min_tail = kInf;
  for (int n : schedule.n_values) {
    const TiltedDensity q(base, n);
    const double r_max = std::max(default_radius(base), default_radius(q));
    const RadialGrid grid{r_max, cells, 1.0, schedule.angles};
    const Discretization p_disc = discretize_density(base, grid);
    const Discretization q_disc = discretize_density(q, grid);
    const double sup = field_grid_report(spec, p_disc.measure.normalized(), q_disc.measure.normalized(),
                                         schedule.eval_grid, threads)
                           .sup_norm;

    const auto probes = moment_probes(schedule.dim, n, schedule.random_probes, schedule.seed + n);
    const auto m1 = exp_moment_values(spec, base, schedule.lambda, 1, probes);
    const auto m2 = exp_moment_values(spec, base, schedule.lambda, 2, probes);
    const double M1 = *std::max_element(m1.begin(), m1.end());
    const double M2 = *std::max_element(m2.begin(), m2.end());
    const double C = std::exp(schedule.lambda * M1) * (M2 + M1 * M1);
    const double lip = q.lipschitz();
    const double bound = C * lip;
    const double tail = q.tail(2.0 * n);
    rep.rows.push_back({double(n), q.alpha_n(), lip, q.normalizer(), sup, tail, bound});

    const bool applies = lip <= schedule.lambda;
    rep.meta["rows"].push_back({{"n", n},
                                {"t_n", q.t_n()},
                                {"M1", M1},
                                {"M2", M2},
                                {"C", C},
                                {"M1_probe_min", *std::min_element(m1.begin(), m1.end())},
                                {"bound_applies", applies},
                                {"r_max", r_max},
                                {"truncated_mass_q", q_disc.truncated_mass},
                                {"quadrature_error_q", q_disc.quadrature_error}});

    rep.assert_that(fmt::format("n={} tail times Z_n is 1", n), std::abs(tail * q.normalizer() - 1.0) <= tol,
                    fmt::format("tail*Z_n - 1 = {:.3g}", tail * q.normalizer() - 1.0));
    rep.assert_that(fmt::format("n={} tail above 1/(1+C*)", n), tail >= tail_floor,
                    fmt::format("tail {:.17g}, floor {:.17g}", tail, tail_floor));
    if (applies) {
      rep.assert_that(fmt::format("n={} sup within C Lip", n), sup <= bound + 1e-10,
                      fmt::format("sup {:.17g}, bound {:.17g}", sup, bound));
    }
    min_tail = std::min(min_tail, tail);
  }

  const double first = rep.rows.front()[4];
  const double last = rep.rows.back()[4];
  rep.assert_that("field decays while tail mass stays", last <= 0.2 * first && min_tail >= tail_floor,
                  fmt::format("final/initial {:.6g}, min tail {:.17g}", last / first, min_tail));
  return rep;
}

}  // namespace driftlab
