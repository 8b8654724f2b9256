#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <random>

#include "driftlab/cli.hpp"
#include "driftlab/counterexamples.hpp"
#include "driftlab/field.hpp"
#include "driftlab/identities.hpp"
#include "driftlab/report.hpp"
#include "driftlab/stability.hpp"

namespace driftlab::cli {

namespace {

struct Context {
  const RunConfig& config;
  const CommonOptions& options;
  std::ostream& log;
};

DiscreteMeasure config_measure(const RunConfig& config, const char* key, int dim) {
  const std::string text = config.text_field(key);
  try {
    return parse_measure(text, dim, config.base_dir);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(fmt::format("config field '{}': {}", key, e.what()));
  }
}

std::vector<DiscreteMeasure> config_measure_list(const RunConfig& config, const char* key, int dim) {
  const YAML::Node node = config.root[key];
  if (!node || !node.IsSequence()) throw ConfigError(fmt::format("config field '{}' must be a list of measures", key));
  std::vector<DiscreteMeasure> out;
  for (const auto& item : node) {
    const std::string text = item.as<std::string>();
    try {
      out.push_back(parse_measure(text, dim, config.base_dir));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(fmt::format("config field '{}': {}", key, e.what()));
    }
  }
  return out;
}

std::vector<int> config_int_list(const RunConfig& config, const char* key) {
  std::vector<int> out;
  for (double v : config.vector(key)) {
    if (v != std::floor(v)) throw ConfigError(fmt::format("config field '{}' must hold integers", key));
    out.push_back(static_cast<int>(v));
  }
  return out;
}

/// `points` when given, otherwise a lattice of half-width `grid_half_width` and spacing `grid_spacing`.
std::vector<Vec> config_grid(const RunConfig& config, int dim, double half_width, double spacing) {
  if (config.has("points")) return config.points("points", dim);
  half_width = config.number_or("grid_half_width", half_width);
  spacing = config.number_or("grid_spacing", spacing);
  if (!(half_width > 0.0) || !(spacing > 0.0)) throw ConfigError("grid_half_width and grid_spacing must be positive");
  const int per_axis = static_cast<int>(std::lround(2.0 * half_width / spacing)) + 1;
  return lattice(dim, -half_width, half_width, per_axis);
}

std::vector<Vec> satellite_positions(const RunConfig& config, int dim, int default_count) {
  if (config.has("positions")) return config.points("positions", dim);
  Vec direction(dim, 0.0);
  direction[0] = 1.0;
  if (config.has("satellite_direction")) direction = config.vector("satellite_direction");
  if (static_cast<int>(direction.size()) != dim) throw ConfigError("config field 'satellite_direction': wrong dimension");
  const double spacing = config.number_or("satellite_spacing", 4.0);
  const int count = config.integer_or("count", default_count);
  if (count < 1) throw ConfigError("config field 'count' must be positive");
  std::vector<Vec> out;
  for (int n = 1; n <= count; ++n) out.push_back(scaled(direction, spacing * n));
  return out;
}

nlohmann::json stamp(const Context& ctx, const char* command) {
  return {{"command", command}, {"config_hash", fmt::format("{:016x}", ctx.config.hash)}};
}

void write_text(const Context& ctx, const std::string& name, const std::function<void(std::ostream&)>& body) {
  std::filesystem::create_directories(ctx.options.out_dir);
  const auto path = ctx.options.out_dir / name;
  std::ofstream out(path);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  body(out);
}

void write_json(const Context& ctx, const std::string& name, const nlohmann::json& j) {
  write_text(ctx, name, [&](std::ostream& out) { out << j.dump(2) << '\n'; });
}

int report_assertions(const Context& ctx, const ExperimentReport& rep) {
  for (const Assertion& a : rep.assertions) {
    if (!a.pass) ctx.log << fmt::format("FAIL {}: {}\n", a.name, a.detail);
  }
  ctx.log << fmt::format("{}: {} rows, {}\n", rep.name, rep.rows.size(), rep.pass() ? "PASS" : "FAIL");
  return rep.pass() ? kExitPass : kExitFail;
}

// ---------------------------------------------------------------------------

int cmd_identities(const Context& ctx) {
  const RunConfig& config = ctx.config;
  const KernelSpec spec = config_kernel(config);
  const int dim = spec.dim();
  std::vector<DiscreteMeasure> measures;
  if (config.has("measures")) {
    measures = config_measure_list(config, "measures", dim);
  } else {
    measures.push_back(config_measure(config, "measure", dim));
  }
  if (measures.empty()) throw ConfigError("config field 'measures' is empty");

  std::vector<Vec> points;
  const std::uint64_t seed = config.seed(ctx.options, 1);
  if (config.has("points")) {
    points = config.points("points", dim);
  } else {
    const int count = config.integer_or("random_points", 10);
    if (count < 1) throw ConfigError("config field 'random_points' must be positive");
    Vec lo(dim, 1e300);
    Vec hi(dim, -1e300);
    for (std::size_t i = 0; i < measures[0].size(); ++i) {
      for (int k = 0; k < dim; ++k) {
        lo[k] = std::min(lo[k], measures[0].coordinate(k)[i]);
        hi[k] = std::max(hi[k], measures[0].coordinate(k)[i]);
      }
    }
    std::mt19937_64 rng(seed);
    for (int i = 0; i < count; ++i) {
      Vec x(dim);
      for (int k = 0; k < dim; ++k) {
        x[k] = std::uniform_real_distribution<double>(lo[k] - 2.0 * spec.scale(), hi[k] + 2.0 * spec.scale())(rng);
      }
      points.push_back(std::move(x));
    }
  }

  std::vector<std::string> checks = {"gradient_identity", "elliptic_identity", "gradient_bound", "spectral",
                                     "field_axioms"};
  if (config.has("checks")) {
    checks.clear();
    for (const auto& item : config.root["checks"]) checks.push_back(item.as<std::string>());
  }
  const double h_grad = config.number_or("h_gradient", default_gradient_step(spec));
  const double h_lap = config.number_or("h_laplacian", default_laplacian_step(spec));
  if (!(h_grad > 0.0) || !(h_lap > 0.0)) throw ConfigError("finite-difference steps must be positive");

  std::vector<Vec> xi;
  if (config.has("xi")) {
    const YAML::Node node = config.root["xi"];
    for (const auto& item : node) {
      Vec v = item.IsSequence() ? item.as<std::vector<double>>() : Vec{item.as<double>()};
      if (static_cast<int>(v.size()) != dim) throw ConfigError("config field 'xi': wrong dimension");
      xi.push_back(std::move(v));
    }
  } else {
    for (double v : {0.0, 0.5, 1.0, 2.0, 5.0}) {
      Vec f(dim, 0.0);
      f[0] = v;
      xi.push_back(std::move(f));
    }
  }

  std::vector<VerifierReport> reports;
  auto skipped = [](std::string name, std::string reason) {
    VerifierReport r;
    r.check_name = std::move(name);
    r.skipped = true;
    r.pass = true;
    r.criterion = "not applicable";
    r.note = std::move(reason);
    return r;
  };
  for (const std::string& check : checks) {
    if (check == "gradient_identity") {
      for (const auto& m : measures) reports.push_back(check_gradient_identity(spec, m, points, h_grad));
    } else if (check == "elliptic_identity") {
      for (const auto& m : measures) reports.push_back(check_elliptic_identity(spec, m, points, h_lap));
    } else if (check == "gradient_bound") {
      if (spec.family() != KernelFamily::laplace) {
        reports.push_back(skipped(check, "gradient bound applies to the Laplace kernel only"));
      } else {
        for (const auto& m : measures) reports.push_back(check_gradient_bound(spec, m, points));
      }
    } else if (check == "spectral") {
      reports.push_back(check_spectral(spec, xi));
    } else if (check == "field_axioms") {
      if (measures.size() < 2) {
        reports.push_back(skipped(check, "needs two measures"));
      } else {
        reports.push_back(check_field_axioms(spec, measures[0], measures[1], points));
      }
    } else {
      throw ConfigError(fmt::format("config field 'checks': unknown check '{}'", check));
    }
  }

  nlohmann::json out = stamp(ctx, "identities");
  out["kernel"] = spec.to_string();
  out["seed"] = seed;
  bool pass = true;
  for (const VerifierReport& r : reports) {
    out["reports"].push_back(to_json(r));
    pass &= r.pass;
    ctx.log << fmt::format("{:<18} {} max_rel={:.3g} tol={:.0e}{}\n", r.check_name,
                           r.skipped ? "SKIP" : (r.pass ? "PASS" : "FAIL"), r.max_rel_error, r.tolerance,
                           r.note.empty() ? "" : " (" + r.note + ")");
  }
  out["pass"] = pass;
  write_json(ctx, "identities.json", out);
  return pass ? kExitPass : kExitFail;
}

int cmd_satellite(const Context& ctx) {
  const RunConfig& config = ctx.config;
  const KernelSpec spec = config_kernel(config);
  SatelliteSchedule schedule;
  schedule.base = config_measure(config, "base", spec.dim());
  schedule.eps = config.number_or("eps", 0.3);
  schedule.satellite_positions = satellite_positions(config, spec.dim(), 8);
  schedule.compact_grid = config_grid(config, spec.dim(), 5.0, 0.1);
  try {
    schedule.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  ExperimentReport rep = satellite_experiment(spec, schedule, ctx.options.threads);
  write_text(ctx, "satellite.csv", [&](std::ostream& out) { write_csv(out, rep); });
  nlohmann::json j = stamp(ctx, "satellite");
  j.update(to_json(rep));
  write_json(ctx, "satellite.json", j);
  return report_assertions(ctx, rep);
}

int cmd_tilt(const Context& ctx) {
  const RunConfig& config = ctx.config;
  const KernelSpec spec = config_kernel(config);
  TiltSchedule schedule;
  schedule.dim = spec.dim();
  schedule.m = config.number_or("m", spec.dim() + 2.0);
  schedule.n_values = config.has("n_values") ? config_int_list(config, "n_values") : std::vector<int>{2, 4, 8, 16};
  schedule.eval_grid = config_grid(config, spec.dim(), 10.0, spec.dim() == 1 ? 0.1 : 0.5);
  schedule.lambda = config.number_or("lambda", 0.5);
  schedule.seed = config.seed(ctx.options, schedule.seed);
  schedule.random_probes = config.integer_or("random_probes", 16);
  schedule.cells = config.integer_or("cells", 0);
  schedule.angles = config.integer_or("angles", 64);
  try {
    schedule.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  ExperimentReport rep = tilt_experiment(spec, schedule, ctx.options.threads);
  write_text(ctx, "tilt.csv", [&](std::ostream& out) { write_csv(out, rep); });
  nlohmann::json j = stamp(ctx, "tilt");
  j["seed"] = schedule.seed;
  j.update(to_json(rep));
  write_json(ctx, "tilt.json", j);
  return report_assertions(ctx, rep);
}

int cmd_field(const Context& ctx) {
  const RunConfig& config = ctx.config;
  const KernelSpec spec = config_kernel(config);
  const DiscreteMeasure p = config_measure(config, "p", spec.dim());
  const DiscreteMeasure q = config_measure(config, "q", spec.dim());
  const auto grid = config_grid(config, spec.dim(), 5.0, 0.1);
  const GridReport rep = field_grid_report(spec, p, q, grid, ctx.options.threads);
  write_text(ctx, "field.csv", [&](std::ostream& out) { write_grid_csv(out, rep); });
  nlohmann::json j = stamp(ctx, "field");
  j["kernel"] = spec.to_string();
  j["points"] = grid.size();
  j["sup_norm"] = rep.sup_norm;
  j["argmax_point"] = rep.argmax_point;
  write_json(ctx, "field.json", j);
  ctx.log << fmt::format("field: {} points, sup |V| = {:.17g}\n", grid.size(), rep.sup_norm);
  return kExitPass;
}

int cmd_anchor(const Context& ctx) {
  const RunConfig& config = ctx.config;
  const KernelSpec spec = config_kernel(config);
  const int dim = spec.dim();
  const DiscreteMeasure p = config_measure(config, "target", dim);
  std::vector<DiscreteMeasure> sequence;
  const std::string kind = config.text_or("sequence_type", "satellite");
  if (kind == "satellite") {
    const double eps = config.number_or("eps", 0.3);
    for (const Vec& z : satellite_positions(config, dim, 10)) sequence.push_back(satellite(p, eps, z));
  } else if (kind == "list") {
    sequence = config_measure_list(config, "sequence", dim);
  } else {
    throw ConfigError(fmt::format("config field 'sequence_type': unknown kind '{}'", kind));
  }
  AnchorKind observable_kind;
  try {
    observable_kind = parse_anchor_kind(config.text_or("observable", "overlap"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(fmt::format("config field 'observable': {}", e.what()));
  }
  Vec point(dim, 0.0);
  if (config.has("anchor_point")) point = config.vector("anchor_point");
  const AnchorObservable observable = AnchorObservable::make(observable_kind, spec, p, point);
  const double tol = config.number_or("tol", 1e-6);
  const int window = config.integer_or("window", 0);
  if (window < 0) throw ConfigError("config field 'window' must be non-negative");
  const AnchorVerdict verdict = anchor_check(spec, p, sequence, observable, tol, static_cast<std::size_t>(window));

  write_text(ctx, "anchor.csv", [&](std::ostream& out) {
    out << "n,value\n";
    for (std::size_t i = 0; i < verdict.trajectory.size(); ++i) {
      out << fmt::format("{},{:.17g}\n", i + 1, verdict.trajectory[i]);
    }
  });
  const std::string label = verdict.pass ? "PASS" : "FAIL";
  nlohmann::json j = stamp(ctx, "anchor");
  j["observable"] = verdict.observable;
  j["verdict"] = label;
  j["proxy"] = verdict.proxy;
  j["reference_value"] = verdict.reference_value;
  j["tol"] = verdict.tol;
  j["window"] = verdict.window;
  j["trajectory"] = verdict.trajectory;
  int code = verdict.pass ? kExitPass : kExitFail;
  if (config.has("expect")) {
    const std::string expect = config.text_field("expect");
    if (expect != "PASS" && expect != "FAIL") throw ConfigError("config field 'expect' must be PASS or FAIL");
    j["expect"] = expect;
    code = expect == label ? kExitPass : kExitFail;
  }
  write_json(ctx, "anchor.json", j);
  ctx.log << fmt::format("anchor ({}): {} proxy={:.17g} reference={:.17g} window={}\n", verdict.observable, label,
                         verdict.proxy, verdict.reference_value, verdict.window);
  return code;
}

int cmd_simulate(const Context& ctx) {
  const RunConfig& config = ctx.config;
  const KernelSpec spec = config_kernel(config);
  const int dim = spec.dim();
  const DiscreteMeasure p = config_measure(config, "target", dim);
  std::vector<Vec> particles;
  const std::uint64_t seed = config.seed(ctx.options, 1);
  if (config.has("particles")) {
    particles = config.points("particles", dim);
  } else if (config.has("particle_start")) {
    const Vec start = config.vector("particle_start");
    if (static_cast<int>(start.size()) != dim) throw ConfigError("config field 'particle_start': wrong dimension");
    particles.assign(static_cast<std::size_t>(config.integer_or("particle_count", 1)), start);
  } else {
    const int count = config.integer_or("particle_count", 64);
    const double lo = config.number_or("particle_lo", -5.0);
    const double hi = config.number_or("particle_hi", 5.0);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(lo, hi);
    for (int i = 0; i < count; ++i) {
      Vec x(dim);
      for (double& v : x) v = uniform(rng);
      particles.push_back(std::move(x));
    }
  }
  if (particles.empty()) throw ConfigError("no particles configured");
  SimulationOptions options;
  options.steps = config.integer_or("steps", 10);
  options.step_size = config.number_or("step_size", 0.5);
  options.threads = ctx.options.threads;
  if (config.has("anchors")) options.anchors = config.points("anchors", dim);
  if (config.has("grid_half_width")) options.diagnostic_grid = config_grid(config, dim, 5.0, 0.1);
  if (options.steps < 0) throw ConfigError("config field 'steps' must be non-negative");
  if (!(options.step_size > 0.0 && options.step_size <= 1.0)) throw ConfigError("config field 'step_size' must lie in (0, 1]");

  const Simulation sim = drift_simulate(spec, p, particles, options);
  write_text(ctx, "trajectory.csv", [&](std::ostream& out) { write_trajectory_csv(out, sim); });
  write_text(ctx, "diagnostics.csv", [&](std::ostream& out) { write_diagnostics_csv(out, sim); });
  nlohmann::json j = stamp(ctx, "simulate");
  j["seed"] = seed;
  j["particles"] = particles.size();
  j["steps"] = options.steps;
  j["step_size"] = options.step_size;
  j["final_overlap"] = sim.diagnostics.back().overlap;
  j["final_field_sup"] = sim.diagnostics.back().field_sup;
  write_json(ctx, "simulate.json", j);
  ctx.log << fmt::format("simulate: {} particles, {} steps, final field sup {:.17g}\n", particles.size(),
                         options.steps, sim.diagnostics.back().field_sup);
  return kExitPass;
}

using Command = int (*)(const Context&);

const std::map<std::string, Command, std::less<>>& commands() {
  static const std::map<std::string, Command, std::less<>> table = {
      {"identities", cmd_identities}, {"satellite", cmd_satellite}, {"tilt", cmd_tilt},
      {"field", cmd_field},           {"anchor", cmd_anchor},       {"simulate", cmd_simulate}};
  return table;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"identities", "satellite", "tilt", "field", "anchor", "simulate"};
  return names;
}

int run_command(std::string_view command, const CommonOptions& options, std::ostream& log) {
  const auto it = commands().find(command);
  if (it == commands().end()) {
    log << fmt::format("error: unknown command '{}'\n", command);
    return kExitUsage;
  }
  if (options.threads < 1) {
    log << "error: --threads must be at least 1\n";
    return kExitUsage;
  }
  try {
    const RunConfig config = load_config(options.config_path);
    const Context ctx{config, options, log};
    return it->second(ctx);
  } catch (const ConfigError& e) {
    log << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const YAML::Exception& e) {
    log << "error: config: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    log << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitFail;
  }
}

}  // namespace driftlab::cli
