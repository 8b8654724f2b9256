#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include "driftlab/cli.hpp"
#include "driftlab/grammar.hpp"
#include "driftlab/report.hpp"

namespace driftlab::cli {

namespace {

YAML::Node field(const YAML::Node& root, const char* key) {
  const YAML::Node node = root[key];
  if (!node) throw ConfigError(fmt::format("config field '{}' is missing", key));
  return node;
}

template <class T>
T scalar(const YAML::Node& node, const char* key) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(fmt::format("config field '{}' has the wrong type", key));
  }
}

Vec to_vec(const YAML::Node& node, const char* key) {
  if (node.IsScalar()) return {scalar<double>(node, key)};
  if (!node.IsSequence()) throw ConfigError(fmt::format("config field '{}' must be a number or a list", key));
  Vec v;
  for (const auto& item : node) v.push_back(scalar<double>(item, key));
  return v;
}

int dimension_of(double raw, const char* what) {
  if (raw != std::floor(raw) || raw < 1) throw std::invalid_argument(fmt::format("{}: dim must be a positive integer", what));
  return static_cast<int>(raw);
}

RadialGrid density_grid(const CallExpr& call, int dim, double default_r_max) {
  RadialGrid grid;
  grid.r_max = call.number_or("r_max", default_r_max);
  grid.cells = static_cast<int>(call.number_or("cells", dim == 1 ? 2000 : 200));
  grid.angles = static_cast<int>(call.number_or("angles", 64));
  return grid;
}

int call_dim(const CallExpr& call, int dim, const char* what) {
  if (!call.has("dim")) return dim;
  const int d = dimension_of(call.number("dim"), what);
  if (d != dim) throw std::invalid_argument(fmt::format("{}: dim={} conflicts with config dim {}", what, d, dim));
  return d;
}

DiscreteMeasure measure_from_call(const CallExpr& call, int dim, const std::filesystem::path& base_dir) {
  if (call.name == "dirac") {
    call.expect_keys({"x"});
    Vec x = call.vector("x");
    if (static_cast<int>(x.size()) != dim) throw std::invalid_argument("dirac: point dimension mismatch");
    return DiscreteMeasure::dirac(std::move(x));
  }
  if (call.name == "atoms") {
    call.expect_keys({"file", "x", "w"});
    if (call.has("file")) {
      std::filesystem::path path = call.word("file");
      if (path.is_relative()) path = base_dir / path;
      return read_atoms_csv(path, dim);
    }
    const Vec rows = call.vector("x");
    Vec w = call.vector("w");
    return DiscreteMeasure::from_rows(dim, rows, std::move(w), true);
  }
  if (call.name == "powerlaw") {
    call.expect_keys({"m", "dim", "cells", "r_max", "angles"});
    const PowerLawDensity density(call.number("m"), call_dim(call, dim, "powerlaw"));
    return discretize_density(density, density_grid(call, dim, default_radius(density))).measure.normalized();
  }
  if (call.name == "tilt") {
    call.expect_keys({"m", "n", "dim", "cells", "r_max", "angles"});
    const double n = call.number("n");
    if (n != std::floor(n)) throw std::invalid_argument("tilt: n must be an integer");
    const TiltedDensity density(PowerLawDensity(call.number("m"), call_dim(call, dim, "tilt")), static_cast<int>(n));
    return discretize_density(density, density_grid(call, dim, default_radius(density))).measure.normalized();
  }
  if (call.name == "satellite") {
    call.expect_keys({"base", "eps", "z"});
    const DiscreteMeasure base = measure_from_call(call.call("base"), dim, base_dir);
    const Vec z = call.vector("z");
    return satellite(base, call.number("eps"), z);
  }
  throw std::invalid_argument(fmt::format("unknown measure '{}'", call.name));
}

}  // namespace

double RunConfig::number(const char* key) const { return scalar<double>(field(root, key), key); }

double RunConfig::number_or(const char* key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

int RunConfig::integer(const char* key) const { return scalar<int>(field(root, key), key); }

int RunConfig::integer_or(const char* key, int fallback) const { return has(key) ? integer(key) : fallback; }

std::string RunConfig::text_field(const char* key) const { return scalar<std::string>(field(root, key), key); }

std::string RunConfig::text_or(const char* key, std::string fallback) const {
  return has(key) ? text_field(key) : fallback;
}

Vec RunConfig::vector(const char* key) const { return to_vec(field(root, key), key); }

std::vector<Vec> RunConfig::points(const char* key, int dim) const {
  const YAML::Node node = field(root, key);
  if (!node.IsSequence()) throw ConfigError(fmt::format("config field '{}' must be a list of points", key));
  std::vector<Vec> out;
  for (const auto& item : node) {
    Vec x = to_vec(item, key);
    if (static_cast<int>(x.size()) != dim) {
      throw ConfigError(fmt::format("config field '{}': point of dimension {} in a dim {} run", key, x.size(), dim));
    }
    out.push_back(std::move(x));
  }
  return out;
}

std::uint64_t RunConfig::seed(const CommonOptions& options, std::uint64_t fallback) const {
  if (options.seed) return *options.seed;
  return has("seed") ? scalar<std::uint64_t>(root["seed"], "seed") : fallback;
}

RunConfig parse_config(std::string text, std::filesystem::path base_dir) {
  RunConfig config;
  try {
    config.root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(fmt::format("config is not valid YAML: {}", e.what()));
  }
  if (!config.root.IsMap()) throw ConfigError("config must be a mapping of fields");
  config.hash = fnv1a64(text);
  config.text = std::move(text);
  config.base_dir = std::move(base_dir);
  return config;
}

RunConfig load_config(const std::string& path) {
  if (path.empty()) throw ConfigError("--config is required");
  if (path == "-") {
    std::string text((std::istreambuf_iterator<char>(std::cin)), std::istreambuf_iterator<char>());
    return parse_config(std::move(text));
  }
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read config '{}'", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), std::filesystem::path(path).parent_path());
}

KernelSpec config_kernel(const RunConfig& config) {
  const std::string text = config.text_field("kernel");
  std::optional<int> dim;
  if (config.has("dim")) dim = config.integer("dim");
  try {
    return parse_kernel(text, dim);
  } catch (const std::exception& e) {
    throw ConfigError(fmt::format("config field 'kernel': {}", e.what()));
  }
}

DiscreteMeasure parse_measure(std::string_view text, int dim, const std::filesystem::path& base_dir) {
  return measure_from_call(parse_call(text), dim, base_dir);
}

DiscreteMeasure read_atoms_csv(const std::filesystem::path& path, int dim) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument(fmt::format("cannot read atoms file '{}'", path.string()));
  std::vector<double> rows;
  std::vector<double> weights;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> values;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        throw std::invalid_argument(fmt::format("{}:{}: '{}' is not a number", path.string(), line_no, cell));
      }
    }
    if (static_cast<int>(values.size()) != dim + 1) {
      throw std::invalid_argument(
          fmt::format("{}:{}: expected {} columns, got {}", path.string(), line_no, dim + 1, values.size()));
    }
    rows.insert(rows.end(), values.begin(), values.end() - 1);
    weights.push_back(values.back());
  }
  return DiscreteMeasure::from_rows(dim, rows, std::move(weights), true);
}

}  // namespace driftlab::cli
