#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

#include "driftlab/cli.hpp"

namespace fs = std::filesystem;
using namespace driftlab;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("driftlab_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_tool(const std::string& args) {
  const std::string cmd = std::string(DRIFTLAB_TOOL) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

int run_shipped(const std::string& command, const std::string& config, const fs::path& out) {
  return run_tool(command + " --config " + DRIFTLAB_CONFIGS + "/" + config + " --out " + out.string());
}

int run_inline(const std::string& command, const std::string& yaml, const fs::path& out, std::string* log = nullptr) {
  const fs::path cfg = out / "config.yaml";
  std::ofstream(cfg) << yaml;
  cli::CommonOptions options;
  options.config_path = cfg.string();
  options.out_dir = out.string();
  std::ostringstream sink;
  const int code = cli::run_command(command, options, sink);
  if (log) *log = sink.str();
  return code;
}

}  // namespace

TEST_CASE("shipped configs exit as documented") {
  TempDir dir;
  CHECK(run_shipped("identities", "identities.yaml", dir.path) == 0);
  CHECK(fs::exists(dir.path / "identities.json"));
  CHECK(run_shipped("satellite", "satellite.yaml", dir.path) == 0);
  CHECK(run_shipped("tilt", "tilt.yaml", dir.path) == 0);
  CHECK(run_shipped("field", "field.yaml", dir.path) == 0);
  CHECK(run_shipped("anchor", "anchor_satellite.yaml", dir.path) == 0);
  CHECK(run_shipped("simulate", "simulate.yaml", dir.path) == 0);

  const std::string sat = read_file(dir.path / "satellite.csv");
  CHECK(sat.rfind("n,z_norm,sup_V_grid,tail_mass,analytic_bound,inside_compact\n", 0) == 0);
  CHECK(std::count(sat.begin(), sat.end(), '\n') == 9);
  const auto tilt = nlohmann::json::parse(read_file(dir.path / "tilt.json"));
  CHECK(tilt["pass"] == true);
  CHECK(read_file(dir.path / "tilt.csv").rfind("n,alpha_n,alpha_over_n,Z_n,sup_V_grid,tail_mass,analytic_bound\n", 0) == 0);
  const auto anchor = nlohmann::json::parse(read_file(dir.path / "anchor.json"));
  CHECK(anchor["verdict"] == "FAIL");
}

TEST_CASE("usage errors exit 2") {
  TempDir dir;
  CHECK(run_tool("") == 2);
  CHECK(run_tool("nonsense --config x") == 2);
  CHECK(run_tool("field") == 2);
  CHECK(run_tool("field --config " + (dir.path / "missing.yaml").string()) == 2);
  CHECK(run_tool(std::string("field --config ") + DRIFTLAB_CONFIGS + "/field.yaml --threads 0") == 2);
  CHECK(run_tool("--help") == 0);

  std::string log;
  CHECK(run_inline("identities", "kernel: laplace(tau=\ndim: 1\nmeasure: dirac(x=0)\n", dir.path, &log) == 2);
  CHECK(log.find("kernel") != std::string::npos);
  CHECK(run_inline("identities", "kernel: laplace(tau=1)\ndim: 1\nmeasure: blob(x=0)\n", dir.path) == 2);
  CHECK(run_inline("tilt", "kernel: laplace(tau=1)\ndim: 1\nn_values: [4, 2]\n", dir.path) == 2);
  CHECK(run_inline("field", "kernel: laplace(tau=1)\ndim: 1\np: dirac(x=0)\n", dir.path, &log) == 2);
  CHECK(log.find("'q'") != std::string::npos);
  CHECK(run_inline("field", "- not\n- a mapping\n", dir.path) == 2);
}

TEST_CASE("identities subcommand") {
  TempDir dir;
  CHECK(run_inline("identities", "kernel: laplace(tau=1)\ndim: 1\nmeasure: dirac(x=0)\nseed: 3\nrandom_points: 5\n", dir.path) == 0);
  CHECK(run_inline("identities",
                   "kernel: gaussian(sigma=1)\ndim: 1\nmeasure: dirac(x=0)\nseed: 3\nrandom_points: 5\n"
                   "checks: [gradient_identity, gradient_bound]\n",
                   dir.path) == 0);
  const auto j = nlohmann::json::parse(read_file(dir.path / "identities.json"));
  bool skipped = false;
  for (const auto& r : j["reports"]) {
    if (r["check"] == "gradient_bound") skipped = r.value("skipped", false) && r.contains("note");
  }
  CHECK(skipped);
}

TEST_CASE("field with p equal to q has a zero field") {
  TempDir dir;
  REQUIRE(run_inline("field", "kernel: matern(nu=1.5, ell=1)\ndim: 1\np: atoms(x=[-1, 2], w=[1, 3])\n"
                              "q: atoms(x=[-1, 2], w=[1, 3])\ngrid_half_width: 3\ngrid_spacing: 0.5\n",
                     dir.path) == 0);
  std::istringstream csv(read_file(dir.path / "field.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "x_1,u_p,u_q,a_p_1,a_q_1,V_1,norm_V");
  int rows = 0;
  while (std::getline(csv, line)) {
    ++rows;
    CHECK(line.substr(line.rfind(',') + 1) == "0");
  }
  CHECK(rows == 13);
}

TEST_CASE("simulate from the target atoms does not move") {
  TempDir dir;
  REQUIRE(run_inline("simulate", "kernel: laplace(tau=1)\ndim: 1\ntarget: atoms(x=[-1, 0.5, 2], w=[1, 1, 1])\n"
                                 "particles: [[-1], [0.5], [2]]\nsteps: 3\n",
                     dir.path) == 0);
  std::istringstream csv(read_file(dir.path / "trajectory.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "step,particle,x_1");
  while (std::getline(csv, line)) {
    const auto last = line.substr(line.rfind(',') + 1);
    CHECK((last == "-1" || last == "0.5" || last == "2"));
  }
}

TEST_CASE("outputs are byte-stable and stamped with the config hash") {
  TempDir a, b;
  const std::string yaml = "kernel: laplace(tau=1)\ndim: 1\nmeasure: dirac(x=0)\nrandom_points: 4\nseed: 9\n";
  REQUIRE(run_inline("identities", yaml, a.path) == 0);
  REQUIRE(run_inline("identities", yaml, b.path) == 0);
  const std::string ja = read_file(a.path / "identities.json");
  CHECK(ja == read_file(b.path / "identities.json"));
  CHECK(nlohmann::json::parse(ja).contains("config_hash"));

  REQUIRE(run_shipped("simulate", "simulate.yaml", a.path) == 0);
  REQUIRE(run_shipped("simulate", "simulate.yaml", b.path) == 0);
  CHECK(read_file(a.path / "trajectory.csv") == read_file(b.path / "trajectory.csv"));
  CHECK(read_file(a.path / "diagnostics.csv") == read_file(b.path / "diagnostics.csv"));
}

TEST_CASE("config reads from stdin") {
  TempDir dir;
  const std::string cmd = std::string("printf 'kernel: laplace(tau=1)\\ndim: 1\\np: dirac(x=0)\\nq: dirac(x=2)\\n' | ") +
                          DRIFTLAB_TOOL + " field --config - --out " + dir.path.string() + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  CHECK(WEXITSTATUS(status) == 0);
  CHECK(fs::exists(dir.path / "field.csv"));
}

TEST_CASE("measure grammar") {
  const auto pair = cli::parse_measure("atoms(x=[-1, 1], w=[1, 1])", 1);
  CHECK(pair.size() == 2);
  CHECK(pair.is_probability());
  const auto sat = cli::parse_measure("satellite(base=dirac(x=0), eps=0.3, z=10)", 1);
  CHECK(sat.size() == 2);
  CHECK(sat.weight(1) == 0.3);
  const auto pl = cli::parse_measure("powerlaw(m=3, cells=100)", 1);
  CHECK(pl.size() == 100);
  CHECK(pl.is_probability());
  CHECK_THROWS_AS(cli::parse_measure("dirac(x=[0, 1])", 1), std::invalid_argument);
  CHECK_THROWS_AS(cli::parse_measure("powerlaw(m=4, dim=2)", 1), std::invalid_argument);
  CHECK_THROWS_AS(cli::parse_measure("tilt(m=3, n=1.5)", 1), std::invalid_argument);

  TempDir dir;
  std::ofstream(dir.path / "atoms.csv") << "# x,y,w\n0,0,1\n1,1,3\n";
  const auto file = cli::parse_measure("atoms(file=atoms.csv)", 2, dir.path);
  CHECK(file.size() == 2);
  CHECK(file.weight(1) == 0.75);
  std::ofstream(dir.path / "bad.csv") << "0,1\n";
  CHECK_THROWS_AS(cli::read_atoms_csv(dir.path / "bad.csv", 2), std::invalid_argument);
}
