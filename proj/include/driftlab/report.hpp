#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace driftlab {

struct Assertion {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Tabular experiment output plus the assertions evaluated on it.
struct ExperimentReport {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<Assertion> assertions;
  nlohmann::json meta = nlohmann::json::object();

  bool pass() const;
  std::size_t column(std::string_view name) const;
  double at(std::size_t row, std::string_view column_name) const;
  void assert_that(std::string name, bool pass, std::string detail = {});
};

/// Header line then one line per row, every value with 17 significant digits.
void write_csv(std::ostream& out, const ExperimentReport& report);
nlohmann::json to_json(const ExperimentReport& report);

/// Round-trip decimal form of a double.
std::string format_double(double v);

/// 64-bit FNV-1a, used to stamp reports with the config that produced them.
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace driftlab
