#include "driftlab/report.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <ostream>
#include <stdexcept>

namespace driftlab {

bool ExperimentReport::pass() const {
  return std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.pass; });
}

std::size_t ExperimentReport::column(std::string_view name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw std::out_of_range(fmt::format("no column '{}'", name));
  return static_cast<std::size_t>(it - columns.begin());
}

double ExperimentReport::at(std::size_t row, std::string_view column_name) const {
  return rows.at(row).at(column(column_name));
}

void ExperimentReport::assert_that(std::string name, bool pass, std::string detail) {
  assertions.push_back({std::move(name), pass, std::move(detail)});
}

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

void write_csv(std::ostream& out, const ExperimentReport& report) {
  out << fmt::format("{}\n", fmt::join(report.columns, ","));
  for (const auto& row : report.rows) {
    std::string line;
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) line += ',';
      line += format_double(row[i]);
    }
    out << line << '\n';
  }
}

nlohmann::json to_json(const ExperimentReport& report) {
  nlohmann::json j;
  j["experiment"] = report.name;
  j["pass"] = report.pass();
  j["columns"] = report.columns;
  j["rows"] = report.rows;
  auto& list = j["assertions"] = nlohmann::json::array();
  for (const Assertion& a : report.assertions) {
    list.push_back({{"name", a.name}, {"pass", a.pass}, {"detail", a.detail}});
  }
  j["meta"] = report.meta;
  return j;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace driftlab
