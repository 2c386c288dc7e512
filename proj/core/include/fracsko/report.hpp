#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fracsko/model.hpp"

namespace fracsko {

// Shortest round-trip decimal form; identical bytes for identical doubles.
std::string fmt_double(double x);

struct Metric {
  std::string name;
  double value = 0.0;
  std::optional<MonteCarloResult> mc;
  std::string criterion;   // how the verdict is formed, e.g. "|z| <= 4"
  double tolerance = 0.0;  // the number appearing in `criterion`
  std::optional<bool> pass;  // empty for informational metrics
};

struct Table {
  std::string file;  // CSV file name inside the output directory
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct ExperimentReport {
  std::string id;
  std::vector<std::pair<std::string, std::string>> params;
  std::uint64_t seed = 0;
  std::vector<Metric> metrics;
  std::vector<Table> tables;
  std::vector<std::string> notes;
  double wall_seconds = 0.0;

  // True when every gating metric passed (and at least one exists).
  bool passed() const;
  const Metric* find(const std::string& name) const;
  Metric& add(Metric m);
};

std::string to_json(const ExperimentReport& r);
std::string table_csv(const Table& t);
// Writes report.json plus one CSV per table into `dir` (created if needed).
void write_report(const ExperimentReport& r, const std::string& dir);
// One line per metric, for terminals.
std::string format_summary(const ExperimentReport& r);

}  // namespace fracsko
