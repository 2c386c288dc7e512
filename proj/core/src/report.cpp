#include "fracsko/report.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "fracsko/error.hpp"

namespace fracsko {

std::string fmt_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

bool ExperimentReport::passed() const {
  bool any = false;
  for (const auto& m : metrics) {
    if (!m.pass) continue;
    any = true;
    if (!*m.pass) return false;
  }
  return any;
}

const Metric* ExperimentReport::find(const std::string& name) const {
  for (const auto& m : metrics)
    if (m.name == name) return &m;
  return nullptr;
}

Metric& ExperimentReport::add(Metric m) {
  metrics.push_back(std::move(m));
  return metrics.back();
}

namespace {

nlohmann::json num(double x) {
  if (std::isfinite(x)) return x;
  return fmt_double(x);
}

}  // namespace

std::string to_json(const ExperimentReport& r) {
  nlohmann::ordered_json j;
  j["experiment"] = r.id;
  nlohmann::ordered_json p = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.params) p[k] = v;
  j["parameters"] = p;
  j["seed"] = r.seed;
  j["passed"] = r.passed();
  auto ms = nlohmann::ordered_json::array();
  for (const auto& m : r.metrics) {
    nlohmann::ordered_json e;
    e["name"] = m.name;
    e["value"] = num(m.value);
    if (m.mc) {
      e["std_error"] = num(m.mc->std_error);
      e["n_replicas"] = m.mc->n_replicas;
      e["ci95"] = {num(m.mc->ci95.first), num(m.mc->ci95.second)};
      e["seed"] = m.mc->seed.master_seed;
    }
    e["criterion"] = m.criterion;
    e["tolerance"] = num(m.tolerance);
    if (m.pass)
      e["pass"] = *m.pass;
    else
      e["pass"] = nullptr;
    ms.push_back(e);
  }
  j["metrics"] = ms;
  auto ts = nlohmann::ordered_json::array();
  for (const auto& t : r.tables) ts.push_back(t.file);
  j["tables"] = ts;
  j["notes"] = r.notes;
  j["wall_seconds"] = r.wall_seconds;
  return j.dump(2) + "\n";
}

std::string table_csv(const Table& t) {
  std::ostringstream out;
  for (std::size_t i = 0; i < t.header.size(); ++i) out << (i ? "," : "") << t.header[i];
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
  return out.str();
}

void write_report(const ExperimentReport& r, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::ConfigError, "cannot create output directory " + dir);
  auto put = [&](const std::string& name, const std::string& body) {
    std::ofstream f(fs::path(dir) / name, std::ios::binary);
    if (!f) fail(ErrorCode::ConfigError, "cannot write " + name);
    f << body;
  };
  put("report.json", to_json(r));
  for (const auto& t : r.tables) put(t.file, table_csv(t));
}

std::string format_summary(const ExperimentReport& r) {
  std::ostringstream out;
  out << "[" << r.id << "]\n";
  for (const auto& m : r.metrics) {
    const char* tag = !m.pass ? "INFO" : (*m.pass ? "PASS" : "FAIL");
    out << "  " << tag << "  " << m.name << " = " << fmt_double(m.value);
    if (m.mc) out << " (se " << fmt_double(m.mc->std_error) << ", n=" << m.mc->n_replicas << ")";
    if (!m.criterion.empty()) out << "  [" << m.criterion << "]";
    out << '\n';
  }
  for (const auto& n : r.notes) out << "  note: " << n << '\n';
  out << "  verdict: " << (r.passed() ? "PASS" : "FAIL") << "  (" << fmt_double(std::round(r.wall_seconds * 1000) / 1000)
      << " s)\n";
  return out.str();
}

}  // namespace fracsko
