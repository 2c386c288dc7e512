#include "fracsko/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "fracsko/error.hpp"

namespace fracsko {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& v) {
  T out{};
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    fail(ErrorCode::ConfigError, "bad value for '" + key + "': '" + v + "'");
  return out;
}

template <class T>
void take(std::optional<T>& slot, const std::optional<T>& v) {
  if (v) slot = v;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  RunConfig c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      fail(ErrorCode::ConfigError, "line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key == "alpha") c.alpha = parse_number<double>(key, val);
    else if (key == "beta") c.beta = parse_number<double>(key, val);
    else if (key == "a") c.a = parse_number<double>(key, val);
    else if (key == "b") c.b = parse_number<double>(key, val);
    else if (key == "T") c.T = parse_number<double>(key, val);
    else if (key == "grid_n") c.grid_n = parse_number<int>(key, val);
    else if (key == "samples") c.samples = parse_number<long long>(key, val);
    else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, val);
    else if (key == "truncation") c.truncation = parse_number<int>(key, val);
    else if (key == "epsilon") c.epsilon = parse_number<double>(key, val);
    else if (key == "delta") c.delta = parse_number<double>(key, val);
    else if (key == "window") c.window = parse_number<double>(key, val);
    else if (key == "threads") c.threads = parse_number<int>(key, val);
    else fail(ErrorCode::ConfigError, "unknown key '" + key + "'");
  }
  return c;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(ErrorCode::ConfigError, "cannot open config file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str());
}

RunConfig merge(const RunConfig& base, const RunConfig& top) {
  RunConfig c = base;
  take(c.alpha, top.alpha);
  take(c.beta, top.beta);
  take(c.a, top.a);
  take(c.b, top.b);
  take(c.T, top.T);
  take(c.grid_n, top.grid_n);
  take(c.samples, top.samples);
  take(c.seed, top.seed);
  take(c.truncation, top.truncation);
  take(c.epsilon, top.epsilon);
  take(c.delta, top.delta);
  take(c.window, top.window);
  take(c.threads, top.threads);
  return c;
}

}  // namespace fracsko
