#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace fracsko {

// Flat run configuration shared by the config file and the CLI flags.
// Every field is optional; experiments fill in their own defaults.
struct RunConfig {
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<double> a;
  std::optional<double> b;
  std::optional<double> T;
  std::optional<int> grid_n;
  std::optional<long long> samples;
  std::optional<std::uint64_t> seed;
  std::optional<int> truncation;
  std::optional<double> epsilon;
  // extras used by the negativity experiment and the runner
  std::optional<double> delta;
  std::optional<double> window;
  std::optional<int> threads;
};

// `key = value` per line, '#' starts a comment. Unknown keys or malformed
// values throw ConfigError.
RunConfig parse_config_text(const std::string& text);
RunConfig load_config_file(const std::string& path);

// Fields set in `top` win.
RunConfig merge(const RunConfig& base, const RunConfig& top);

}  // namespace fracsko
