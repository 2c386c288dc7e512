#pragma once

#include <cstdint>
#include <vector>

#include "fracsko/config.hpp"
#include "fracsko/model.hpp"
#include "fracsko/report.hpp"
#include "fracsko/special_functions.hpp"

namespace fracsko {

// Every command reads what it needs from RunConfig and falls back to its own
// defaults (listed in the README). `threads` only changes wall-clock time:
// replicas are keyed by index, so estimates are identical for any thread count.

ExperimentReport cmd_simulate(const RunConfig& cfg);
ExperimentReport cmd_exact_vs_chaos(const RunConfig& cfg);
ExperimentReport cmd_euler_study(const RunConfig& cfg);
ExperimentReport cmd_girsanov_check(const RunConfig& cfg);
// corrupt_grading swaps the graded rule inside the K* inner products for a
// uniform one; the isometry items are then expected to fail.
ExperimentReport cmd_operator_check(const RunConfig& cfg, bool corrupt_grading = false);

struct NegativityConfig {
  double a = 1.0;
  double alpha = 0.7;
  double beta = 0.4;
  double epsilon = 0.05;
  double T = 3.0;
  double window = 3.0;  // nodes with 0 < s, t < window
  double delta = 0.1;
  int grid_n = 16;
  int truncation = 3;
  long long replicas = 2000;
  std::uint64_t seed = 20240601;
  int threads = 1;
  double regression_floor = 0.5;  // calibrated p-hat floor, see README
};
NegativityConfig negativity_config(const RunConfig& cfg);

struct RegionNode {
  int i, j;
  double s, t;
};
// Grid nodes with lo < -a s t < hi and 0 < s, t < window. Throws EmptyRegion.
std::vector<RegionNode> negativity_region(const NegativityConfig& c, const NegativityInterval& I);

ExperimentReport cmd_negativity(const NegativityConfig& c);
inline ExperimentReport cmd_negativity(const RunConfig& cfg) { return cmd_negativity(negativity_config(cfg)); }

// Monte Carlo mean of X_T = exact_solution_1d against e^{bT}.
MonteCarloResult mean_identity(double alpha, double a, double b, double T, int grid_n, long long replicas,
                               std::uint64_t seed, int threads);

// Root-mean-square error of the Wick-Euler scheme at t = T for each n in
// `steps`; paths are sampled on the finest grid and subsampled so that all
// n share the same Brownian path.
struct EulerErrors {
  std::vector<int> steps;
  std::vector<double> rms;
  std::vector<double> rms_se;
};
EulerErrors euler_errors(double alpha, double a, double T, const std::vector<int>& steps, long long replicas,
                         std::uint64_t seed, int threads);

}  // namespace fracsko
