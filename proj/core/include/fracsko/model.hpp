#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <utility>
#include <vector>

namespace fracsko {

struct HurstPair {
  double alpha = 0.5;
  std::optional<double> beta;  // empty in 1-parameter mode

  bool is_sheet() const { return beta.has_value(); }
};

struct ModelParams {
  HurstPair hurst;
  double a = 1.0;  // diffusion coefficient
  double b = 0.0;  // drift coefficient
  double T = 1.0;
};

// Throws HurstOutOfRange / NonPositiveHorizon / DomainError (non-finite a, b).
ModelParams validate_params(const ModelParams& p);
void check_hurst(double h, const char* name);

// Uniform grid t_k = k*T/n, k = 0..n. t_n is exactly T.
class TimeGrid {
 public:
  TimeGrid(int n_steps, double T);

  int n_steps() const { return n_; }
  double T() const { return T_; }
  double h() const { return h_; }
  double operator[](int k) const { return pts_[static_cast<std::size_t>(k)]; }
  const std::vector<double>& points() const { return pts_; }
  double midpoint(int cell) const { return 0.5 * (pts_[cell] + pts_[cell + 1]); }

 private:
  int n_;
  double T_;
  double h_;
  std::vector<double> pts_;
};

TimeGrid build_grid(int n, double T);

// Tensor lattice on [0,T]^2; s is the first (row) axis.
class Grid2D {
 public:
  Grid2D(int n_s, int n_t, double T);

  int n_s() const { return s_.n_steps(); }
  int n_t() const { return t_.n_steps(); }
  double T() const { return s_.T(); }
  const TimeGrid& s_axis() const { return s_; }
  const TimeGrid& t_axis() const { return t_; }

 private:
  TimeGrid s_;
  TimeGrid t_;
};

Grid2D build_grid_2d(int n_s, int n_t, double T);

struct RngStreamSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t replica_index = 0;
};

// One independent generator per (seed, replica); `tag` separates
// unrelated uses of the same replica index inside one experiment.
class Rng {
 public:
  explicit Rng(const RngStreamSpec& spec, std::uint64_t tag = 0);

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

struct MonteCarloResult {
  double estimate = 0.0;
  double std_error = 0.0;
  long long n_replicas = 0;
  std::pair<double, double> ci95{0.0, 0.0};
  RngStreamSpec seed;
};

}  // namespace fracsko
