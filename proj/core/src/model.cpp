#include "fracsko/model.hpp"

#include <cmath>
#include <string>

#include "fracsko/error.hpp"

namespace fracsko {

void check_hurst(double h, const char* name) {
  if (!(h > 0.0 && h < 1.0))
    fail(ErrorCode::HurstOutOfRange, std::string(name) + " = " + std::to_string(h) + " not in (0,1)");
}

ModelParams validate_params(const ModelParams& p) {
  check_hurst(p.hurst.alpha, "alpha");
  if (p.hurst.beta) check_hurst(*p.hurst.beta, "beta");
  if (!(p.T > 0.0) || !std::isfinite(p.T))
    fail(ErrorCode::NonPositiveHorizon, "T = " + std::to_string(p.T));
  if (!std::isfinite(p.a) || !std::isfinite(p.b))
    fail(ErrorCode::DomainError, "coefficients a, b must be finite");
  return p;
}

TimeGrid::TimeGrid(int n_steps, double T) : n_(n_steps), T_(T) {
  if (n_steps < 1) fail(ErrorCode::InvalidGrid, "need at least one step");
  if (!(T > 0.0) || !std::isfinite(T)) fail(ErrorCode::InvalidGrid, "horizon must be positive");
  h_ = T / n_;
  pts_.resize(static_cast<std::size_t>(n_) + 1);
  for (int k = 0; k < n_; ++k) pts_[k] = k * T / n_;
  pts_[n_] = T;
}

TimeGrid build_grid(int n, double T) { return TimeGrid(n, T); }

Grid2D::Grid2D(int n_s, int n_t, double T) : s_(n_s, T), t_(n_t, T) {}

Grid2D build_grid_2d(int n_s, int n_t, double T) { return Grid2D(n_s, n_t, T); }

Rng::Rng(const RngStreamSpec& spec, std::uint64_t tag) {
  auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffu); };
  auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  std::seed_seq seq{lo(spec.master_seed), hi(spec.master_seed), lo(spec.replica_index),
                    hi(spec.replica_index), lo(tag), hi(tag), 0x66726163u};
  engine_.seed(seq);
}

}  // namespace fracsko
