#pragma once

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <vector>

#include "fracsko/gaussian_fields.hpp"
#include "fracsko/model.hpp"

namespace fracsko {

// Per-order values on grid nodes. 1-parameter: matrices are (n+1) x 1;
// 2-parameter: (n_s+1) x (n_t+1). total = sum of per_order.
struct TruncatedChaosSolution {
  int N = 0;
  std::vector<Eigen::MatrixXd> per_order;
  Eigen::MatrixXd total;
};

// ---- 1-parameter ---------------------------------------------------------

// f_n(t_1..t_n, t) = a^n/n! e^{bt} 1_{[0,t]}^{(x)n}
double kernel_1d_eval(int n, double a, double b, double t, std::span<const double> args);

// e^{bt} exp(a B_t - a^2 t^{2 alpha} / 2)
double exact_solution_1d(double a, double b, double alpha, double t, double B_t);

// e^{bt} sum_{n<=N} a^n/n! t^{n alpha} H_n(B_t t^{-alpha}) at a single time.
// Uses h_{n+1} = (a B h_n - a^2 t^{2 alpha} h_{n-1}) / (n+1), which needs no
// division by t and stays finite at t = 0.
TruncatedChaosSolution chaos_sum_1d(double a, double b, double alpha, double t, double B_t, int N);
// Same on every node of a sampled path.
TruncatedChaosSolution chaos_sum_1d(const ModelParams& p, const GaussianField& path, int N);

// Wick-corrected Euler scheme (b = 0) on the path's grid:
// X_{k+1} = X_k (1 + a dB_k - a^2/2 (t_{k+1}^{2a} - t_k^{2a} - h^{2a})).
std::vector<double> wick_euler_1d(const ModelParams& p, int n, const GaussianField& path);

// Per-order norms |K^{*,n+1} f_n| for n = 0..N, computed through the
// H-isometry on a grid of `grid_n` cells (midpoint rule in the last variable).
std::vector<double> chaos_norm_decay(const ModelParams& p, int N, int grid_n = 256);

// Envelope |a|^n T^{alpha(2n+1)} / n!, fitted constant C = max over n <= 2 of
// norm/envelope, and whether C * envelope dominates every order.
struct NormEnvelope {
  std::vector<double> envelope;
  double C = 0.0;
  bool dominated = false;
};
NormEnvelope fit_norm_envelope(const std::vector<double>& norms, const ModelParams& p);

// ---- discrete multiple integrals -------------------------------------------

struct Point2 {
  double s = 0.0;
  double t = 0.0;
};

// Wick product :Y_1 ... Y_n: for jointly Gaussian centred Y with covariance
// cov(i,j) among the listed variables (n <= 4).
double wick_product(std::span<const double> y, const std::function<double(int, int)>& cov);

// Sum over ordered tuples of distinct cells of kernel(cell midpoints) times the
// Wick product of the field increments over those cells. n <= 4 (OrderTooHigh).
double discrete_multiple_integral(const std::function<double(std::span<const double>)>& kernel, int n,
                                  const GaussianField& path);
double discrete_multiple_integral(const std::function<double(std::span<const Point2>)>& kernel, int n,
                                  const GaussianField& sheet);

// ---- 2-parameter -----------------------------------------------------------

// Chain kernel with drift: sort the points, require a coordinatewise chain
// inside [0,z], then a^n/n! prod h0(b ds_j dt_j) h0(b (s - s_n)(t - t_n)).
double kernel_sheet_eval(int n, double a, double b, Point2 z, std::span<const Point2> args);
// The b = 0 formula a^n/n! sum_i prod_{j != i} 1{rho_j <= rho_i} 1{rho_i <= z},
// taken literally. Agrees with kernel_sheet_eval(b = 0) for n <= 2 only.
double kernel_sheet_eval_b0_literal(int n, double a, Point2 z, std::span<const Point2> args);

// Truncated chaos solution of the sheet equation on grid nodes. Chains of
// distinct cells are enumerated once per solve; the chain indicator is the
// cell average (ties in a row or column get weight 1/m!), h0 factors are
// taken at cell midpoints. The order-0 term is h0(b s t) exactly.
class SheetChaosSolver {
 public:
  SheetChaosSolver(const ModelParams& p, const Grid2D& grid, int N);

  TruncatedChaosSolution solve(const GaussianField& sheet) const;
  int truncation() const { return N_; }
  const Grid2D& grid() const { return grid_; }

 private:
  ModelParams p_;
  Grid2D grid_;
  int N_;
  Eigen::MatrixXd cov_s_, cov_t_;  // increment covariances per axis
  Eigen::MatrixXd step_h0_;        // h0(b dk hs dl ht) for cell offsets
  Eigen::MatrixXd first_h0_;       // h0(b sbar_k tbar_l)
  Eigen::MatrixXd tail_h0_;        // h0(b (i-k-1/2) hs (j-l-1/2) ht)
  Eigen::MatrixXd order0_;
};

TruncatedChaosSolution solve_sheet_chaos(const ModelParams& p, const Grid2D& grid, const GaussianField& sheet,
                                         int N);

// ---- deterministic sheet equation g = 1 + a int int g ------------------------

double deterministic_sheet_solution(double a, double s, double t);

struct PicardResult {
  Eigen::MatrixXd g;       // on the grid nodes
  int iterations = 0;
  double last_change = 0.0;
  double sup_error = 0.0;  // against h0(a s t)
};
// Fixed point of g = 1 + a Q_s g Q_t^T, with Q the 4th-order cumulative
// quadrature matrix (local cubic interpolation per cell).
PicardResult picard_sheet(double a, const Grid2D& grid, int max_iter = 200, double tol = 1e-10);
// Cumulative quadrature: row i integrates from 0 to x_i.
Eigen::MatrixXd cumulative_quadrature_matrix(const TimeGrid& grid);

}  // namespace fracsko
