#pragma once

#include <Eigen/Dense>
#include <optional>
#include <ostream>

#include "fracsko/model.hpp"
#include "fracsko/special_functions.hpp"

namespace fracsko {

// R^alpha(s,u) = (s^{2a} + u^{2a} - |s-u|^{2a}) / 2
double cov_fbm(double alpha, double s, double u);
// Product form R^alpha(s,u) R^beta(t,v).
double cov_sheet(double alpha, double beta, double s, double t, double u, double v);

// Exact covariance of the grid increments B_{t_{k+1}} - B_{t_k}, k = 0..n-1.
Eigen::MatrixXd increment_covariance(double alpha, const TimeGrid& grid);

struct CovarianceFactor {
  double alpha;
  TimeGrid grid;
  Eigen::MatrixXd L;  // n x n lower triangular, L L^T = [R(t_i,t_j)]_{i,j>=1}
};

// Throws NotPositiveDefinite when a Cholesky pivot falls below 1e-13.
CovarianceFactor factor_covariance(double alpha, const TimeGrid& grid);

// A sampled fBm path (dims == 1) or fBm sheet (dims == 2).
//   1-d: values is (n+1) x 1, white_noise is n x 1
//   2-d: values is (n_s+1) x (n_t+1), white_noise is n_s x n_t
// values at the origin (and on both axes for the sheet) are 0.
struct GaussianField {
  int dims = 1;
  double alpha = 0.5;
  std::optional<double> beta;
  std::optional<TimeGrid> grid1;
  std::optional<Grid2D> grid2;
  Eigen::MatrixXd values;
  Eigen::MatrixXd white_noise;

  // Increment over cell k (1-d) or rectangle increment over cell (k,l) (2-d).
  double increment(int k) const;
  double increment(int k, int l) const;
  int n_cells() const;
};

GaussianField sample_fbm(const CovarianceFactor& factor, const RngStreamSpec& rng);
// Deterministic variant: z has n entries.
GaussianField fbm_from_noise(const CovarianceFactor& factor, const Eigen::VectorXd& z);

struct SheetFactor {
  CovarianceFactor s;  // alpha along the first axis
  CovarianceFactor t;  // beta along the second axis
  Grid2D grid;
};
SheetFactor factor_sheet(double alpha, double beta, const Grid2D& grid);

// V = L_alpha Z L_beta^T on the interior nodes.
GaussianField sample_sheet(const SheetFactor& factor, const RngStreamSpec& rng);
GaussianField sample_sheet(double alpha, double beta, const Grid2D& grid, const RngStreamSpec& rng);
GaussianField sheet_from_noise(const SheetFactor& factor, const Eigen::MatrixXd& Z);

// Cross-check sampler built from the Volterra kernel: B_{t_i} is approximated by
// sum_j (h^{-1/2} int_{cell j} K(t_i, s) ds) z_j. Returns that n x n matrix.
Eigen::MatrixXd volterra_transfer_matrix(const VolterraKernelSpec& spec, const TimeGrid& grid);

// Empirical covariance of B at the grid nodes t_1..t_n from `replicas`
// independent paths, compared entrywise with cov_fbm.
struct CovarianceCheck {
  Eigen::MatrixXd empirical;
  Eigen::MatrixXd exact;
  Eigen::MatrixXd std_error;
  double max_abs_z = 0.0;  // max |empirical - exact| / std_error over entries
  long long replicas = 0;
};
CovarianceCheck empirical_covariance_check(double alpha, const TimeGrid& grid, long long replicas,
                                           std::uint64_t seed, int threads = 1);

// CSV dumps: header `t,value` or `s,t,value`.
void write_field_csv(const GaussianField& field, std::ostream& out);

}  // namespace fracsko
