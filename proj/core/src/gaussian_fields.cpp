#include "fracsko/gaussian_fields.hpp"

#include <cmath>
#include <string>

#include "fracsko/error.hpp"
#include "fracsko/parallel.hpp"
#include "fracsko/quadrature.hpp"
#include "fracsko/report.hpp"
#include "fracsko/stats.hpp"

namespace fracsko {

double cov_fbm(double alpha, double s, double u) {
  const double e = 2.0 * alpha;
  return 0.5 * (std::pow(s, e) + std::pow(u, e) - std::pow(std::abs(s - u), e));
}

double cov_sheet(double alpha, double beta, double s, double t, double u, double v) {
  return cov_fbm(alpha, s, u) * cov_fbm(beta, t, v);
}

Eigen::MatrixXd increment_covariance(double alpha, const TimeGrid& grid) {
  const int n = grid.n_steps();
  const double e = 2.0 * alpha;
  const double scale = std::pow(grid.h(), e);
  Eigen::MatrixXd C(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double d = std::abs(i - j);
      C(i, j) = 0.5 * scale * (std::pow(d + 1.0, e) + std::pow(std::abs(d - 1.0), e) - 2.0 * std::pow(d, e));
    }
  return C;
}

CovarianceFactor factor_covariance(double alpha, const TimeGrid& grid) {
  check_hurst(alpha, "alpha");
  const int n = grid.n_steps();
  Eigen::MatrixXd R(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) R(i, j) = R(j, i) = cov_fbm(alpha, grid[i + 1], grid[j + 1]);
  Eigen::LLT<Eigen::MatrixXd> llt(R);
  if (llt.info() != Eigen::Success)
    fail(ErrorCode::NotPositiveDefinite, "covariance not positive definite (n=" + std::to_string(n) + ")");
  Eigen::MatrixXd L = llt.matrixL();
  for (int i = 0; i < n; ++i)
    if (!(L(i, i) * L(i, i) >= 1e-13))
      fail(ErrorCode::NotPositiveDefinite,
           "Cholesky pivot " + std::to_string(L(i, i) * L(i, i)) + " below 1e-13 at row " + std::to_string(i));
  return CovarianceFactor{alpha, grid, std::move(L)};
}

double GaussianField::increment(int k) const { return values(k + 1, 0) - values(k, 0); }

double GaussianField::increment(int k, int l) const {
  return values(k + 1, l + 1) - values(k, l + 1) - values(k + 1, l) + values(k, l);
}

int GaussianField::n_cells() const { return static_cast<int>(white_noise.size()); }

GaussianField fbm_from_noise(const CovarianceFactor& f, const Eigen::VectorXd& z) {
  const int n = f.grid.n_steps();
  if (z.size() != n) fail(ErrorCode::DomainError, "noise length does not match grid");
  GaussianField g;
  g.dims = 1;
  g.alpha = f.alpha;
  g.grid1 = f.grid;
  g.values = Eigen::MatrixXd::Zero(n + 1, 1);
  g.values.col(0).tail(n) = f.L.triangularView<Eigen::Lower>() * z;
  g.white_noise = z;
  return g;
}

GaussianField sample_fbm(const CovarianceFactor& f, const RngStreamSpec& spec) {
  Rng rng(spec);
  Eigen::VectorXd z(f.grid.n_steps());
  for (int i = 0; i < z.size(); ++i) z[i] = rng.normal();
  return fbm_from_noise(f, z);
}

SheetFactor factor_sheet(double alpha, double beta, const Grid2D& grid) {
  return SheetFactor{factor_covariance(alpha, grid.s_axis()), factor_covariance(beta, grid.t_axis()), grid};
}

GaussianField sheet_from_noise(const SheetFactor& f, const Eigen::MatrixXd& Z) {
  const int ns = f.grid.n_s(), nt = f.grid.n_t();
  if (Z.rows() != ns || Z.cols() != nt) fail(ErrorCode::DomainError, "noise shape does not match grid");
  GaussianField g;
  g.dims = 2;
  g.alpha = f.s.alpha;
  g.beta = f.t.alpha;
  g.grid2 = f.grid;
  g.values = Eigen::MatrixXd::Zero(ns + 1, nt + 1);
  Eigen::MatrixXd tmp = f.s.L.triangularView<Eigen::Lower>() * Z;
  g.values.bottomRightCorner(ns, nt) = tmp * f.t.L.transpose();
  g.white_noise = Z;
  return g;
}

GaussianField sample_sheet(const SheetFactor& f, const RngStreamSpec& spec) {
  Rng rng(spec);
  Eigen::MatrixXd Z(f.grid.n_s(), f.grid.n_t());
  // column-major fill keeps the draw order fixed
  for (int j = 0; j < Z.cols(); ++j)
    for (int i = 0; i < Z.rows(); ++i) Z(i, j) = rng.normal();
  return sheet_from_noise(f, Z);
}

GaussianField sample_sheet(double alpha, double beta, const Grid2D& grid, const RngStreamSpec& rng) {
  return sample_sheet(factor_sheet(alpha, beta, grid), rng);
}

Eigen::MatrixXd volterra_transfer_matrix(const VolterraKernelSpec& spec, const TimeGrid& grid) {
  const int n = grid.n_steps();
  const double rh = 1.0 / std::sqrt(grid.h());
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const double t = grid[i + 1];
    for (int j = 0; j <= i; ++j) {
      const double lo = grid[j], hi = grid[j + 1];
      auto g = [&](double s, double, double rg) {
        // gap to t: rg plus the distance from the cell's right end to t
        return volterra_kernel_gap(spec, t, s, rg + (t - hi));
      };
      M(i, j) = rh * quad::integrate_gaps(g, lo, hi, 1e-10).value;
    }
  }
  return M;
}

CovarianceCheck empirical_covariance_check(double alpha, const TimeGrid& grid, long long replicas,
                                           std::uint64_t seed, int threads) {
  const CovarianceFactor f = factor_covariance(alpha, grid);
  const int n = grid.n_steps();
  Eigen::MatrixXd paths(n, replicas);
  parallel_for(static_cast<std::size_t>(replicas), threads, [&](std::size_t r) {
    GaussianField g = sample_fbm(f, RngStreamSpec{seed, r});
    paths.col(static_cast<Eigen::Index>(r)) = g.values.col(0).tail(n);
  });
  CovarianceCheck c;
  c.replicas = replicas;
  c.exact = f.L * f.L.transpose();
  c.empirical.resize(n, n);
  c.std_error.resize(n, n);
  std::vector<double> prod(static_cast<std::size_t>(replicas));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      // mean is known to be zero, so the covariance estimator is a plain mean of products
      for (long long r = 0; r < replicas; ++r) prod[r] = paths(i, r) * paths(j, r);
      auto m = summarize(prod, RngStreamSpec{seed, 0});
      c.empirical(i, j) = c.empirical(j, i) = m.estimate;
      c.std_error(i, j) = c.std_error(j, i) = m.std_error;
      const double exact = cov_fbm(alpha, grid[i + 1], grid[j + 1]);
      c.exact(i, j) = c.exact(j, i) = exact;
      c.max_abs_z = std::max(c.max_abs_z, std::abs(m.estimate - exact) / m.std_error);
    }
  return c;
}

void write_field_csv(const GaussianField& f, std::ostream& out) {
  if (f.dims == 1) {
    out << "t,value\n";
    const auto& g = *f.grid1;
    for (int k = 0; k <= g.n_steps(); ++k) out << fmt_double(g[k]) << ',' << fmt_double(f.values(k, 0)) << '\n';
  } else {
    out << "s,t,value\n";
    const auto& g = *f.grid2;
    for (int i = 0; i <= g.n_s(); ++i)
      for (int j = 0; j <= g.n_t(); ++j)
        out << fmt_double(g.s_axis()[i]) << ',' << fmt_double(g.t_axis()[j]) << ',' << fmt_double(f.values(i, j))
            << '\n';
  }
}

}  // namespace fracsko
