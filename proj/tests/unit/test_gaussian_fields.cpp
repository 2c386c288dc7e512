#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "fracsko/error.hpp"
#include "fracsko/gaussian_fields.hpp"
#include "fracsko/special_functions.hpp"
#include "fracsko/stats.hpp"

using namespace fracsko;

TEST(Covariance, Examples) {
  EXPECT_NEAR(cov_fbm(0.3, 0.7, 0.7), std::pow(0.7, 0.6), 1e-15);
  EXPECT_NEAR(cov_fbm(0.5, 0.3, 0.8), 0.3, 1e-15);
  EXPECT_NEAR(cov_fbm(0.75, 1.0, 2.0), std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(cov_sheet(0.3, 0.8, 0.4, 0.9, 0.4, 0.9), std::pow(0.4, 0.6) * std::pow(0.9, 1.6), 1e-15);
  EXPECT_NEAR(cov_sheet(0.5, 0.5, 0.3, 0.9, 0.7, 0.2), 0.3 * 0.2, 1e-15);
}

TEST(Covariance, SheetScaling) {
  const double a = 0.3, b = 0.8, c1 = 2.0, c2 = 3.0;
  const double base = cov_sheet(a, b, 1.0, 1.0, 0.5, 2.0);
  const double scaled = cov_sheet(a, b, c1 * 1.0, c2 * 1.0, c1 * 0.5, c2 * 2.0);
  EXPECT_NEAR(scaled, std::pow(c1, 2 * a) * std::pow(c2, 2 * b) * base, 1e-12);
}

TEST(Factor, HandCholesky) {
  const CovarianceFactor f1 = factor_covariance(0.3, TimeGrid(1, 1.0));
  EXPECT_NEAR(f1.L(0, 0), 1.0, 1e-15);
  const CovarianceFactor f = factor_covariance(0.5, TimeGrid(2, 1.0));
  EXPECT_NEAR(f.L(0, 0), std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(f.L(1, 0), 0.5 / std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(f.L(1, 1), std::sqrt(0.5), 1e-15);
  EXPECT_EQ(f.L(0, 1), 0.0);
}

TEST(Factor, ReproducesCovariance) {
  for (double a : {0.1, 0.25, 0.5, 0.75, 0.95}) {
    const TimeGrid g(40, 2.0);
    const CovarianceFactor f = factor_covariance(a, g);
    const Eigen::MatrixXd C = f.L * f.L.transpose();
    for (int i = 0; i < 40; ++i) {
      EXPECT_GT(f.L(i, i), 0.0);
      for (int j = 0; j < 40; ++j) ASSERT_NEAR(C(i, j), cov_fbm(a, g[i + 1], g[j + 1]), 1e-10);
    }
  }
}

TEST(Factor, PivotGuard) {
  // alpha within 1e-12 of 1: B_t is t B_1 up to rounding, so the factor degenerates
  try {
    factor_covariance(1.0 - 1e-12, TimeGrid(10, 1.0));
    FAIL() << "expected NotPositiveDefinite";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotPositiveDefinite);
  }
}

TEST(IncrementCovariance, MatchesNodeCovariance) {
  const TimeGrid g(6, 1.5);
  const Eigen::MatrixXd C = increment_covariance(0.3, g);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) {
      const double v = cov_fbm(0.3, g[i + 1], g[j + 1]) - cov_fbm(0.3, g[i], g[j + 1]) - cov_fbm(0.3, g[i + 1], g[j]) +
                       cov_fbm(0.3, g[i], g[j]);
      EXPECT_NEAR(C(i, j), v, 1e-14);
    }
}

TEST(Sampling, ZeroNoiseGivesZeroField) {
  const CovarianceFactor f = factor_covariance(0.3, TimeGrid(5, 1.0));
  const GaussianField p = fbm_from_noise(f, Eigen::VectorXd::Zero(5));
  EXPECT_EQ(p.values.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(p.white_noise.size(), 5);
  const SheetFactor sf = factor_sheet(0.3, 0.7, Grid2D(4, 3, 1.0));
  const GaussianField w = sheet_from_noise(sf, Eigen::MatrixXd::Zero(4, 3));
  EXPECT_EQ(w.values.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(w.values.rows(), 5);
  EXPECT_EQ(w.values.cols(), 4);
}

TEST(Sampling, OriginAndNoiseRetained) {
  const CovarianceFactor f = factor_covariance(0.7, TimeGrid(8, 1.0));
  const GaussianField p = sample_fbm(f, {1, 2});
  EXPECT_EQ(p.values(0, 0), 0.0);
  const Eigen::VectorXd v = f.L * p.white_noise.col(0);
  for (int k = 0; k < 8; ++k) EXPECT_NEAR(p.values(k + 1, 0), v(k), 1e-14);
  const GaussianField w = sample_sheet(0.3, 0.6, Grid2D(4, 4, 1.0), {1, 2});
  for (int k = 0; k <= 4; ++k) {
    EXPECT_EQ(w.values(0, k), 0.0);
    EXPECT_EQ(w.values(k, 0), 0.0);
  }
  EXPECT_EQ(w.n_cells(), 16);
}

TEST(Sampling, Deterministic) {
  const CovarianceFactor f = factor_covariance(0.3, TimeGrid(16, 1.0));
  EXPECT_EQ(sample_fbm(f, {77, 5}).values, sample_fbm(f, {77, 5}).values);
  EXPECT_NE(sample_fbm(f, {77, 5}).values, sample_fbm(f, {77, 6}).values);
  const Grid2D g(5, 5, 1.0);
  EXPECT_EQ(sample_sheet(0.3, 0.6, g, {77, 5}).values, sample_sheet(0.3, 0.6, g, {77, 5}).values);
}

TEST(Sampling, VarianceAndCovarianceAtHorizon) {
  const double a = 0.3, T = 1.5;
  const CovarianceFactor f = factor_covariance(a, TimeGrid(4, T));
  const int M = 100000;
  std::vector<double> v(M), c(M);
  for (int i = 0; i < M; ++i) {
    const GaussianField p = sample_fbm(f, {2024, static_cast<std::uint64_t>(i)});
    v[i] = p.values(4, 0) * p.values(4, 0);
    c[i] = p.values(2, 0) * p.values(4, 0);
  }
  EXPECT_LE(std::abs(z_score(summarize(v, {2024, 0}), std::pow(T, 2 * a))), 4.0);
  EXPECT_LE(std::abs(z_score(summarize(c, {2024, 0}), cov_fbm(a, T / 2, T))), 4.0);
}

TEST(Sampling, EmpiricalCovarianceMatrix) {
  for (double a : {0.25, 0.5, 0.75}) {
    const CovarianceCheck cc = empirical_covariance_check(a, TimeGrid(8, 1.0), 50000, 99);
    EXPECT_LE(cc.max_abs_z, 5.0) << a;
    EXPECT_EQ(cc.replicas, 50000);
  }
}

TEST(Sheet, VarianceAndBrownianDecorrelation) {
  const Grid2D g(4, 4, 2.0);
  const SheetFactor f = factor_sheet(0.5, 0.5, g);
  const SheetFactor f2 = factor_sheet(0.3, 0.8, g);
  const int M = 100000;
  std::vector<double> var(M), prod(M), var2(M);
  for (int i = 0; i < M; ++i) {
    const GaussianField w = sample_sheet(f, {8, static_cast<std::uint64_t>(i)});
    const auto& V = w.values;
    // [0,1]x[0,1] against [1,2]x[0,1]: disjoint rectangles sharing an edge
    prod[i] = V(2, 2) * (V(4, 2) - V(2, 2));
    var[i] = V(4, 4) * V(4, 4);
    const GaussianField w2 = sample_sheet(f2, {8, static_cast<std::uint64_t>(i)});
    var2[i] = w2.values(4, 4) * w2.values(4, 4);
  }
  EXPECT_LE(std::abs(z_score(summarize(var, {8, 0}), 4.0)), 4.0);
  EXPECT_LE(std::abs(z_score(summarize(prod, {8, 0}), 0.0)), 4.0);
  EXPECT_LE(std::abs(z_score(summarize(var2, {8, 0}), std::pow(2.0, 0.6) * std::pow(2.0, 1.6))), 4.0);
}

TEST(Sheet, RowRestrictionIsScaledFbm) {
  // W(., t_j) has covariance R^alpha(s,u) t_j^(2 beta)
  const double a = 0.3, b = 0.7;
  const Grid2D g(4, 4, 1.0);
  const SheetFactor f = factor_sheet(a, b, g);
  const int M = 60000, j = 2;
  const double tj = g.t_axis()[j];
  std::vector<std::vector<double>> prods(16, std::vector<double>(M));
  for (int r = 0; r < M; ++r) {
    const GaussianField w = sample_sheet(f, {31, static_cast<std::uint64_t>(r)});
    for (int i = 1; i <= 4; ++i)
      for (int k = 1; k <= 4; ++k) prods[(i - 1) * 4 + (k - 1)][r] = w.values(i, j) * w.values(k, j);
  }
  for (int i = 1; i <= 4; ++i)
    for (int k = 1; k <= 4; ++k) {
      const double exact = cov_fbm(a, g.s_axis()[i], g.s_axis()[k]) * std::pow(tj, 2 * b);
      EXPECT_LE(std::abs(z_score(summarize(prods[(i - 1) * 4 + (k - 1)], {31, 0}), exact)), 4.0) << i << "," << k;
    }
}

TEST(VolterraSampler, CrossCheckAgainstExactCovariance) {
  // A A^T approximates R at the nodes; the cell-averaged kernel converges slowly
  // near the diagonal for alpha < 1/2, so the tolerance is loose but shrinks
  for (double a : {0.3, 0.7}) {
    double prev = INFINITY;
    for (int n : {16, 64}) {
      const TimeGrid g(n, 1.0);
      const Eigen::MatrixXd A = volterra_transfer_matrix(make_kernel_spec(a), g);
      const Eigen::MatrixXd C = A * A.transpose();
      double e = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) e = std::max(e, std::abs(C(i, j) - cov_fbm(a, g[i + 1], g[j + 1])));
      EXPECT_LT(e, 0.1) << a << " n=" << n;
      EXPECT_LT(e, prev);
      prev = e;
    }
  }
}

TEST(Csv, Headers) {
  std::ostringstream a, b;
  write_field_csv(sample_fbm(factor_covariance(0.3, TimeGrid(2, 1.0)), {1, 0}), a);
  EXPECT_EQ(a.str().substr(0, 8), "t,value\n");
  write_field_csv(sample_sheet(0.3, 0.4, Grid2D(2, 2, 1.0), {1, 0}), b);
  EXPECT_EQ(b.str().substr(0, 10), "s,t,value\n");
  std::ostringstream c;
  write_field_csv(sample_sheet(0.3, 0.4, Grid2D(2, 2, 1.0), {1, 0}), c);
  EXPECT_EQ(b.str(), c.str());
}
