#include "fracsko/chaos_solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fracsko/error.hpp"
#include "fracsko/special_functions.hpp"
#include "fracsko/stats.hpp"

namespace fracsko {

double kernel_1d_eval(int n, double a, double b, double t, std::span<const double> args) {
  if (n < 0 || static_cast<int>(args.size()) != n) fail(ErrorCode::DomainError, "kernel_1d_eval: need n arguments");
  for (double x : args)
    if (x < 0.0 || x > t) return 0.0;
  return std::pow(a, n) / std::tgamma(n + 1.0) * std::exp(b * t);
}

double exact_solution_1d(double a, double b, double alpha, double t, double B_t) {
  if (t < 0.0) fail(ErrorCode::DomainError, "exact_solution_1d needs t >= 0");
  return std::exp(b * t + a * B_t - 0.5 * a * a * std::pow(t, 2.0 * alpha));
}

namespace {

void chaos_terms(double a, double alpha, double t, double B, int N, double scale, std::vector<double>& h) {
  h.assign(static_cast<std::size_t>(N) + 1, 0.0);
  h[0] = 1.0;
  if (N >= 1) h[1] = a * B;
  const double q = a * a * std::pow(t, 2.0 * alpha);
  for (int n = 1; n < N; ++n) h[n + 1] = (a * B * h[n] - q * h[n - 1]) / (n + 1);
  for (double& x : h) x *= scale;
}

}  // namespace

TruncatedChaosSolution chaos_sum_1d(double a, double b, double alpha, double t, double B_t, int N) {
  if (N < 0) fail(ErrorCode::DomainError, "truncation must be >= 0");
  if (t < 0.0) fail(ErrorCode::DomainError, "chaos_sum_1d needs t >= 0");
  std::vector<double> h;
  chaos_terms(a, alpha, t, B_t, N, std::exp(b * t), h);
  TruncatedChaosSolution out;
  out.N = N;
  out.total = Eigen::MatrixXd::Zero(1, 1);
  NeumaierSum s;
  for (int n = 0; n <= N; ++n) {
    out.per_order.push_back(Eigen::MatrixXd::Constant(1, 1, h[n]));
    s.add(h[n]);
  }
  out.total(0, 0) = s.value();
  return out;
}

TruncatedChaosSolution chaos_sum_1d(const ModelParams& p, const GaussianField& path, int N) {
  if (path.dims != 1) fail(ErrorCode::DomainError, "chaos_sum_1d needs a 1-parameter path");
  if (N < 0) fail(ErrorCode::DomainError, "truncation must be >= 0");
  const TimeGrid& g = *path.grid1;
  const int m = g.n_steps() + 1;
  TruncatedChaosSolution out;
  out.N = N;
  out.per_order.assign(static_cast<std::size_t>(N) + 1, Eigen::MatrixXd::Zero(m, 1));
  out.total = Eigen::MatrixXd::Zero(m, 1);
  std::vector<double> h;
  for (int k = 0; k < m; ++k) {
    chaos_terms(p.a, path.alpha, g[k], path.values(k, 0), N, std::exp(p.b * g[k]), h);
    NeumaierSum s;
    for (int n = 0; n <= N; ++n) {
      out.per_order[n](k, 0) = h[n];
      s.add(h[n]);
    }
    out.total(k, 0) = s.value();
  }
  return out;
}

std::vector<double> wick_euler_1d(const ModelParams& p, int n, const GaussianField& path) {
  if (path.dims != 1 || path.grid1->n_steps() != n) fail(ErrorCode::DomainError, "wick_euler_1d: path grid must have n steps");
  if (p.b != 0.0) fail(ErrorCode::DomainError, "wick_euler_1d is defined for b = 0");
  const TimeGrid& g = *path.grid1;
  const double e = 2.0 * path.alpha;
  const double hp = std::pow(g.h(), e);
  std::vector<double> X(static_cast<std::size_t>(n) + 1);
  X[0] = 1.0;
  for (int k = 0; k < n; ++k) {
    // t_1 = h exactly, so the bracket vanishes at k = 0 and the first step is plain Euler
    const double bracket = std::pow(g[k + 1], e) - std::pow(g[k], e) - hp;
    X[k + 1] = X[k] * (1.0 + p.a * path.increment(k) - 0.5 * p.a * p.a * bracket);
  }
  return X;
}

std::vector<double> chaos_norm_decay(const ModelParams& p, int N, int grid_n) {
  if (p.hurst.is_sheet()) fail(ErrorCode::DomainError, "chaos_norm_decay is 1-parameter only");
  validate_params(p);
  if (N < 0) fail(ErrorCode::DomainError, "truncation must be >= 0");
  const TimeGrid g(grid_n, p.T);
  const double alpha = p.hurst.alpha;
  const Eigen::MatrixXd C = increment_covariance(alpha, g);
  std::vector<double> m(grid_n), eb(grid_n);
  for (int k = 0; k < grid_n; ++k) {
    m[k] = g.midpoint(k);
    eb[k] = std::exp(p.b * m[k]);
  }
  std::vector<double> norms(static_cast<std::size_t>(N) + 1);
  for (int n = 0; n <= N; ++n) {
    NeumaierSum s;
    for (int k = 0; k < grid_n; ++k)
      for (int l = 0; l < grid_n; ++l) s.add(eb[k] * eb[l] * std::pow(cov_fbm(alpha, m[k], m[l]), n) * C(k, l));
    const double coef = std::pow(std::abs(p.a), n) / std::tgamma(n + 1.0);
    norms[n] = coef * std::sqrt(std::max(0.0, s.value()));
  }
  return norms;
}

NormEnvelope fit_norm_envelope(const std::vector<double>& norms, const ModelParams& p) {
  NormEnvelope e;
  const double alpha = p.hurst.alpha;
  for (std::size_t n = 0; n < norms.size(); ++n)
    e.envelope.push_back(std::pow(std::abs(p.a), static_cast<double>(n)) *
                         std::pow(p.T, alpha * (2.0 * n + 1.0)) / std::tgamma(n + 1.0));
  for (std::size_t n = 0; n < norms.size() && n <= 2; ++n)
    if (e.envelope[n] > 0.0) e.C = std::max(e.C, norms[n] / e.envelope[n]);
  e.dominated = true;
  for (std::size_t n = 0; n < norms.size(); ++n)
    if (norms[n] > e.C * e.envelope[n] * (1.0 + 1e-12)) e.dominated = false;
  return e;
}

// ---- Wick products and discrete multiple integrals ---------------------------

double wick_product(std::span<const double> y, const std::function<double(int, int)>& cov) {
  const int n = static_cast<int>(y.size());
  if (n > 4) fail(ErrorCode::OrderTooHigh, "Wick products are implemented up to order 4");
  double sub[16];
  sub[0] = 1.0;
  // sub[mask] = Wick product of the variables in mask, built by adding the
  // highest index last: :S u {j}: = y_j :S: - sum_{i in S} c_ij :S \ {i}:
  for (int j = 0; j < n; ++j) {
    const int bit = 1 << j;
    for (int m = 0; m < bit; ++m) {
      double v = y[j] * sub[m];
      for (int i = 0; i < j; ++i)
        if (m & (1 << i)) v -= cov(i, j) * sub[m & ~(1 << i)];
      sub[m | bit] = v;
    }
  }
  return sub[(1 << n) - 1];
}

namespace {

template <class Pt, class Kernel>
double enumerate_distinct(int n, int cells, const std::vector<Pt>& mids, const std::vector<double>& Y,
                          const std::function<double(int, int)>& cellcov, const Kernel& kernel) {
  std::vector<int> idx(n);
  std::vector<Pt> pts(n);
  std::vector<double> y(n);
  std::vector<char> used(cells, 0);
  NeumaierSum sum;
  std::function<void(int)> rec = [&](int d) {
    if (d == n) {
      const double kv = kernel(std::span<const Pt>(pts));
      if (kv == 0.0) return;
      auto cov = [&](int i, int j) { return cellcov(idx[i], idx[j]); };
      sum.add(kv * wick_product(y, cov));
      return;
    }
    for (int c = 0; c < cells; ++c) {
      if (used[c]) continue;
      used[c] = 1;
      idx[d] = c;
      pts[d] = mids[c];
      y[d] = Y[c];
      rec(d + 1);
      used[c] = 0;
    }
  };
  rec(0);
  return sum.value();
}

}  // namespace

double discrete_multiple_integral(const std::function<double(std::span<const double>)>& kernel, int n,
                                  const GaussianField& path) {
  if (n < 0) fail(ErrorCode::DomainError, "order must be >= 0");
  if (n > 4) fail(ErrorCode::OrderTooHigh, "discrete multiple integrals are limited to n <= 4");
  if (path.dims != 1) fail(ErrorCode::DomainError, "expected a 1-parameter path");
  if (n == 0) return kernel({});
  const TimeGrid& g = *path.grid1;
  const int cells = g.n_steps();
  const Eigen::MatrixXd C = increment_covariance(path.alpha, g);
  std::vector<double> mids(cells), Y(cells);
  for (int k = 0; k < cells; ++k) {
    mids[k] = g.midpoint(k);
    Y[k] = path.increment(k);
  }
  return enumerate_distinct<double>(n, cells, mids, Y, [&](int i, int j) { return C(i, j); }, kernel);
}

double discrete_multiple_integral(const std::function<double(std::span<const Point2>)>& kernel, int n,
                                  const GaussianField& sheet) {
  if (n < 0) fail(ErrorCode::DomainError, "order must be >= 0");
  if (n > 4) fail(ErrorCode::OrderTooHigh, "discrete multiple integrals are limited to n <= 4");
  if (sheet.dims != 2) fail(ErrorCode::DomainError, "expected a sheet");
  if (n == 0) return kernel({});
  const Grid2D& g = *sheet.grid2;
  const int ns = g.n_s(), nt = g.n_t();
  const Eigen::MatrixXd Cs = increment_covariance(sheet.alpha, g.s_axis());
  const Eigen::MatrixXd Ct = increment_covariance(*sheet.beta, g.t_axis());
  std::vector<Point2> mids(ns * nt);
  std::vector<double> Y(ns * nt);
  for (int k = 0; k < ns; ++k)
    for (int l = 0; l < nt; ++l) {
      mids[k * nt + l] = Point2{g.s_axis().midpoint(k), g.t_axis().midpoint(l)};
      Y[k * nt + l] = sheet.increment(k, l);
    }
  auto cov = [&](int c, int d) { return Cs(c / nt, d / nt) * Ct(c % nt, d % nt); };
  return enumerate_distinct<Point2>(n, ns * nt, mids, Y, cov, kernel);
}

// ---- sheet kernels -------------------------------------------------------------

double kernel_sheet_eval(int n, double a, double b, Point2 z, std::span<const Point2> args) {
  if (n < 0 || static_cast<int>(args.size()) != n) fail(ErrorCode::DomainError, "kernel_sheet_eval: need n points");
  if (n == 0) return h0(b * z.s * z.t);
  std::vector<Point2> p(args.begin(), args.end());
  for (const auto& q : p)
    if (q.s < 0.0 || q.t < 0.0 || q.s > z.s || q.t > z.t) return 0.0;
  std::sort(p.begin(), p.end(), [](const Point2& x, const Point2& y) { return x.s < y.s || (x.s == y.s && x.t < y.t); });
  for (int j = 1; j < n; ++j)
    if (p[j].t < p[j - 1].t) return 0.0;
  double v = std::pow(a, n) / std::tgamma(n + 1.0);
  Point2 prev{0.0, 0.0};
  for (const auto& q : p) {
    v *= h0(b * (q.s - prev.s) * (q.t - prev.t));
    prev = q;
  }
  return v * h0(b * (z.s - prev.s) * (z.t - prev.t));
}

double kernel_sheet_eval_b0_literal(int n, double a, Point2 z, std::span<const Point2> args) {
  if (n < 0 || static_cast<int>(args.size()) != n) fail(ErrorCode::DomainError, "kernel_sheet_eval_b0_literal: need n points");
  if (n == 0) return 1.0;
  auto le = [](const Point2& x, const Point2& y) { return x.s >= 0.0 && x.t >= 0.0 && x.s <= y.s && x.t <= y.t; };
  int count = 0;
  for (int i = 0; i < n; ++i) {
    if (!le(args[i], z)) continue;
    bool all = true;
    for (int j = 0; j < n && all; ++j)
      if (j != i && !le(args[j], args[i])) all = false;
    count += all;
  }
  return std::pow(a, n) / std::tgamma(n + 1.0) * count;
}

// ---- deterministic sheet equation ----------------------------------------------

double deterministic_sheet_solution(double a, double s, double t) { return h0(a * s * t); }

Eigen::MatrixXd cumulative_quadrature_matrix(const TimeGrid& grid) {
  const int n = grid.n_steps();
  const double h = grid.h();
  Eigen::MatrixXd cell = Eigen::MatrixXd::Zero(n, n + 1);  // weights of each cell integral
  for (int j = 0; j < n; ++j) {
    if (n < 3) {
      cell(j, j) = cell(j, j + 1) = 0.5 * h;
    } else if (j == 0) {
      cell(j, 0) = 9, cell(j, 1) = 19, cell(j, 2) = -5, cell(j, 3) = 1;
    } else if (j == n - 1) {
      cell(j, n - 3) = 1, cell(j, n - 2) = -5, cell(j, n - 1) = 19, cell(j, n) = 9;
    } else {
      cell(j, j - 1) = -1, cell(j, j) = 13, cell(j, j + 1) = 13, cell(j, j + 2) = -1;
    }
  }
  if (n >= 3) cell *= h / 24.0;
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(n + 1, n + 1);
  for (int i = 1; i <= n; ++i) Q.row(i) = Q.row(i - 1) + cell.row(i - 1);
  return Q;
}

PicardResult picard_sheet(double a, const Grid2D& grid, int max_iter, double tol) {
  const Eigen::MatrixXd Qs = cumulative_quadrature_matrix(grid.s_axis());
  const Eigen::MatrixXd QtT = cumulative_quadrature_matrix(grid.t_axis()).transpose();
  const int rs = grid.n_s() + 1, rt = grid.n_t() + 1;
  PicardResult r;
  r.g = Eigen::MatrixXd::Ones(rs, rt);
  for (int it = 1; it <= max_iter; ++it) {
    Eigen::MatrixXd next = (a * (Qs * r.g * QtT)).array() + 1.0;
    r.last_change = (next - r.g).cwiseAbs().maxCoeff();
    r.g = std::move(next);
    r.iterations = it;
    if (!std::isfinite(r.last_change)) fail(ErrorCode::Overflow, "Picard iteration diverged");
    if (r.last_change < tol) break;
  }
  for (int i = 0; i < rs; ++i)
    for (int j = 0; j < rt; ++j)
      r.sup_error = std::max(r.sup_error,
                             std::abs(r.g(i, j) - h0(a * grid.s_axis()[i] * grid.t_axis()[j])));
  return r;
}

}  // namespace fracsko
