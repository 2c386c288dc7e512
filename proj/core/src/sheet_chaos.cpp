#include <cmath>

#include "fracsko/chaos_solver.hpp"
#include "fracsko/error.hpp"
#include "fracsko/special_functions.hpp"

namespace fracsko {

SheetChaosSolver::SheetChaosSolver(const ModelParams& p, const Grid2D& grid, int N) : p_(p), grid_(grid), N_(N) {
  validate_params(p);
  if (!p.hurst.beta) fail(ErrorCode::DomainError, "sheet solver needs beta");
  if (N < 0) fail(ErrorCode::DomainError, "truncation must be >= 0");
  if (N > 4) fail(ErrorCode::OrderTooHigh, "sheet chaos truncation is limited to N <= 4");
  const int ns = grid.n_s(), nt = grid.n_t();
  const double hs = grid.s_axis().h(), ht = grid.t_axis().h();
  const double b = p.b;
  cov_s_ = increment_covariance(p.hurst.alpha, grid.s_axis());
  cov_t_ = increment_covariance(*p.hurst.beta, grid.t_axis());
  step_h0_.resize(ns, nt);
  first_h0_.resize(ns, nt);
  tail_h0_.resize(ns, nt);
  for (int k = 0; k < ns; ++k)
    for (int l = 0; l < nt; ++l) {
      step_h0_(k, l) = h0(b * (k * hs) * (l * ht));
      first_h0_(k, l) = h0(b * grid.s_axis().midpoint(k) * grid.t_axis().midpoint(l));
      tail_h0_(k, l) = h0(b * ((k + 0.5) * hs) * ((l + 0.5) * ht));
    }
  order0_.resize(ns + 1, nt + 1);
  for (int i = 0; i <= ns; ++i)
    for (int j = 0; j <= nt; ++j) order0_(i, j) = h0(b * grid.s_axis()[i] * grid.t_axis()[j]);
}

namespace {

struct ChainWalk {
  int N;
  int ns, nt;
  double a;
  const Eigen::MatrixXd* Y;
  const Eigen::MatrixXd* cs;
  const Eigen::MatrixXd* ct;
  const Eigen::MatrixXd* step;
  std::vector<Eigen::MatrixXd>* G;  // G[n](k,l), n = 1..N
  int ks[4], ls[4];
  double apow[5];

  // prefix of length d ends at (k,l); sub holds Wick products of every subset
  // of the prefix (bit i = i-th chain cell).
  void extend(int d, int k, int l, double w, int run_s, int run_t, const double* sub) {
    (*G)[d](k, l) += apow[d] * w * sub[(1 << d) - 1];
    if (d >= N || d >= 4) return;
    const int full = (1 << d) - 1;
    double c[4];
    double next[16];
    for (int k2 = k; k2 < ns; ++k2) {
      const int rs = k2 == k ? run_s + 1 : 1;
      for (int l2 = (k2 == k ? l + 1 : l); l2 < nt; ++l2) {
        const int rt = l2 == l ? run_t + 1 : 1;
        // cell average of the chain indicator: a run of m tied cells costs 1/m!
        double w2 = w * (*step)(k2 - k, l2 - l);
        if (rs > 1) w2 /= rs;
        if (rt > 1) w2 /= rt;
        const double y = (*Y)(k2, l2);
        for (int i = 0; i < d; ++i) c[i] = (*cs)(ks[i], k2) * (*ct)(ls[i], l2);
        if (d + 1 == N) {
          double v = y * sub[full];
          for (int i = 0; i < d; ++i) v -= c[i] * sub[full & ~(1 << i)];
          (*G)[d + 1](k2, l2) += apow[d + 1] * w2 * v;
          continue;
        }
        const int bit = 1 << d;
        for (int m = 0; m < bit; ++m) {
          next[m] = sub[m];
          double v = y * sub[m];
          for (int i = 0; i < d; ++i)
            if (m & (1 << i)) v -= c[i] * sub[m & ~(1 << i)];
          next[m | bit] = v;
        }
        ks[d] = k2;
        ls[d] = l2;
        extend(d + 1, k2, l2, w2, rs, rt, next);
      }
    }
  }
};

}  // namespace

TruncatedChaosSolution SheetChaosSolver::solve(const GaussianField& sheet) const {
  const int ns = grid_.n_s(), nt = grid_.n_t();
  if (sheet.dims != 2 || sheet.grid2->n_s() != ns || sheet.grid2->n_t() != nt)
    fail(ErrorCode::DomainError, "sheet does not match the solver grid");
  Eigen::MatrixXd Y(ns, nt);
  for (int k = 0; k < ns; ++k)
    for (int l = 0; l < nt; ++l) Y(k, l) = sheet.increment(k, l);

  TruncatedChaosSolution out;
  out.N = N_;
  out.per_order.push_back(order0_);
  if (N_ >= 1) {
    std::vector<Eigen::MatrixXd> G(N_ + 1, Eigen::MatrixXd::Zero(ns, nt));
    ChainWalk walk{N_, ns, nt, p_.a, &Y, &cov_s_, &cov_t_, &step_h0_, &G, {}, {}, {}};
    walk.apow[0] = 1.0;
    for (int n = 1; n <= 4; ++n) walk.apow[n] = walk.apow[n - 1] * p_.a;
    for (int k = 0; k < ns; ++k)
      for (int l = 0; l < nt; ++l) {
        const double sub[2] = {1.0, Y(k, l)};
        walk.ks[0] = k;
        walk.ls[0] = l;
        walk.extend(1, k, l, first_h0_(k, l), 1, 1, sub);
      }
    const bool flat = p_.b == 0.0;
    for (int n = 1; n <= N_; ++n) {
      Eigen::MatrixXd X = Eigen::MatrixXd::Zero(ns + 1, nt + 1);
      if (flat) {
        // every tail factor is h0(0) = 1: plain 2-d prefix sums
        for (int i = 1; i <= ns; ++i)
          for (int j = 1; j <= nt; ++j) X(i, j) = G[n](i - 1, j - 1) + X(i - 1, j) + X(i, j - 1) - X(i - 1, j - 1);
      } else {
        for (int i = 1; i <= ns; ++i)
          for (int j = 1; j <= nt; ++j) {
            double v = 0.0;
            for (int k = 0; k < i; ++k)
              for (int l = 0; l < j; ++l) v += G[n](k, l) * tail_h0_(i - 1 - k, j - 1 - l);
            X(i, j) = v;
          }
      }
      out.per_order.push_back(std::move(X));
    }
  }
  out.total = out.per_order[0];
  for (int n = 1; n <= N_; ++n) out.total += out.per_order[n];
  return out;
}

TruncatedChaosSolution solve_sheet_chaos(const ModelParams& p, const Grid2D& grid, const GaussianField& sheet, int N) {
  return SheetChaosSolver(p, grid, N).solve(sheet);
}

}  // namespace fracsko
