#include "fracsko/fractional_operators.hpp"

#include <algorithm>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>
#include <string>

#include "fracsko/error.hpp"
#include "fracsko/quadrature.hpp"

namespace fracsko {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

GridFunction1D make_grid_function(const TimeGrid& grid, const std::function<double(double)>& f) {
  GridFunction1D g{grid, {}};
  g.samples.reserve(grid.points().size());
  for (double t : grid.points()) g.samples.push_back(f(t));
  return g;
}

GridFunction2D make_grid_function(const Grid2D& grid, const std::function<double(double, double)>& f) {
  GridFunction2D g{grid, Eigen::MatrixXd(grid.n_s() + 1, grid.n_t() + 1)};
  for (int i = 0; i <= grid.n_s(); ++i)
    for (int j = 0; j <= grid.n_t(); ++j) g.samples(i, j) = f(grid.s_axis()[i], grid.t_axis()[j]);
  return g;
}

GridFunction1D indicator(const TimeGrid& grid, double t) {
  return make_grid_function(grid, [t](double x) { return x <= t ? 1.0 : 0.0; });
}

OperatorRegime regime_of(double alpha, double beta) {
  check_hurst(alpha, "alpha");
  check_hurst(beta, "beta");
  if (alpha == 0.5 || beta == 0.5)
    fail(ErrorCode::RegimeUndefined, "K^{-1} formulas need both Hurst parameters different from 1/2");
  if (alpha < 0.5 && beta < 0.5) return OperatorRegime::both_below_half;
  if (alpha > 0.5 && beta > 0.5) return OperatorRegime::both_above_half;
  return OperatorRegime::mixed;
}

// ---- K* ---------------------------------------------------------------

namespace {

// K(t,s) with t - s = gap >= 0; at gap == 0 returns the one-sided limit.
double kernel_at(const VolterraKernelSpec& spec, double t, double s, double gap) {
  if (gap > 0.0) return volterra_kernel_gap(spec, t, s, gap);
  if (spec.alpha > 0.5) return 0.0;
  if (spec.alpha == 0.5) return spec.d_alpha;
  return std::numeric_limits<double>::infinity();
}

void check_diverged(const quad::Result& r, const char* what) {
  if (!std::isfinite(r.value) || r.error > 1e-6 * std::max(1.0, std::abs(r.l1)))
    fail(ErrorCode::QuadratureDiverged, std::string(what) + ": correction integral did not settle (input too rough)");
}

// K*phi at s = t_j + lg = t_{j+1} - rg inside cell j (0 <= j < n).
double kstar_in_cell(const GridFunction1D& phi, const VolterraKernelSpec& spec, int j, double s, double lg,
                     double rg, const KStarOptions& opt) {
  const TimeGrid& g = phi.grid;
  const int n = g.n_steps();
  const double T = g.T();
  const double gapT = (T - g[j + 1]) + rg;
  const auto& v = phi.samples;

  if (opt.interp == Interpolation::step) {
    // phi(s) = v[j+1] on (t_j, t_{j+1}]
    const double ps = v[j + 1];
    double out = ps == 0.0 ? 0.0 : kernel_at(spec, T, s, gapT) * ps;
    for (int k = j + 1; k < n; ++k) {
      const double c = v[k + 1] - ps;
      if (c == 0.0) continue;
      const double ghi = (g[k + 1] - g[j + 1]) + rg;
      const double glo = (g[k] - g[j + 1]) + rg;
      out += c * (kernel_at(spec, g[k + 1], s, ghi) - kernel_at(spec, g[k], s, glo));
    }
    return out;
  }

  const double h = g.h();
  const double slope_j = (v[j + 1] - v[j]) / h;
  // at a node take the sample itself: a rounding residue in phi(t_{j+1}) - phi(s)
  // would meet the non-integrable (r - s)^(alpha - 3/2) on the next cell
  const double ps = rg == 0.0 ? v[j + 1] : v[j] + slope_j * lg;
  double out = ps == 0.0 ? 0.0 : kernel_at(spec, T, s, gapT) * ps;
  if (spec.alpha == 0.5) return out;
  // first piece [s, t_{j+1}]: phi(r) - phi(s) = slope_j (r - s)
  if (slope_j != 0.0 && rg > 0.0) {
    auto f = [&](double r, double l, double) { return slope_j * l * volterra_kernel_dt(spec, r, s, l); };
    auto res = quad::integrate_gaps(f, s, g[j + 1], opt.tol);
    check_diverged(res, "kstar");
    out += res.value;
  }
  for (int k = j + 1; k < n; ++k) {
    const double A = v[k] - ps;
    const double slope = (v[k + 1] - v[k]) / h;
    if (A == 0.0 && slope == 0.0) continue;
    const double off = (g[k] - g[j + 1]) + rg;  // t_k - s
    auto f = [&](double r, double l, double) {
      return (A + slope * l) * volterra_kernel_dt(spec, r, s, off + l);
    };
    auto res = quad::integrate_gaps(f, g[k], g[k + 1], opt.tol);
    check_diverged(res, "kstar");
    out += res.value;
  }
  return out;
}

// cell index j with s in (t_j, t_{j+1}]; s must lie in (0, T]
int cell_of(const TimeGrid& g, double s) {
  auto it = std::lower_bound(g.points().begin(), g.points().end(), s);
  int j = static_cast<int>(it - g.points().begin()) - 1;
  return std::clamp(j, 0, g.n_steps() - 1);
}

}  // namespace

double kstar_eval(const GridFunction1D& phi, const VolterraKernelSpec& spec, double s, const KStarOptions& opt) {
  const TimeGrid& g = phi.grid;
  if (phi.samples.size() != g.points().size()) fail(ErrorCode::DomainError, "kstar: sample count does not match grid");
  if (!(s > 0.0) || s > g.T()) fail(ErrorCode::DomainError, "kstar: s must lie in (0, T]");
  const int j = cell_of(g, s);
  return kstar_in_cell(phi, spec, j, s, s - g[j], g[j + 1] - s, opt);
}

double kstar_eval(const std::function<double(double)>& phi, double T, const VolterraKernelSpec& spec, double s,
                  double tol) {
  if (!(s > 0.0) || s > T) fail(ErrorCode::DomainError, "kstar: s must lie in (0, T]");
  const double ps = phi(s);
  double out = ps == 0.0 ? 0.0 : kernel_at(spec, T, s, T - s) * ps;
  if (spec.alpha == 0.5 || s == T) return out;
  auto f = [&](double r, double l, double) { return (phi(r) - ps) * volterra_kernel_dt(spec, r, s, l); };
  quad::Result res;
  try {
    res = quad::integrate_gaps(f, s, T, tol);
  } catch (const std::exception&) {
    fail(ErrorCode::QuadratureDiverged, "kstar: correction integral is not finite (input too rough)");
  }
  check_diverged(res, "kstar");
  return out + res.value;
}

GridFunction1D kstar_apply(const GridFunction1D& phi, double alpha, const KStarOptions& opt) {
  const VolterraKernelSpec spec = make_kernel_spec(alpha);
  GridFunction1D out{phi.grid, std::vector<double>(phi.samples.size(), kNaN)};
  const TimeGrid& g = phi.grid;
  for (int k = 1; k <= g.n_steps(); ++k) out.samples[k] = kstar_in_cell(phi, spec, k - 1, g[k], g.h(), 0.0, opt);
  return out;
}

double kstar_inner(const GridFunction1D& phi, const GridFunction1D& psi, double alpha, const KStarOptions& opt) {
  const VolterraKernelSpec spec = make_kernel_spec(alpha);
  const TimeGrid& g = phi.grid;
  if (psi.grid.n_steps() != g.n_steps() || psi.grid.T() != g.T())
    fail(ErrorCode::DomainError, "kstar_inner: grids differ");
  const bool same = &phi == &psi;
  double total = 0.0;
  for (int j = 0; j < g.n_steps(); ++j) {
    auto f = [&](double s, double lg, double rg) {
      const double a = kstar_in_cell(phi, spec, j, s, lg, rg, opt);
      return same ? a * a : a * kstar_in_cell(psi, spec, j, s, lg, rg, opt);
    };
    if (opt.corrupt_grading) {
      const int m = 8;
      const double w = g.h() / m;
      for (int i = 0; i < m; ++i) {
        const double lg = (i + 0.5) * w;
        total += w * f(g[j] + lg, lg, g.h() - lg);
      }
    } else {
      auto r = quad::integrate_gaps(f, g[j], g[j + 1], 1e-10);
      if (!std::isfinite(r.value)) fail(ErrorCode::QuadratureDiverged, "kstar_inner: non-finite integral");
      total += r.value;
    }
  }
  return total;
}

// ---- fractional integrals / derivatives on grids -------------------------

namespace {

void check_order(double g, const char* name) {
  if (!(g >= 1e-3)) fail(ErrorCode::IllConditionedOrder, std::string(name) + " below 1e-3");
}

}  // namespace

Eigen::MatrixXd rl_integral_matrix(const TimeGrid& grid, double g) {
  check_order(g, "integral order");
  const int n = grid.n_steps();
  const double h = grid.h();
  const double G = std::tgamma(g);
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(n + 1, n + 1);
  for (int k = 1; k <= n; ++k) {
    for (int j = 0; j < k; ++j) {
      const double lo = (k - j - 1) * h, hi = (k - j) * h;
      const double q1 = (std::pow(hi, g) - std::pow(lo, g)) / g;
      const double q2 = (std::pow(hi, g + 1) - std::pow(lo, g + 1)) / (g + 1);
      // f(u) = (f_j + D hi/h) - (D/h) w on the cell, w = x_k - u
      W(k, j) += (1.0 - hi / h) * q1 + q2 / h;
      W(k, j + 1) += (hi / h) * q1 - q2 / h;
    }
    W.row(k) /= G;
  }
  return W;
}

Eigen::MatrixXd marchaud_matrix(const TimeGrid& grid, double g) {
  if (!(g > 0.0 && g < 1.0)) fail(ErrorCode::IllConditionedOrder, "derivative order must lie in (0,1)");
  const int n = grid.n_steps();
  const double h = grid.h();
  const double G = std::tgamma(1.0 - g);
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(n + 1, n + 1);
  W.row(0).setConstant(kNaN);
  for (int k = 1; k <= n; ++k) {
    W(k, k) += std::pow(grid[k], -g);
    for (int j = 0; j < k; ++j) {
      const double lo = (k - j - 1) * h, hi = (k - j) * h;
      // f(x) - f(u) = c0 + (D/h) w, c0 = f_k - f_j - D hi/h, D = f_{j+1} - f_j
      const double B = (std::pow(hi, 1 - g) - std::pow(lo, 1 - g)) / (1 - g) / h;
      W(k, j + 1) += g * B;
      W(k, j) -= g * B;
      if (j < k - 1) {
        const double A = (std::pow(hi, -g) - std::pow(lo, -g)) / (-g);
        W(k, k) += g * A;
        W(k, j) += g * A * (-1.0 + hi / h);
        W(k, j + 1) += g * A * (-hi / h);
      }
    }
    W.row(k) /= G;
  }
  return W;
}

GridFunction2D frac_integral_2d(const GridFunction2D& f, double g1, double g2) {
  check_order(g1, "g1");
  check_order(g2, "g2");
  const Eigen::MatrixXd Ws = rl_integral_matrix(f.grid.s_axis(), g1);
  const Eigen::MatrixXd Wt = rl_integral_matrix(f.grid.t_axis(), g2);
  return GridFunction2D{f.grid, Ws * f.samples * Wt.transpose()};
}

namespace {

Eigen::MatrixXd marchaud_apply(const Grid2D& grid, const Eigen::MatrixXd& F, double g1, double g2) {
  Eigen::MatrixXd Ws = marchaud_matrix(grid.s_axis(), g1);
  Eigen::MatrixXd Wt = marchaud_matrix(grid.t_axis(), g2);
  Ws.row(0).setZero();
  Wt.row(0).setZero();
  Eigen::MatrixXd out = Ws * F * Wt.transpose();
  out.row(0).setConstant(kNaN);
  out.col(0).setConstant(kNaN);
  return out;
}

}  // namespace

GridFunction2D frac_derivative_2d(const GridFunction2D& f, double g1, double g2) {
  Eigen::MatrixXd fine = marchaud_apply(f.grid, f.samples, g1, g2);
  const int ns = f.grid.n_s(), nt = f.grid.n_t();
  if (ns >= 4 && nt >= 4 && ns % 2 == 0 && nt % 2 == 0) {
    Grid2D coarse_grid(ns / 2, nt / 2, f.grid.T());
    Eigen::MatrixXd Fc(ns / 2 + 1, nt / 2 + 1);
    for (int i = 0; i <= ns / 2; ++i)
      for (int j = 0; j <= nt / 2; ++j) Fc(i, j) = f.samples(2 * i, 2 * j);
    Eigen::MatrixXd coarse = marchaud_apply(coarse_grid, Fc, g1, g2);
    double diff = 0.0, scale = 0.0;
    for (int i = 1; i <= ns / 2; ++i)
      for (int j = 1; j <= nt / 2; ++j) {
        diff = std::max(diff, std::abs(fine(2 * i, 2 * j) - coarse(i, j)));
        scale = std::max(scale, std::abs(fine(2 * i, 2 * j)));
      }
    if (!std::isfinite(diff) || diff > 0.5 * scale + 1e-12)
      fail(ErrorCode::RoughInput, "fractional derivative changes by " + std::to_string(diff) +
                                      " under 2x refinement (scale " + std::to_string(scale) + ")");
  }
  return GridFunction2D{f.grid, std::move(fine)};
}

// ---- function versions --------------------------------------------------

double rl_integral(const std::function<double(double)>& f, double g, double x, double tol) {
  check_order(g, "integral order");
  if (!(x > 0.0)) return 0.0;
  if (g >= 1.0) {
    auto r = quad::integrate_gaps([&](double u, double, double rg) { return std::pow(rg, g - 1.0) * f(u); }, 0.0, x, tol);
    return r.value / std::tgamma(g);
  }
  // w = (x - u)^g absorbs the kernel, which is nearly non-integrable for small g
  const double top = std::pow(x, g);
  auto r = quad::integrate_gaps(
      [&](double w, double, double) {
        const double rg = std::pow(w, 1.0 / g);
        return rg >= x ? 0.0 : f(x - rg);
      },
      0.0, top, tol);
  return r.value / (g * std::tgamma(g));
}

double marchaud_derivative(const std::function<double(double)>& f, double g, double x, double tol) {
  if (!(g > 0.0 && g < 1.0)) fail(ErrorCode::IllConditionedOrder, "derivative order must lie in (0,1)");
  if (!(x > 0.0)) fail(ErrorCode::DomainError, "Marchaud derivative needs x > 0");
  const double fx = f(x);
  auto r = quad::integrate_gaps([&](double u, double, double rg) { return (fx - f(u)) / rg * std::pow(rg, -g); },
                                0.0, x, tol);
  return (fx * std::pow(x, -g) + g * r.value) / std::tgamma(1.0 - g);
}

double rl_integral_2d(const std::function<double(double, double)>& f, double g1, double g2, double x, double y,
                      double tol) {
  check_order(g1, "g1");
  check_order(g2, "g2");
  if (!(x > 0.0) || !(y > 0.0)) return 0.0;
  auto outer = [&](double u, double, double ru) {
    auto inner = [&](double v, double, double rv) { return std::pow(rv, g2 - 1.0) * f(u, v); };
    return std::pow(ru, g1 - 1.0) * quad::integrate_gaps(inner, 0.0, y, tol).value;
  };
  return quad::integrate_gaps(outer, 0.0, x, tol).value / (std::tgamma(g1) * std::tgamma(g2));
}

double marchaud_derivative_2d(const std::function<double(double, double)>& f, double g1, double g2, double x,
                              double y, double tol) {
  if (!(g1 > 0.0 && g1 < 1.0) || !(g2 > 0.0 && g2 < 1.0))
    fail(ErrorCode::IllConditionedOrder, "derivative orders must lie in (0,1)");
  if (!(x > 0.0) || !(y > 0.0)) fail(ErrorCode::DomainError, "Marchaud derivative needs x, y > 0");
  // Differences at the rounding level of their terms are dropped, and the
  // rest are divided by the gap before the power is applied. Next to the
  // endpoint the true difference is O(gap) and tanh-sinh samples gaps far
  // below the rounding level of f.
  constexpr double floor = 16.0 * std::numeric_limits<double>::epsilon();
  auto clean = [](double d, double scale) { return std::abs(d) <= floor * scale ? 0.0 : d; };
  const double fxy = f(x, y);
  const double t0 = fxy * std::pow(x, -g1) * std::pow(y, -g2);
  const double t1 = g1 * std::pow(y, -g2) *
                    quad::integrate_gaps(
                        [&](double u, double, double ru) {
                          const double fu = f(u, y);
                          return clean(fxy - fu, std::abs(fxy) + std::abs(fu)) / ru * std::pow(ru, -g1);
                        },
                        0.0, x, tol)
                        .value;
  const double t2 = g2 * std::pow(x, -g1) *
                    quad::integrate_gaps(
                        [&](double v, double, double rv) {
                          const double fv = f(x, v);
                          return clean(fxy - fv, std::abs(fxy) + std::abs(fv)) / rv * std::pow(rv, -g2);
                        },
                        0.0, y, tol)
                        .value;
  auto outer = [&](double u, double, double ru) {
    const double fuy = f(u, y);
    auto inner = [&](double v, double, double rv) {
      const double fxv = f(x, v), fuv = f(u, v);
      const double d = clean(fxy - fuy - fxv + fuv, std::abs(fxy) + std::abs(fuy) + std::abs(fxv) + std::abs(fuv));
      return d == 0.0 ? 0.0 : d / rv * std::pow(rv, -g2);
    };
    const double in = quad::integrate_gaps(inner, 0.0, y, tol).value;
    return in == 0.0 ? 0.0 : in / ru * std::pow(ru, -g1);
  };
  const double t3 = g1 * g2 * quad::integrate_gaps(outer, 0.0, x, tol).value;
  return (t0 + t1 + t2 + t3) / (std::tgamma(1.0 - g1) * std::tgamma(1.0 - g2));
}

// ---- K^{-1} F ------------------------------------------------------------

double kinv_axis_factor(double alpha, double t) {
  check_hurst(alpha, "alpha");
  if (alpha == 0.5) fail(ErrorCode::RegimeUndefined, "axis factor undefined at alpha = 1/2");
  if (!(t > 0.0)) fail(ErrorCode::DomainError, "axis factor needs t > 0");
  const double p = 0.5 - alpha;
  auto f = [p](double u) { return std::pow(u, p); };
  const double core = alpha < 0.5 ? rl_integral(f, p, t) : marchaud_derivative(f, -p, t);
  return std::pow(t, -p) * core;
}

double kinv_axis_factor_closed(double alpha, double t) {
  return std::tgamma(1.5 - alpha) / std::tgamma(2.0 - 2.0 * alpha) * std::pow(t, 0.5 - alpha);
}

double kinv_normalization(double alpha) { return calibrate_d_alpha(alpha) * std::tgamma(alpha + 0.5); }

double mixed_regime_prefactor(double alpha, double beta) {
  if (alpha > 0.5) std::swap(alpha, beta);
  return 1.0 / (std::tgamma(0.5 - alpha) * std::tgamma(1.5 - beta));
}

double kinv_F_point(double alpha, double beta, double t, double s) {
  const OperatorRegime reg = regime_of(alpha, beta);
  if (!(t > 0.0) || !(s > 0.0)) fail(ErrorCode::DomainError, "K^{-1}F is evaluated on interior points only");
  if (reg == OperatorRegime::both_above_half) {
    // Four-term form for f(u,v) = u^pa v^pb. Every term factorizes, so the
    // double integral becomes a product of two one-axis Marchaud integrals;
    // the nested 2-d quadrature loses everything to cancellation next to the
    // u^pa singularity at the origin.
    const double pa = 0.5 - alpha, pb = 0.5 - beta;
    const double g1 = -pa, g2 = -pb;
    const double fx = std::pow(t, pa), fy = std::pow(s, pb);
    auto tail = [](double p, double g, double x, double fx0) {
      return quad::integrate_gaps(
                 [&](double, double u, double ru) {
                   const double d = u < 0.5 * x ? fx0 - std::pow(u, p) : -fx0 * std::expm1(p * std::log1p(-ru / x));
                   return d / ru * std::pow(ru, -g);
                 },
                 0.0, x, 1e-12)
          .value;
    };
    const double A = tail(pa, g1, t, fx), B = tail(pb, g2, s, fy);
    const double t0 = fx * fy * std::pow(t, -g1) * std::pow(s, -g2);
    const double t1 = g1 * std::pow(s, -g2) * fy * A;
    const double t2 = g2 * std::pow(t, -g1) * fx * B;
    const double t3 = g1 * g2 * A * B;
    const double D = (t0 + t1 + t2 + t3) / (std::tgamma(1.0 - g1) * std::tgamma(1.0 - g2));
    return std::pow(t, -pa) * std::pow(s, -pb) * D;
  }
  return kinv_axis_factor(alpha, t) * kinv_axis_factor(beta, s);
}

GridFunction2D kinv_apply_F(double alpha, double beta, const Grid2D& grid) {
  regime_of(alpha, beta);
  GridFunction2D out{grid, Eigen::MatrixXd::Constant(grid.n_s() + 1, grid.n_t() + 1, kNaN)};
  for (int i = 1; i < grid.n_s(); ++i)
    for (int j = 1; j < grid.n_t(); ++j)
      out.samples(i, j) = kinv_F_point(alpha, beta, grid.s_axis()[i], grid.t_axis()[j]);
  return out;
}

double discrete_l2_norm_sq(const GridFunction2D& f) {
  double sum = 0.0;
  for (int i = 1; i < f.grid.n_s(); ++i)
    for (int j = 1; j < f.grid.n_t(); ++j) sum += f.samples(i, j) * f.samples(i, j);
  return sum * f.grid.s_axis().h() * f.grid.t_axis().h();
}

double kinv_F_norm_sq(double alpha, double beta, double T) {
  regime_of(alpha, beta);
  auto axis = [T](double h) {
    auto r = quad::integrate_gaps(
        [h](double t, double, double) {
          const double v = kinv_axis_factor(h, t);
          return v * v;
        },
        0.0, T, 1e-9);
    return r.value;
  };
  return axis(alpha) * axis(beta);
}

double power_difference_integral(double alpha, double t) {
  check_hurst(alpha, "alpha");
  if (!(t > 0.0)) fail(ErrorCode::DomainError, "power identity needs t > 0");
  const double p = 0.5 - alpha;
  const double tp = std::pow(t, p);
  auto f = [&](double, double u, double rg) {
    // t^p - u^p; near u = t written through rg to keep precision
    const double diff = u < 0.5 * t ? tp - std::pow(u, p) : -tp * std::expm1(p * std::log1p(-rg / t));
    return diff * std::pow(rg, -alpha - 0.5);
  };
  return quad::integrate_gaps(f, 0.0, t, 1e-12).value;
}

double power_difference_constant(double alpha) {
  const double p = 0.5 - alpha;
  // B(p+1, p) continued through Gamma for p < 0
  const double B = std::tgamma(p + 1.0) * std::tgamma(p) / std::tgamma(2.0 * p + 1.0);
  return 1.0 / p - B;
}

// ---- Girsanov ------------------------------------------------------------

double girsanov_log_density(double epsilon, const GaussianField& sheet, double q) {
  if (!(epsilon > 0.0)) fail(ErrorCode::DomainError, "epsilon must be positive");
  if (sheet.dims != 2) fail(ErrorCode::DomainError, "Girsanov density needs a sheet");
  const double w = sheet.values(sheet.values.rows() - 1, sheet.values.cols() - 1);
  return w / epsilon - q / (2.0 * epsilon * epsilon);
}

GirsanovShift girsanov_shift(const SheetFactor& f) {
  const int ns = f.grid.n_s(), nt = f.grid.n_t();
  Eigen::VectorXd s(ns), t(nt);
  for (int i = 0; i < ns; ++i) s[i] = f.grid.s_axis()[i + 1];
  for (int j = 0; j < nt; ++j) t[j] = f.grid.t_axis()[j + 1];
  Eigen::VectorXd us = f.s.L.triangularView<Eigen::Lower>().solve(s);
  Eigen::VectorXd ut = f.t.L.triangularView<Eigen::Lower>().solve(t);
  GirsanovShift g;
  g.u = us * ut.transpose();
  g.norm_sq = us.squaredNorm() * ut.squaredNorm();
  return g;
}

double girsanov_transfer_log_density(double epsilon, const GaussianField& sheet, const GirsanovShift& shift) {
  if (!(epsilon > 0.0)) fail(ErrorCode::DomainError, "epsilon must be positive");
  if (sheet.dims != 2 || sheet.white_noise.rows() != shift.u.rows() || sheet.white_noise.cols() != shift.u.cols())
    fail(ErrorCode::DomainError, "shift and sheet grids differ");
  const double xi = (shift.u.array() * sheet.white_noise.array()).sum();
  return xi / epsilon - shift.norm_sq / (2.0 * epsilon * epsilon);
}

}  // namespace fracsko
