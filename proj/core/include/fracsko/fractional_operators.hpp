#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "fracsko/gaussian_fields.hpp"
#include "fracsko/model.hpp"
#include "fracsko/special_functions.hpp"

namespace fracsko {

struct GridFunction1D {
  TimeGrid grid;
  std::vector<double> samples;  // one per node
};

struct GridFunction2D {
  Grid2D grid;
  Eigen::MatrixXd samples;  // (n_s+1) x (n_t+1)
};

GridFunction1D make_grid_function(const TimeGrid& grid, const std::function<double(double)>& f);
GridFunction2D make_grid_function(const Grid2D& grid, const std::function<double(double, double)>& f);
// 1_{[0,t]} sampled on the nodes.
GridFunction1D indicator(const TimeGrid& grid, double t);

enum class OperatorRegime { both_below_half, both_above_half, mixed };
// Throws RegimeUndefined when either parameter is exactly 1/2.
OperatorRegime regime_of(double alpha, double beta);

// ---- K* ---------------------------------------------------------------

// How grid samples are extended to [0,T] before applying K*.
//   step:   left-continuous, phi = samples[k+1] on (t_k, t_{k+1}]; the
//           correction integral telescopes exactly into kernel differences.
//   linear: piecewise-linear interpolation; the correction integral is
//           computed piece by piece with double-exponential quadrature.
enum class Interpolation { step, linear };

struct KStarOptions {
  Interpolation interp = Interpolation::linear;
  double tol = 1e-10;
  // Debug switch: replaces the endpoint-graded rule in kstar_inner by an
  // 8-point uniform midpoint rule per cell, so that singular mass is missed.
  bool corrupt_grading = false;
};

// (K*phi)(s) = K(T,s) phi(s) + int_s^T (phi(r) - phi(s)) dK/dr(r,s) dr, 0 < s <= T.
double kstar_eval(const GridFunction1D& phi, const VolterraKernelSpec& spec, double s, const KStarOptions& opt = {});
// Same for an arbitrary function on [0,T]. Throws QuadratureDiverged when the
// correction integral does not settle (phi too rough for this alpha).
double kstar_eval(const std::function<double(double)>& phi, double T, const VolterraKernelSpec& spec, double s,
                  double tol = 1e-10);
// Values at the grid nodes; node 0 is NaN (K(T,s) is singular as s -> 0 for alpha < 1/2).
GridFunction1D kstar_apply(const GridFunction1D& phi, double alpha, const KStarOptions& opt = {});
// <K*phi, K*psi>_{L^2(0,T)}
double kstar_inner(const GridFunction1D& phi, const GridFunction1D& psi, double alpha, const KStarOptions& opt = {});
inline double kstar_l2_norm_sq(const GridFunction1D& phi, double alpha, const KStarOptions& opt = {}) {
  return kstar_inner(phi, phi, alpha, opt);
}

// ---- Riemann-Liouville integrals and Marchaud derivatives -------------

// Grid versions: product integration against the piecewise-linear interpolant.
// Returned (n+1) x (n+1) matrices act on node samples; the 2-d operators are
// tensor products W_s F W_t^T.
Eigen::MatrixXd rl_integral_matrix(const TimeGrid& grid, double g);
Eigen::MatrixXd marchaud_matrix(const TimeGrid& grid, double g);

// Throws IllConditionedOrder for g1 or g2 below 1e-3.
GridFunction2D frac_integral_2d(const GridFunction2D& f, double g1, double g2);
// Orders in (0,1). Nodes on either axis through the origin are NaN. Throws
// RoughInput when the result on the grid and on its 2x coarsening disagree
// by more than the size of the result itself.
GridFunction2D frac_derivative_2d(const GridFunction2D& f, double g1, double g2);

// Function versions, by double-exponential quadrature (used where the grid
// rules are too coarse, e.g. inversion identities at 1e-4).
double rl_integral(const std::function<double(double)>& f, double g, double x, double tol = 1e-11);
double marchaud_derivative(const std::function<double(double)>& f, double g, double x, double tol = 1e-11);
double rl_integral_2d(const std::function<double(double, double)>& f, double g1, double g2, double x, double y,
                      double tol = 1e-9);
// Four-term expanded Marchaud form of D^{g1,g2}. Meant for f bounded near the
// axes: the mixed second difference is formed in floating point, so a large
// f next to the origin swamps it.
// Accuracy is limited to about 1e-5 by the rounding floor of the differences;
// tighter tolerances only add refinement levels.
double marchaud_derivative_2d(const std::function<double(double, double)>& f, double g1, double g2, double x,
                              double y, double tol = 1e-6);

// ---- K^{-1} applied to F(t,s) = ts ------------------------------------

// One-axis factor of K^{-1}F as written in the inversion formulas:
//   alpha < 1/2: t^{alpha-1/2} I^{1/2-alpha}(u^{1/2-alpha})(t)
//   alpha > 1/2: t^{alpha-1/2} D^{alpha-1/2}(u^{1/2-alpha})(t)
double kinv_axis_factor(double alpha, double t);
// Closed form of the same factor: Gamma(3/2-alpha)/Gamma(2-2alpha) t^{1/2-alpha}.
double kinv_axis_factor_closed(double alpha, double t);
// Constant c with K(K^{-1} id) = c id for the calibrated kernel: d_alpha Gamma(alpha+1/2).
double kinv_normalization(double alpha);
// Prefactor carried by the mixed regime (alpha < 1/2 < beta):
// 1 / (Gamma(1/2-alpha) Gamma(3/2-beta)).
double mixed_regime_prefactor(double alpha, double beta);

// K^{-1}F at a point. For alpha, beta > 1/2 this evaluates the expanded
// four-term 2-d Marchaud form; otherwise the per-axis factors.
double kinv_F_point(double alpha, double beta, double t, double s);
// Values on interior nodes (boundary entries are NaN). Throws RegimeUndefined.
GridFunction2D kinv_apply_F(double alpha, double beta, const Grid2D& grid);
// Riemann sum of (K^{-1}F)^2 over the interior nodes times the cell area.
double discrete_l2_norm_sq(const GridFunction2D& f);
// int_{[0,T]^2} (K^{-1}F)^2 by quadrature of the axis factors.
double kinv_F_norm_sq(double alpha, double beta, double T);

// Power-difference integral: int_0^t (t^{1/2-a} - u^{1/2-a}) (t-u)^{-a-1/2} du.
double power_difference_integral(double alpha, double t);
// Its constant c(alpha) = 1/(1/2-alpha) - B(3/2-alpha, 1/2-alpha) (analytic continuation for alpha > 1/2).
double power_difference_constant(double alpha);

// ---- Girsanov ----------------------------------------------------------

// W_{T,T}/eps - q/(2 eps^2), with the field's value at the far corner.
double girsanov_log_density(double epsilon, const GaussianField& sheet, double kinvF_norm_sq);

// Discrete shift u with L_alpha u L_beta^T = [s_i t_j]: the white-noise
// coordinates of F(s,t) = st on the grid.
struct GirsanovShift {
  Eigen::MatrixXd u;
  double norm_sq = 0.0;
};
GirsanovShift girsanov_shift(const SheetFactor& factor);
// <u, Z>/eps - |u|^2/(2 eps^2): the density of the measure under which
// W - st/eps has the law of W at every grid node.
double girsanov_transfer_log_density(double epsilon, const GaussianField& sheet, const GirsanovShift& shift);

}  // namespace fracsko
