#include "fracsko/special_functions.hpp"

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>

#include "fracsko/error.hpp"
#include "fracsko/quadrature.hpp"
#include "fracsko/stats.hpp"

namespace fracsko {

double h0(double x) {
  if (!std::isfinite(x)) fail(ErrorCode::DomainError, "h0: non-finite argument");
  if (x > 0.0) {
    // h0(x) = I0(2 sqrt(x)) ~ exp(2 sqrt x) / sqrt(4 pi sqrt x)
    const double r = 2.0 * std::sqrt(x);
    if (r - 0.5 * std::log(2.0 * std::numbers::pi * r) > 709.0)
      fail(ErrorCode::Overflow, "h0(" + std::to_string(x) + ") exceeds double range");
  }
  NeumaierSum sum;
  sum.add(1.0);
  double term = 1.0;
  const double ax = std::abs(x);
  for (int n = 1; n < 100000; ++n) {
    term *= x / (static_cast<double>(n) * n);
    sum.add(term);
    if (n > ax && std::abs(term) < 1e-17 * std::abs(sum.value())) break;
    if (term == 0.0) break;
  }
  const double v = sum.value();
  if (!std::isfinite(v)) fail(ErrorCode::Overflow, "h0 series overflow");
  return v;
}

namespace {

// The first negative lobe of h0 lies between the first two zeros of
// J0(2 sqrt y); these brackets are loose on purpose, the roots are refined
// from the series itself.
constexpr double kLobeLo = 1.0;
constexpr double kLobeHi = 10.0;

double g_neg(double y) { return h0(-y); }

double refine_root(double a, double b, double shift) {
  auto f = [shift](double y) { return g_neg(y) + shift; };
  std::uintmax_t it = 200;
  auto tol = boost::math::tools::eps_tolerance<double>(52);
  auto r = boost::math::tools::toms748_solve(f, a, b, tol, it);
  return 0.5 * (r.first + r.second);
}

}  // namespace

H0Minimum h0_negative_minimum() {
  static const H0Minimum m = [] {
    auto r = boost::math::tools::brent_find_minima(g_neg, 2.0, 6.0, 52);
    return H0Minimum{-r.first, r.second};
  }();
  return m;
}

NegativityInterval negativity_interval(double delta) {
  if (!(delta >= 0.0) || !std::isfinite(delta)) fail(ErrorCode::DomainError, "negativity_interval: delta must be >= 0");
  const H0Minimum m = h0_negative_minimum();
  if (delta >= std::abs(m.value))
    fail(ErrorCode::NoInterval, "h0 never drops below -" + std::to_string(delta) + " on the negative axis");
  const double ymin = -m.x;
  // g_neg + delta changes sign once on each side of the minimum inside the lobe.
  const double y_left = refine_root(kLobeLo, ymin, delta);
  const double y_right = refine_root(ymin, kLobeHi, delta);
  return NegativityInterval{-y_right, -y_left, delta};
}

double hermite(int n, double x) {
  if (n < 0) fail(ErrorCode::DomainError, "hermite: negative order");
  if (n == 0) return 1.0;
  double hm = 1.0, h = x;
  for (int k = 1; k < n; ++k) {
    double hn = x * h - k * hm;
    hm = h;
    h = hn;
  }
  return h;
}

std::vector<double> hermite_all(int N, double x) {
  if (N < 0) fail(ErrorCode::DomainError, "hermite_all: negative order");
  std::vector<double> H(static_cast<std::size_t>(N) + 1);
  H[0] = 1.0;
  if (N >= 1) H[1] = x;
  for (int k = 1; k < N; ++k) H[k + 1] = x * H[k] - k * H[k - 1];
  return H;
}

namespace {

template <int NP>
double gauss_panels_n(auto&& f, double a, double b, int panels) {
  using Rule = boost::math::quadrature::gauss<double, NP>;
  const double h = (b - a) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    const double hi = (p + 1 == panels) ? b : lo + h;
    sum += Rule::integrate(f, lo, hi);
  }
  return sum;
}

// int_0^Z theta^(alpha-3/2) (1 - (1+theta)^(alpha-1/2)) dtheta
template <int NP>
double f1_integral(double alpha, double Z) {
  const double e = alpha - 0.5;
  // split as th^e * (1 - (1+th)^e)/th so that tiny th does not overflow th^(e-1)
  auto integrand = [e](double th) { return std::pow(th, e) * (-std::expm1(e * std::log1p(th)) / th); };
  // theta = U u^p makes the integrand behave like u near u = 0
  const double p = 2.0 / (alpha + 0.5);
  const double U = std::min(Z, 1.0);
  auto near = [&](double u) {
    if (u <= 0.0) return 0.0;
    const double up = std::pow(u, p);
    return integrand(U * up) * U * p * up / u;
  };
  double total = gauss_panels_n<NP>(near, 0.0, 1.0, 1);
  if (Z > 1.0) {
    const double L = std::log(Z);
    auto far = [&](double v) {
      const double th = std::exp(v);
      return integrand(th) * th;
    };
    const int panels = std::max(1, static_cast<int>(std::ceil(L / 8.0)));
    total += gauss_panels_n<NP>(far, 0.0, L, panels);
  }
  return total;
}

double f1_from_gap(const VolterraKernelSpec& spec, double Z) {
  if (spec.alpha == 0.5 || Z <= 0.0) return 0.0;
  const double I = spec.quadrature_n >= 60 ? f1_integral<60>(spec.alpha, Z) : f1_integral<30>(spec.alpha, Z);
  return spec.d_alpha * (0.5 - spec.alpha) * I;
}

}  // namespace

double volterra_f1(const VolterraKernelSpec& spec, double z) {
  if (!(z >= 1.0)) fail(ErrorCode::DomainError, "F1 needs z >= 1");
  return f1_from_gap(spec, z - 1.0);
}

double volterra_kernel_gap(const VolterraKernelSpec& spec, [[maybe_unused]] double t, double s, double gap) {
  if (!(s > 0.0) || !(gap > 0.0)) fail(ErrorCode::DomainError, "K(t,s) needs 0 < s < t");
  const double e = spec.alpha - 0.5;
  double v = spec.d_alpha * std::pow(gap, e);
  if (e != 0.0) v += std::pow(s, e) * f1_from_gap(spec, gap / s);
  return v;
}

double volterra_kernel(const VolterraKernelSpec& spec, double t, double s) {
  if (!(s < t)) fail(ErrorCode::DomainError, "K(t,s) needs 0 < s < t");
  return volterra_kernel_gap(spec, t, s, t - s);
}

double volterra_kernel_dt(const VolterraKernelSpec& spec, double t, double s, double gap) {
  if (!(s > 0.0) || !(gap > 0.0)) fail(ErrorCode::DomainError, "dK/dt needs 0 < s < t");
  const double e = spec.alpha - 0.5;
  if (e == 0.0) return 0.0;
  return spec.d_alpha * e * std::pow(t / s, e) * std::pow(gap, e - 1.0);
}

namespace {

double kernel_inner_raw(const VolterraKernelSpec& spec, double t, double u, double tol, double* err) {
  const double m = std::min(t, u), M = std::max(t, u);
  if (!(m > 0.0)) return 0.0;
  auto g = [&](double s, double, double rg) {
    return volterra_kernel_gap(spec, m, s, rg) * volterra_kernel_gap(spec, M, s, (M - m) + rg);
  };
  auto r = quad::integrate_gaps(g, 0.0, m, tol);
  if (err) *err = r.error;
  return r.value;
}

}  // namespace

double calibrate_d_alpha(double alpha) {
  check_hurst(alpha, "alpha");
  if (alpha == 0.5) return 1.0;
  static std::mutex mu;
  static std::map<double, double> memo;
  {
    std::lock_guard lk(mu);
    if (auto it = memo.find(alpha); it != memo.end()) return it->second;
  }
  // K is linear in d (F1 carries the same factor), so the calibration
  // integral is d^2 * c and the positive root is c^(-1/2).
  VolterraKernelSpec unit{alpha, 1.0, 60};
  double err = 0.0;
  const double c = kernel_inner_raw(unit, 1.0, 1.0, 1e-12, &err);
  if (!std::isfinite(c) || !(c > 0.0) || err > 1e-8 * c)
    fail(ErrorCode::CalibrationFailed, "calibration integral did not converge for alpha=" + std::to_string(alpha));
  const double d = 1.0 / std::sqrt(c);
  std::lock_guard lk(mu);
  memo.emplace(alpha, d);
  return d;
}

VolterraKernelSpec make_kernel_spec(double alpha, int quadrature_n) {
  return VolterraKernelSpec{alpha, calibrate_d_alpha(alpha), quadrature_n};
}

double kernel_inner(const VolterraKernelSpec& spec, double t, double u) {
  double err = 0.0;
  return kernel_inner_raw(spec, t, u, 1e-11, &err);
}

}  // namespace fracsko
