#pragma once

#include <vector>

namespace fracsko {

// h0(x) = sum_n x^n / (n!)^2. Throws Overflow once the value leaves double range.
double h0(double x);

// Interval endpoints lo < hi < 0 with h0 < -depth on (lo, hi). These are the
// endpoints of the first negative lobe of h0 (closest to the origin), which
// also carries the global minimum on the negative axis.
struct NegativityInterval {
  double lo = 0.0;
  double hi = 0.0;
  double depth = 0.0;
};

// Throws NoInterval when delta >= |min_{x<0} h0(x)|, DomainError for delta < 0.
NegativityInterval negativity_interval(double delta);

// Location and value of the minimum of h0 on the first negative lobe.
struct H0Minimum {
  double x = 0.0;
  double value = 0.0;
};
H0Minimum h0_negative_minimum();

// Probabilists' Hermite polynomials: H_{n+1} = x H_n - n H_{n-1}.
double hermite(int n, double x);
// H_0(x) .. H_N(x).
std::vector<double> hermite_all(int N, double x);

struct VolterraKernelSpec {
  double alpha = 0.5;
  double d_alpha = 1.0;
  int quadrature_n = 30;  // Gauss-Legendre nodes per panel inside F1 (30 or 60)
};

// Spec with d_alpha from calibrate_d_alpha.
VolterraKernelSpec make_kernel_spec(double alpha, int quadrature_n = 30);

// F1(z) for z >= 1 (includes the d_alpha factor).
double volterra_f1(const VolterraKernelSpec& spec, double z);

// K(t,s) = d (t-s)^(alpha-1/2) + s^(alpha-1/2) F1(t/s), 0 < s < t.
// Throws DomainError otherwise.
double volterra_kernel(const VolterraKernelSpec& spec, double t, double s);
// Same, with t - s supplied by the caller (for s close to t).
double volterra_kernel_gap(const VolterraKernelSpec& spec, double t, double s, double t_minus_s);

// dK/dt(t,s) = d (alpha-1/2) (t/s)^(alpha-1/2) (t-s)^(alpha-3/2).
double volterra_kernel_dt(const VolterraKernelSpec& spec, double t, double s, double t_minus_s);

// d_alpha with int_0^1 K(1,s)^2 ds = 1. Memoized per alpha.
double calibrate_d_alpha(double alpha);

// int_0^min(t,u) K(t,s) K(u,s) ds, by double-exponential quadrature.
double kernel_inner(const VolterraKernelSpec& spec, double t, double u);
inline double kernel_sq_integral(const VolterraKernelSpec& spec, double t) {
  return kernel_inner(spec, t, t);
}

}  // namespace fracsko
