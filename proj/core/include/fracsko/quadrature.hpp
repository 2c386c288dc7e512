#pragma once

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <cstddef>

namespace fracsko::quad {

struct Result {
  double value = 0.0;
  double error = 0.0;  // estimate reported by the rule
  double l1 = 0.0;     // integral of |f|
  std::size_t levels = 0;
};

inline boost::math::quadrature::tanh_sinh<double>& tanh_sinh_rule() {
  static boost::math::quadrature::tanh_sinh<double> rule(15);
  return rule;
}

// Double-exponential quadrature of g over (a,b), where g is called as
// g(x, x - a, b - x). The two gaps are accurate even when x sits within
// rounding distance of an endpoint, which is what endpoint-singular
// integrands such as (b - x)^(-0.7) need.
template <class G>
Result integrate_gaps(G&& g, double a, double b, double tol = 1e-10) {
  Result r;
  if (!(b > a)) return r;
  const double len = b - a;
  const double half = 0.5 * len;
  const double mid = 0.5 * (a + b);
  auto u = [&](double z, double zc) -> double {
    double x, lg, rg;
    if (z < -0.5) {
      lg = -half * zc;
      rg = len - lg;
      x = a + lg;
    } else if (z > 0.5) {
      rg = half * zc;
      lg = len - rg;
      x = b - rg;
    } else {
      x = mid + half * z;
      lg = x - a;
      rg = b - x;
    }
    // Abscissas this close to an endpoint carry negligible weight for any
    // integrable power singularity; skipping them keeps 1/gap finite.
    if (lg <= 1e-200 * len || rg <= 1e-200 * len) return 0.0;
    return g(x, lg, rg);
  };
  r.value = half * tanh_sinh_rule().integrate(u, tol, &r.error, &r.l1, &r.levels);
  r.error *= half;
  r.l1 *= half;
  return r;
}

// Composite Gauss-Legendre (30 points per panel) for smooth integrands.
template <class F>
double gauss_panels(F&& f, double a, double b, int panels) {
  using Rule = boost::math::quadrature::gauss<double, 30>;
  if (!(b > a)) return 0.0;
  const double h = (b - a) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    const double hi = (p + 1 == panels) ? b : lo + h;
    sum += Rule::integrate(f, lo, hi);
  }
  return sum;
}

}  // namespace fracsko::quad
