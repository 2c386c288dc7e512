#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <random>

#include "fracsko/error.hpp"
#include "fracsko/special_functions.hpp"

using namespace fracsko;

namespace {

// h0(x) = I0(2 sqrt x) for x > 0 and J0(2 sqrt(-x)) for x < 0.
double h0_bessel(double x) {
  if (x >= 0.0) return boost::math::cyl_bessel_i(0, 2.0 * std::sqrt(x));
  return boost::math::cyl_bessel_j(0, 2.0 * std::sqrt(-x));
}

double d_closed(double a) {
  return std::sqrt(2.0 * a * std::tgamma(1.5 - a) / (std::tgamma(a + 0.5) * std::tgamma(2.0 - 2.0 * a)));
}

}  // namespace

TEST(H0, Origin) { EXPECT_EQ(h0(0.0), 1.0); }

TEST(H0, MatchesBesselOracle) {
  for (double x : {-19.5, -12.0, -7.6, -3.67, -1.0, -0.01, 0.01, 1.0, 4.0, 20.0, 60.0}) {
    const double ref = h0_bessel(x);
    EXPECT_NEAR(h0(x), ref, 1e-12 * std::max(1.0, std::abs(ref))) << "x=" << x;
  }
  EXPECT_NEAR(h0(1.0), 2.279585302336, 1e-11);
}

TEST(H0, AgreesWithHorner) {
  for (double x = -20.0; x <= 20.0; x += 0.37) {
    // 50 terms in Horner form: c_n = 1/(n!)^2, c_{n}/c_{n-1} = 1/n^2
    double v = 1.0;
    for (int n = 50; n >= 1; --n) v = 1.0 + v * x / (static_cast<double>(n) * n);
    EXPECT_NEAR(h0(x), v, 1e-12 * std::max(1.0, std::abs(v))) << "x=" << x;
  }
}

TEST(H0, FirstNegativeZero) {
  const double j01 = boost::math::cyl_bessel_j_zero(0.0, 1);
  EXPECT_NEAR(j01 * j01 / 4.0, 1.445796, 1e-6);
  EXPECT_NEAR(h0(-1.445796), 0.0, 1e-6);
}

TEST(H0, OverflowAndDomain) {
  EXPECT_THROW(h0(1e6), Error);
  try {
    h0(1e6);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Overflow);
  }
  EXPECT_THROW(h0(NAN), Error);
  EXPECT_NO_THROW(h0(1.2e5));
}

TEST(NegativityInterval, DeltaZeroIsBetweenBesselZeros) {
  const double j1 = boost::math::cyl_bessel_j_zero(0.0, 1), j2 = boost::math::cyl_bessel_j_zero(0.0, 2);
  const NegativityInterval I = negativity_interval(0.0);
  EXPECT_NEAR(I.lo, -j2 * j2 / 4.0, 1e-9);
  EXPECT_NEAR(I.hi, -j1 * j1 / 4.0, 1e-9);
  EXPECT_NEAR(I.lo, -7.6178, 1e-4);
  EXPECT_NEAR(I.hi, -1.4458, 1e-4);
}

TEST(NegativityInterval, DeltaZeroBracketedByDenseScan) {
  const NegativityInterval I = negativity_interval(0.0);
  // sign changes of the series on a 1e-3 grid
  std::vector<double> zeros;
  double prev = h0(-0.001);
  for (int k = 2; k <= 9000; ++k) {
    const double x = -1e-3 * k;
    const double v = h0(x);
    if ((v < 0.0) != (prev < 0.0)) zeros.push_back(x + 0.5e-3);
    prev = v;
  }
  ASSERT_GE(zeros.size(), 2u);
  EXPECT_NEAR(zeros[0], I.hi, 1e-3);
  EXPECT_NEAR(zeros[1], I.lo, 1e-3);
}

TEST(NegativityInterval, MinimumAndNoInterval) {
  const H0Minimum m = h0_negative_minimum();
  const double j11 = boost::math::cyl_bessel_j_zero(1.0, 1);  // J0' = -J1
  EXPECT_NEAR(m.x, -j11 * j11 / 4.0, 1e-7);
  EXPECT_NEAR(m.value, boost::math::cyl_bessel_j(0, j11), 1e-12);
  EXPECT_NEAR(m.value, -0.402759, 1e-6);
  try {
    negativity_interval(0.41);
    FAIL() << "expected NoInterval";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoInterval);
  }
  EXPECT_THROW(negativity_interval(-0.1), Error);
}

TEST(NegativityInterval, DeeperDeltaIsNestedAndHolds) {
  const NegativityInterval I0 = negativity_interval(0.0), I = negativity_interval(0.2);
  EXPECT_LT(I0.lo, I.lo);
  EXPECT_LT(I.hi, I0.hi);
  EXPECT_EQ(I.depth, 0.2);
  for (int k = 1; k < 2000; ++k) {
    const double x = I.lo + (I.hi - I.lo) * k / 2000.0;
    ASSERT_LT(h0(x), -0.2) << x;
  }
  EXPECT_NEAR(h0(I.lo), -0.2, 1e-10);
  EXPECT_NEAR(h0(I.hi), -0.2, 1e-10);
}

TEST(Hermite, SmallValues) {
  EXPECT_EQ(hermite(0, 1.7), 1.0);
  EXPECT_EQ(hermite(1, 1.7), 1.7);
  EXPECT_EQ(hermite(2, 3.0), 8.0);
  EXPECT_EQ(hermite(4, 0.0), 3.0);
  const auto all = hermite_all(4, 2.0);
  ASSERT_EQ(all.size(), 5u);
  EXPECT_EQ(all[4], 16.0 - 24.0 + 3.0);
}

TEST(Hermite, OrthogonalUnderGaussian) {
  std::mt19937_64 eng(17);
  std::normal_distribution<double> nd;
  const int M = 100000;
  std::vector<std::vector<double>> H(M);
  for (int i = 0; i < M; ++i) H[i] = hermite_all(4, nd(eng));
  for (int n = 0; n <= 4; ++n)
    for (int m = 0; m <= 4; ++m) {
      double s = 0.0, s2 = 0.0;
      for (int i = 0; i < M; ++i) {
        const double v = H[i][n] * H[i][m];
        s += v;
        s2 += v * v;
      }
      const double mean = s / M;
      const double se = std::sqrt((s2 / M - mean * mean) / (M - 1));
      const double target = n == m ? std::tgamma(n + 1.0) : 0.0;
      if (n + m == 0) {
        EXPECT_EQ(mean, 1.0);
        continue;
      }
      EXPECT_LE(std::abs(mean - target), 4.0 * se) << n << "," << m;
    }
}

TEST(Calibration, HalfIsOne) {
  EXPECT_NEAR(calibrate_d_alpha(0.5), 1.0, 1e-14);
  const VolterraKernelSpec s = make_kernel_spec(0.5);
  EXPECT_NEAR(volterra_kernel(s, 1.0, 0.3), 1.0, 1e-14);
  EXPECT_NEAR(volterra_kernel(s, 2.0, 1.9), 1.0, 1e-14);
}

TEST(Calibration, MatchesClosedFormConstant) {
  for (double a : {0.1, 0.25, 0.3, 0.49, 0.51, 0.75, 0.9}) EXPECT_NEAR(calibrate_d_alpha(a), d_closed(a), 1e-9) << a;
}

TEST(Calibration, PinnedRegressionValues) {
  EXPECT_NEAR(calibrate_d_alpha(0.75), 1.0696446350, 1e-8);
  EXPECT_NEAR(calibrate_d_alpha(0.25), 0.6459980037, 1e-8);
}

TEST(Calibration, ContinuousThroughHalf) {
  EXPECT_LT(std::abs(calibrate_d_alpha(0.49) - 1.0), 0.1);
  EXPECT_LT(std::abs(calibrate_d_alpha(0.51) - 1.0), 0.1);
}

TEST(VolterraKernel, SquareIntegralIsVariance) {
  // independent tanh-sinh pass over the kernel, not the library's inner product
  boost::math::quadrature::tanh_sinh<double> ts;
  for (double a : {0.25, 0.5, 0.75}) {
    const VolterraKernelSpec spec = make_kernel_spec(a);
    for (double t : {0.5, 1.0}) {
      // two-argument form: xc = t - s on the right half, so the gap stays exact
      auto f = [&](double s, double xc) {
        const double gap = s > 0.5 * t ? xc : t - s;
        if (s <= 0.0 || gap <= 0.0) return 0.0;
        const double k = volterra_kernel_gap(spec, t, s, gap);
        return k * k;
      };
      const double v = ts.integrate(f, 0.0, t, 1e-12);
      EXPECT_NEAR(v, std::pow(t, 2 * a), 1e-4) << a << " " << t;
      EXPECT_NEAR(kernel_sq_integral(spec, t), std::pow(t, 2 * a), 1e-10);
    }
  }
}

TEST(VolterraKernel, IndependentF1Oracle) {
  // F1(z) = d (1/2 - a) int_0^{z-1} th^(a - 3/2) (1 - (1 + th)^(a - 1/2)) dth,
  // integrated here with adaptive Gauss-Kronrod after th = w^2.
  const double a = 0.75;
  const double d = d_closed(a);
  auto F1 = [&](double z) {
    auto g = [&](double w) {
      if (w == 0.0) return 0.0;
      return 2.0 * std::pow(w, 2.0 * a - 2.0) * (1.0 - std::pow(1.0 + w * w, a - 0.5));
    };
    return d * (0.5 - a) *
           boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, 0.0, std::sqrt(z - 1.0), 20, 1e-14);
  };
  const double ref = d * std::pow(0.5, a - 0.5) + std::pow(0.5, a - 0.5) * F1(2.0);
  const VolterraKernelSpec spec = make_kernel_spec(a);
  EXPECT_NEAR(volterra_kernel(spec, 1.0, 0.5), ref, 1e-6);
  EXPECT_NEAR(volterra_kernel(spec, 1.0, 0.5), 0.937591963698, 1e-10);
  EXPECT_NEAR(volterra_f1(spec, 2.0), F1(2.0), 1e-9);
  EXPECT_NEAR(volterra_f1(spec, 37.0), F1(37.0), 1e-9);
}

TEST(VolterraKernel, DomainChecks) {
  const VolterraKernelSpec spec = make_kernel_spec(0.3);
  EXPECT_THROW(volterra_kernel(spec, 1.0, 1.0), Error);
  EXPECT_THROW(volterra_kernel(spec, 1.0, 0.0), Error);
  EXPECT_THROW(volterra_kernel(spec, 0.5, 0.7), Error);
}

TEST(VolterraKernel, CrossInnerProductIsCovariance) {
  for (double a : {0.3, 0.7}) {
    const VolterraKernelSpec spec = make_kernel_spec(a);
    const double r = 0.5 * (std::pow(0.4, 2 * a) + std::pow(0.9, 2 * a) - std::pow(0.5, 2 * a));
    EXPECT_NEAR(kernel_inner(spec, 0.4, 0.9), r, 1e-8) << a;
  }
}
