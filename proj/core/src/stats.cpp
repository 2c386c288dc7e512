#include "fracsko/stats.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <cmath>

#include "fracsko/error.hpp"

namespace fracsko {

void NeumaierSum::add(double x) {
  double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x))
    comp_ += (sum_ - t) + x;
  else
    comp_ += (x - t) + sum_;
  sum_ = t;
}

double compensated_sum(std::span<const double> xs) {
  NeumaierSum s;
  for (double x : xs) s.add(x);
  return s.value();
}

MonteCarloResult summarize(std::span<const double> samples, RngStreamSpec seed) {
  MonteCarloResult r;
  r.seed = seed;
  r.n_replicas = static_cast<long long>(samples.size());
  if (samples.empty()) return r;
  const double n = static_cast<double>(samples.size());
  const double mean = compensated_sum(samples) / n;
  NeumaierSum ss;
  for (double x : samples) ss.add((x - mean) * (x - mean));
  const double var = samples.size() > 1 ? ss.value() / (n - 1.0) : 0.0;
  r.estimate = mean;
  r.std_error = std::sqrt(var / n);
  r.ci95 = {mean - 1.959963984540054 * r.std_error, mean + 1.959963984540054 * r.std_error};
  return r;
}

double clopper_pearson_lower(long long k, long long n, double tail) {
  if (n <= 0 || k < 0 || k > n) fail(ErrorCode::DomainError, "clopper_pearson: bad counts");
  if (k == 0) return 0.0;
  return boost::math::ibeta_inv(static_cast<double>(k), static_cast<double>(n - k + 1), tail);
}

double clopper_pearson_upper(long long k, long long n, double tail) {
  if (n <= 0 || k < 0 || k > n) fail(ErrorCode::DomainError, "clopper_pearson: bad counts");
  if (k == n) return 1.0;
  return boost::math::ibeta_inv(static_cast<double>(k + 1), static_cast<double>(n - k), 1.0 - tail);
}

double z_score(const MonteCarloResult& r, double target) {
  if (r.std_error == 0.0) return r.estimate == target ? 0.0 : INFINITY;
  return (r.estimate - target) / r.std_error;
}

double ls_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) fail(ErrorCode::DomainError, "ls_slope: need >= 2 pairs");
  const double n = static_cast<double>(x.size());
  double mx = compensated_sum(x) / n, my = compensated_sum(y) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace fracsko
