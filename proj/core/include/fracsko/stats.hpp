#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fracsko/model.hpp"

namespace fracsko {

// Compensated (Neumaier) summation.
class NeumaierSum {
 public:
  void add(double x);
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double compensated_sum(std::span<const double> xs);

// Mean, standard error (sample std / sqrt(n)) and a normal 95% interval.
// Samples are reduced in index order, so the result does not depend on
// which thread produced which sample.
MonteCarloResult summarize(std::span<const double> samples, RngStreamSpec seed);

// Lower end of the two-sided (1 - 2*tail) Clopper-Pearson interval; tail 0.025
// gives the usual 95% bound. Returns 0 when successes == 0.
double clopper_pearson_lower(long long successes, long long trials, double tail = 0.025);
double clopper_pearson_upper(long long successes, long long trials, double tail = 0.025);

// Number of standard errors separating an estimate from a target.
double z_score(const MonteCarloResult& r, double target);

// Least-squares slope of y against x.
double ls_slope(std::span<const double> x, std::span<const double> y);

}  // namespace fracsko
