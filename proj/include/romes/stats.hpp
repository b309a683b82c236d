#pragma once

#include <vector>

namespace romes {

/// Inverse of the error function, accurate to ~1e-12 via a rational initial
/// guess refined with Newton steps on std::erf.
double erf_inv(double x);

/// Quantile of N(0,1).
double normal_quantile(double p);

struct StatSummary {
  double mean = 0, median = 0, stddev = 0, min = 0, max = 0;
  int count = 0;
};

/// Mean/median/std(min/max); unbiased-variance convention.
StatSummary summarize(std::vector<double> values);

}  // namespace romes
