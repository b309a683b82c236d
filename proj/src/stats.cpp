#include "romes/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace romes {

double erf_inv(double x) {
  if (!(x > -1.0 && x < 1.0)) {
    throw std::invalid_argument("erf_inv argument must lie in (-1, 1)");
  }
  if (x == 0.0) return 0.0;
  // Winitzki approximation as the seed, then Newton on std::erf.
  const double a = 0.147;
  const double ln1mx2 = std::log(1.0 - x * x);
  const double t1 = 2.0 / (M_PI * a) + 0.5 * ln1mx2;
  double y = std::copysign(
      std::sqrt(std::sqrt(t1 * t1 - ln1mx2 / a) - t1), x);
  const double two_over_sqrt_pi = 2.0 / std::sqrt(M_PI);
  for (int i = 0; i < 4; ++i) {
    const double err = std::erf(y) - x;
    y -= err / (two_over_sqrt_pi * std::exp(-y * y));
  }
  return y;
}

double normal_quantile(double p) {
  return std::sqrt(2.0) * erf_inv(2.0 * p - 1.0);
}

StatSummary summarize(std::vector<double> values) {
  StatSummary s;
  s.count = static_cast<int>(values.size());
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  s.min = values.front();
  s.max = values.back();
  const std::size_t n = values.size();
  s.median = (n % 2 == 1) ? values[n / 2]
                          : 0.5 * (values[n / 2 - 1] + values[n / 2]);
  double sum = 0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(n);
  if (n > 1) {
    double ss = 0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(n - 1));
  }
  return s;
}

}  // namespace romes
