#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace rglab {

// Equal-width histogram over [min, max]; the rightmost bin is closed.
struct HistogramData {
  std::vector<double> edges;        // bin_count + 1 ascending boundaries
  std::vector<std::int64_t> counts; // one per bin
  std::int64_t total = 0;
};

HistogramData histogram(std::span<const double> values, int bin_count);

// Default bin count when unspecified: ceil(1 + log2 m).
int sturges_bin_count(std::size_t m);

struct QQPair {
  double theoretical = 0.0;
  double sample = 0.0;
};

// Normal QQ pairs with plotting positions (i - 0.5) / m, ascending.
std::vector<QQPair> qq_normal(std::span<const double> values);

// Moment statistics (1/m divisors) plus the Kolmogorov-Smirnov sup-distance
// to the normal fitted by mean and sd. A descriptive stand-in for eyeballing
// a histogram, not a formal test.
struct NormalitySummary {
  double mean = 0.0;
  double sd = 0.0;
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  double ks_distance = 0.0;
};

NormalitySummary normality_summary(std::span<const double> values);

}  // namespace rglab
