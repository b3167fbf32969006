#include "rglab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "rglab/normal.hpp"

namespace rglab {

int sturges_bin_count(std::size_t m) {
  if (m == 0) return 1;
  return static_cast<int>(
      std::ceil(1.0 + std::log2(static_cast<double>(m))));
}

HistogramData histogram(std::span<const double> values, int bin_count) {
  if (values.empty()) {
    throw std::invalid_argument("histogram needs a non-empty input");
  }
  if (bin_count < 1) {
    std::ostringstream msg;
    msg << "histogram needs bin_count >= 1, got " << bin_count;
    throw std::invalid_argument(msg.str());
  }

  const auto [min_it, max_it] = std::minmax_element(values.begin(), values.end());
  double lo = *min_it;
  double hi = *max_it;
  if (lo == hi) {
    hi = lo + 1e-9;  // degenerate range
  }
  const double width = (hi - lo) / bin_count;

  HistogramData h;
  h.edges.resize(static_cast<std::size_t>(bin_count) + 1);
  for (int b = 0; b <= bin_count; ++b) {
    h.edges[static_cast<std::size_t>(b)] = lo + width * b;
  }
  h.edges.back() = hi;

  h.counts.assign(static_cast<std::size_t>(bin_count), 0);
  for (double v : values) {
    auto bin = static_cast<std::int64_t>((v - lo) / width);
    bin = std::clamp<std::int64_t>(bin, 0, bin_count - 1);
    ++h.counts[static_cast<std::size_t>(bin)];
  }
  h.total = static_cast<std::int64_t>(values.size());
  return h;
}

std::vector<QQPair> qq_normal(std::span<const double> values) {
  const std::size_t m = values.size();
  if (m < 2) {
    throw std::invalid_argument("qq_normal needs at least 2 values");
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());

  std::vector<QQPair> pairs(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double p =
        (static_cast<double>(i) + 0.5) / static_cast<double>(m);
    pairs[i] = {normal_quantile(p), sorted[i]};
  }
  return pairs;
}

NormalitySummary normality_summary(std::span<const double> values) {
  const std::size_t m = values.size();
  if (m < 8) {
    std::ostringstream msg;
    msg << "normality_summary needs at least 8 values, got " << m;
    throw std::invalid_argument(msg.str());
  }
  const double inv_m = 1.0 / static_cast<double>(m);

  NormalitySummary s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum * inv_m;

  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : values) {
    const double d = v - s.mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  m2 *= inv_m;
  m3 *= inv_m;
  m4 *= inv_m;
  if (m2 <= 0.0) {
    throw std::domain_error("normality_summary: degenerate sample (sd = 0)");
  }
  s.sd = std::sqrt(m2);
  s.skewness = m3 / (m2 * s.sd);
  s.excess_kurtosis = m4 / (m2 * m2) - 3.0;

  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  double ks = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double f = normal_cdf((sorted[i] - s.mean) / s.sd);
    const double above = (static_cast<double>(i) + 1.0) * inv_m - f;
    const double below = f - static_cast<double>(i) * inv_m;
    ks = std::max({ks, above, below});
  }
  s.ks_distance = ks;
  return s;
}

}  // namespace rglab
