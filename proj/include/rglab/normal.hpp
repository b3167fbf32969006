#pragma once

namespace rglab {

// Standard normal CDF.
double normal_cdf(double z);

// Standard normal quantile for p in (0, 1); rational approximation refined by
// one Halley step, accurate to ~1e-15. Throws std::domain_error outside (0,1).
double normal_quantile(double p);

}  // namespace rglab
