#pragma once

#include <vector>

#include <Eigen/Core>

#include "rglab/dataset.hpp"
#include "rglab/moments.hpp"

namespace rglab {

// All empirical moments in this module use the 1/n convention (not 1/(n-1)).

// Fisher z-transformation, z = 0.5 * ln((1+h)/(1-h)). Throws std::domain_error
// for |h| >= 1.
double fisher(double h);

// Inverse of fisher(), i.e. tanh(z). Throws std::domain_error on non-finite z.
double fisher_inverse(double z);

// Pearson correlation of two equal-length vectors with 1/n moments.
// The result is clamped into [-1, 1] when floating point overshoots by a few
// ulps. Throws std::invalid_argument on length mismatch or n < 4 and
// std::domain_error when either vector has zero sample variance.
double pearson(const Eigen::Ref<const Eigen::VectorXd>& x,
               const Eigen::Ref<const Eigen::VectorXd>& y);

// A value that was exactly +-1 and got pulled inside the open interval before
// a Fisher transform can be applied.
struct ClampEvent {
  Index index;
  double original;
};

// Correlations of every feature column with the target, each strictly inside
// (-1, 1). Entries at exactly +-1 are clamped to +-(1 - 1e-12) and recorded.
struct CorrelationVector {
  Eigen::VectorXd values;
  Index n = 0;  // sample size behind the values; 0 marks population truth
  std::vector<ClampEvent> clamped;
};

CorrelationVector correlate_all(const Dataset& data);

// Entrywise Fisher transform of a correlation vector.
struct FisherVector {
  Eigen::VectorXd values;
};

FisherVector fisher_all(const CorrelationVector& r);

// Empirical plug-in estimates of everything entering the asymptotic
// independence condition for the pair (i, j). Columns and target are centered
// internally; i == j is allowed.
PairwiseMoments pairwise_moments(const Dataset& data, Index i, Index j);

}  // namespace rglab
