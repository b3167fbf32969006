#pragma once

#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "rglab/correlation.hpp"
#include "rglab/dataset.hpp"
#include "rglab/rng.hpp"

namespace rglab {

// Sparse linear model: features i.i.d. N(0, I), target is the sum of the u
// support columns. Active features have true correlation 1/sqrt(u) with the
// target. Support indices are 0-based.
struct SparseLinearSpec {
  Index k = 0;
  Index u = 0;
  std::optional<std::vector<Index>> support;  // sampled per dataset if absent
};

void validate_sparse_spec(const SparseLinearSpec& spec);

// Joint zero-mean Gaussian over (X_1,...,X_k, Y); the last coordinate is Y.
struct GaussianSpec {
  Eigen::MatrixXd covariance;  // (k+1) x (k+1)

  Index dimension() const { return covariance.rows(); }
  Index k() const { return covariance.rows() - 1; }
};

// Symmetry within 1e-12 and min eigenvalue >= -1e-10. Throws on violation.
void validate_gaussian_spec(const GaussianSpec& spec);

// N(theta, sigma_q^2) prior on the Fisher scale. The mean theta has no value
// in the source model's uses, so it defaults to 0.
struct PriorSpec {
  double sigma_q = 0.0;
  Index k = 0;
  double theta = 0.0;
};

void validate_prior_spec(const PriorSpec& spec);

// Uniform u-subset of {0,...,k-1}, returned sorted ascending.
std::vector<Index> sample_support(Index k, Index u, RngStream& rng);

// Returns the dataset together with the realized support.
std::pair<Dataset, std::vector<Index>> sample_sparse_dataset(
    const SparseLinearSpec& spec, Index n, RngStream& rng);

// Population correlations of the sparse model: 1/sqrt(u) on the support,
// 0 elsewhere. Requires spec.support to be present; the returned vector has
// n = 0 to mark it as population-level.
CorrelationVector true_correlations_sparse(const SparseLinearSpec& spec);

// Rows i.i.d. N(0, Sigma) via symmetric eigendecomposition; eigenvalues in
// [-1e-10, 0) are truncated to zero.
Dataset sample_gaussian_dataset(const GaussianSpec& spec, Index n,
                                RngStream& rng);

// k i.i.d. N(theta, sigma_q^2) draws on the Fisher scale.
FisherVector sample_prior_fisher(const PriorSpec& spec, RngStream& rng);

// fisher_true + i.i.d. N(0, 1/(n-3)) noise: the sampling channel the
// empirical-Bayes machinery assumes.
FisherVector synthetic_correlation_noise(const FisherVector& fisher_true,
                                         Index n, RngStream& rng);

}  // namespace rglab
