#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "rglab/correlation.hpp"
#include "rglab/generative.hpp"
#include "rglab/rng.hpp"

namespace rglab {

// Which vector the sigma_q moment estimate is computed from: the raw sample
// correlations (the literal algorithm) or their Fisher transforms (the scale
// the prior actually lives on).
enum class SigmaQScale { raw, fisher };

// How the perturbed vector v is formed in the approximated estimator:
// paper_literal uses v_i = |r_i + z_i| (real correlations plus synthetic
// noise), synthetic uses v_i = |phi(rho_i) + z_i| (fully synthetic channel).
enum class ApproxMode { paper_literal, synthetic };

enum class EstimatorKind { straightforward, approximated };

const char* to_string(SigmaQScale scale);
const char* to_string(ApproxMode mode);
const char* to_string(EstimatorKind kind);

// Indices of the u largest entries, ties broken by ascending index. Callers
// selecting by magnitude pass absolute values.
std::vector<Index> top_u_indices(const Eigen::VectorXd& values, Index u);

// Selected vs. truth index sets with their overlap proportion.
struct SelectionOutcome {
  std::vector<Index> chosen;
  std::vector<Index> truth;
  double overlap = 0.0;  // |chosen ∩ truth| / u
};

SelectionOutcome select_top_u(const CorrelationVector& r,
                              const std::vector<Index>& truth, Index u);

// sqrt(max(W - 1/(n-3), 0)) where W is the 1/k empirical variance of the
// correlations (raw) or their Fisher transforms (fisher). `clamped` flags the
// W < 1/(n-3) case, which yields 0 rather than an error.
struct SigmaQEstimate {
  double value = 0.0;
  bool clamped = false;
};

SigmaQEstimate estimate_sigma_q(const CorrelationVector& r, SigmaQScale scale);

// One straightforward replicate: sample a dataset, select the top u features
// by |r|, score against the realized support. d_t is normalized to [0, 1].
struct StraightforwardResult {
  double d_t = 0.0;
  CorrelationVector r;
  std::vector<Index> support;
};

StraightforwardResult straightforward_replicate(const SparseLinearSpec& spec,
                                                Index n, RngStream& rng);

// One approximated replicate built on an existing correlation vector.
struct ApproximatedResult {
  double c_t = 0.0;
  SigmaQEstimate sigma_q;
};

ApproximatedResult approximated_replicate(const CorrelationVector& r, Index u,
                                          ApproxMode mode, SigmaQScale scale,
                                          RngStream& rng);

// Per-n aggregate over B replicates; means and SDs use the 1/B divisor.
struct ExperimentSummary {
  Index n = 0;
  Index B = 0;
  double d_mean = 0.0;
  double d_sd = 0.0;
  double c_mean = 0.0;
  double c_sd = 0.0;
  std::vector<double> d_ts;
  std::vector<double> c_ts;
  std::vector<double> sigma_q_hats;
  std::vector<bool> sigma_q_clamped;
};

// Runs B replicates per grid point; within a replicate the straightforward
// and approximated estimators share the same sampled dataset. Results are
// identical for any worker count: each replicate draws from its own
// substream and aggregation folds in replicate order.
std::vector<ExperimentSummary> run_experiment(const SparseLinearSpec& spec,
                                              const std::vector<Index>& n_grid,
                                              Index B, ApproxMode mode,
                                              SigmaQScale scale,
                                              const RngStream& rng,
                                              int workers = 1);

struct RobustnessCriterion {
  double target_overlap = 0.5;
};

void validate_criterion(const RobustnessCriterion& criterion);

struct SampleSizeProbe {
  Index n = 0;
  double mean = 0.0;
  double sd = 0.0;
};

// Search outcome; when the target is unreachable within [n_lo, n_hi] the
// exhausted flag is set and best_* report the closest probe.
struct SampleSizeResult {
  std::optional<Index> n_star;
  bool exhausted = false;
  Index best_n = 0;
  double best_mean = 0.0;
  Index resolution = 0;
  std::vector<SampleSizeProbe> trace;
};

// Doubling from n_lo until the criterion is met (or n_hi reached), then
// bisection down to `resolution`. Assumes mean overlap is increasing in n,
// which holds for the sparse model.
SampleSizeResult minimal_sample_size(const SparseLinearSpec& spec,
                                     const RobustnessCriterion& criterion,
                                     EstimatorKind estimator, Index n_lo,
                                     Index n_hi, Index B, ApproxMode mode,
                                     SigmaQScale scale, const RngStream& rng,
                                     int workers = 1, Index resolution = 50);

}  // namespace rglab
