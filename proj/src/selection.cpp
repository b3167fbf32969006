#include "rglab/selection.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace rglab {

const char* to_string(SigmaQScale scale) {
  return scale == SigmaQScale::raw ? "raw" : "fisher";
}

const char* to_string(ApproxMode mode) {
  return mode == ApproxMode::paper_literal ? "paper_literal" : "synthetic";
}

const char* to_string(EstimatorKind kind) {
  return kind == EstimatorKind::straightforward ? "straightforward"
                                                : "approximated";
}

std::vector<Index> top_u_indices(const Eigen::VectorXd& values, Index u) {
  const Index k = values.size();
  if (u <= 0 || u > k) {
    std::ostringstream msg;
    msg << "top_u_indices needs 0 < u <= k, got u = " << u << ", k = " << k;
    throw std::invalid_argument(msg.str());
  }
  std::vector<Index> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), Index{0});
  // Descending by value, ascending index on ties.
  std::partial_sort(order.begin(), order.begin() + u, order.end(),
                    [&values](Index lhs, Index rhs) {
                      if (values[lhs] != values[rhs]) {
                        return values[lhs] > values[rhs];
                      }
                      return lhs < rhs;
                    });
  std::vector<Index> top(order.begin(), order.begin() + u);
  std::sort(top.begin(), top.end());
  return top;
}

namespace {

double overlap_proportion(const std::vector<Index>& chosen,
                          const std::vector<Index>& truth, Index u) {
  // Both sets arrive sorted.
  std::vector<Index> common;
  std::set_intersection(chosen.begin(), chosen.end(), truth.begin(),
                        truth.end(), std::back_inserter(common));
  return static_cast<double>(common.size()) / static_cast<double>(u);
}

}  // namespace

SelectionOutcome select_top_u(const CorrelationVector& r,
                              const std::vector<Index>& truth, Index u) {
  SelectionOutcome outcome;
  outcome.chosen = top_u_indices(r.values.cwiseAbs(), u);
  outcome.truth = truth;
  std::sort(outcome.truth.begin(), outcome.truth.end());
  outcome.overlap = overlap_proportion(outcome.chosen, outcome.truth, u);
  return outcome;
}

SigmaQEstimate estimate_sigma_q(const CorrelationVector& r,
                                SigmaQScale scale) {
  const Index k = r.values.size();
  if (k < 2) {
    std::ostringstream msg;
    msg << "estimate_sigma_q needs k >= 2 correlations, got " << k;
    throw std::invalid_argument(msg.str());
  }
  if (r.n < 4) {
    std::ostringstream msg;
    msg << "estimate_sigma_q needs the sample size n >= 4 behind the "
           "correlations, got n = "
        << r.n;
    throw std::invalid_argument(msg.str());
  }

  Eigen::VectorXd values;
  if (scale == SigmaQScale::raw) {
    values = r.values;
  } else {
    values.resize(k);
    for (Index i = 0; i < k; ++i) {
      values[i] = fisher(r.values[i]);
    }
  }
  const double mean = values.mean();
  const double w =
      (values.array() - mean).square().sum() / static_cast<double>(k);
  const double noise = 1.0 / static_cast<double>(r.n - 3);

  SigmaQEstimate est;
  if (w <= noise) {
    est.value = 0.0;
    est.clamped = w < noise;
  } else {
    est.value = std::sqrt(w - noise);
  }
  return est;
}

StraightforwardResult straightforward_replicate(const SparseLinearSpec& spec,
                                                Index n, RngStream& rng) {
  RngStream data_stream = rng.child("data");
  auto [data, support] = sample_sparse_dataset(spec, n, data_stream);
  StraightforwardResult result;
  result.r = correlate_all(data);
  result.support = std::move(support);
  result.d_t = select_top_u(result.r, result.support, spec.u).overlap;
  return result;
}

ApproximatedResult approximated_replicate(const CorrelationVector& r, Index u,
                                          ApproxMode mode, SigmaQScale scale,
                                          RngStream& rng) {
  const Index k = r.values.size();
  if (u <= 0 || u > k) {
    std::ostringstream msg;
    msg << "approximated_replicate needs 0 < u <= k, got u = " << u
        << ", k = " << k;
    throw std::invalid_argument(msg.str());
  }

  ApproximatedResult result;
  result.sigma_q = estimate_sigma_q(r, scale);

  // Synthetic Fisher-scale truths from the fitted prior. A zero sigma_q
  // degenerates to the zero vector (the prior collapses to a point mass).
  Eigen::VectorXd phi_rho;
  if (result.sigma_q.value > 0.0) {
    RngStream prior_stream = rng.child("prior");
    phi_rho = sample_prior_fisher({result.sigma_q.value, k}, prior_stream)
                  .values;
  } else {
    phi_rho = Eigen::VectorXd::Zero(k);
  }
  const std::vector<Index> s1 = top_u_indices(phi_rho.cwiseAbs(), u);

  RngStream noise_stream = rng.child("noise");
  const double noise_sd = 1.0 / std::sqrt(static_cast<double>(r.n - 3));
  Eigen::VectorXd v(k);
  for (Index i = 0; i < k; ++i) {
    const double z = noise_sd * noise_stream.normal();
    const double base =
        mode == ApproxMode::paper_literal ? r.values[i] : phi_rho[i];
    v[i] = std::abs(base + z);
  }
  const std::vector<Index> s2 = top_u_indices(v, u);

  result.c_t = overlap_proportion(s2, s1, u);
  return result;
}

namespace {

struct ReplicateOutcome {
  double d_t = 0.0;
  double c_t = 0.0;
  double sigma_q_hat = 0.0;
  bool sigma_q_clamped = false;
};

ReplicateOutcome run_one_replicate(const SparseLinearSpec& spec, Index n,
                                   ApproxMode mode, SigmaQScale scale,
                                   RngStream stream) {
  StraightforwardResult straight = straightforward_replicate(spec, n, stream);
  RngStream approx_stream = stream.child("approx");
  ApproximatedResult approx =
      approximated_replicate(straight.r, spec.u, mode, scale, approx_stream);
  return {straight.d_t, approx.c_t, approx.sigma_q.value,
          approx.sigma_q.clamped};
}

// Mean and SD with the 1/B divisor.
std::pair<double, double> mean_sd(const std::vector<double>& xs) {
  const double b = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / b;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / b)};
}

}  // namespace

std::vector<ExperimentSummary> run_experiment(const SparseLinearSpec& spec,
                                              const std::vector<Index>& n_grid,
                                              Index B, ApproxMode mode,
                                              SigmaQScale scale,
                                              const RngStream& rng,
                                              int workers) {
  validate_sparse_spec(spec);
  if (B < 1) {
    throw std::invalid_argument("run_experiment needs B >= 1");
  }
  for (Index n : n_grid) {
    if (n < 4) {
      std::ostringstream msg;
      msg << "run_experiment needs every n >= 4, got " << n;
      throw std::invalid_argument(msg.str());
    }
  }
  if (workers < 1) workers = 1;

  struct Task {
    std::size_t grid_pos;
    Index n;
    Index t;
  };
  std::vector<Task> tasks;
  tasks.reserve(n_grid.size() * static_cast<std::size_t>(B));
  for (std::size_t gi = 0; gi < n_grid.size(); ++gi) {
    for (Index t = 0; t < B; ++t) {
      tasks.push_back({gi, n_grid[gi], t});
    }
  }

  std::vector<ReplicateOutcome> outcomes(tasks.size());
  auto worker_loop = [&](std::atomic<std::size_t>& next) {
    for (std::size_t idx = next.fetch_add(1); idx < tasks.size();
         idx = next.fetch_add(1)) {
      const Task& task = tasks[idx];
      // Streams keyed by (n, t): outcomes do not depend on which worker or
      // in which order the task runs.
      RngStream stream =
          rng.child("n", static_cast<std::uint64_t>(task.n))
              .child("replicate", static_cast<std::uint64_t>(task.t));
      outcomes[idx] = run_one_replicate(spec, task.n, mode, scale, stream);
    }
  };

  if (workers == 1 || tasks.size() <= 1) {
    std::atomic<std::size_t> next{0};
    worker_loop(next);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const int count = std::min<int>(workers, static_cast<int>(tasks.size()));
    pool.reserve(static_cast<std::size_t>(count));
    for (int w = 0; w < count; ++w) {
      pool.emplace_back([&] { worker_loop(next); });
    }
    for (auto& th : pool) th.join();
  }

  std::vector<ExperimentSummary> summaries;
  summaries.reserve(n_grid.size());
  std::size_t cursor = 0;
  for (std::size_t gi = 0; gi < n_grid.size(); ++gi) {
    ExperimentSummary summary;
    summary.n = n_grid[gi];
    summary.B = B;
    for (Index t = 0; t < B; ++t, ++cursor) {
      const ReplicateOutcome& o = outcomes[cursor];
      summary.d_ts.push_back(o.d_t);
      summary.c_ts.push_back(o.c_t);
      summary.sigma_q_hats.push_back(o.sigma_q_hat);
      summary.sigma_q_clamped.push_back(o.sigma_q_clamped);
    }
    std::tie(summary.d_mean, summary.d_sd) = mean_sd(summary.d_ts);
    std::tie(summary.c_mean, summary.c_sd) = mean_sd(summary.c_ts);
    summaries.push_back(std::move(summary));
  }
  return summaries;
}

void validate_criterion(const RobustnessCriterion& criterion) {
  if (!(criterion.target_overlap > 0.0 && criterion.target_overlap <= 1.0)) {
    std::ostringstream msg;
    msg << "target overlap must lie in (0, 1], got "
        << criterion.target_overlap;
    throw std::invalid_argument(msg.str());
  }
}

namespace {

SampleSizeProbe probe_mean_overlap(const SparseLinearSpec& spec, Index n,
                                   Index B, EstimatorKind estimator,
                                   ApproxMode mode, SigmaQScale scale,
                                   const RngStream& rng, int workers) {
  const auto summaries =
      run_experiment(spec, {n}, B, mode, scale, rng, workers);
  const ExperimentSummary& s = summaries.front();
  if (estimator == EstimatorKind::straightforward) {
    return {n, s.d_mean, s.d_sd};
  }
  return {n, s.c_mean, s.c_sd};
}

}  // namespace

SampleSizeResult minimal_sample_size(const SparseLinearSpec& spec,
                                     const RobustnessCriterion& criterion,
                                     EstimatorKind estimator, Index n_lo,
                                     Index n_hi, Index B, ApproxMode mode,
                                     SigmaQScale scale, const RngStream& rng,
                                     int workers, Index resolution) {
  validate_criterion(criterion);
  if (n_lo < 4 || n_lo >= n_hi) {
    std::ostringstream msg;
    msg << "minimal_sample_size needs 4 <= n_lo < n_hi, got [" << n_lo << ", "
        << n_hi << "]";
    throw std::invalid_argument(msg.str());
  }
  if (resolution < 1) resolution = 1;

  SampleSizeResult result;
  result.resolution = resolution;
  const double target = criterion.target_overlap;

  auto probe = [&](Index n) {
    const SampleSizeProbe p = probe_mean_overlap(spec, n, B, estimator, mode,
                                                 scale, rng, workers);
    result.trace.push_back(p);
    if (result.trace.size() == 1 || p.mean > result.best_mean) {
      result.best_mean = p.mean;
      result.best_n = n;
    }
    return p.mean;
  };

  // Doubling phase.
  Index n = n_lo;
  Index last_fail = 0;
  Index first_pass = 0;
  while (true) {
    const double mean = probe(n);
    if (mean >= target) {
      first_pass = n;
      break;
    }
    last_fail = n;
    if (n >= n_hi) break;
    n = std::min<Index>(n * 2, n_hi);
  }

  if (first_pass == 0) {
    result.exhausted = true;
    return result;
  }
  if (first_pass == n_lo) {
    result.n_star = n_lo;
    return result;
  }

  // Bisection between the bracketing probes.
  Index lo = last_fail;
  Index hi = first_pass;
  while (hi - lo > resolution) {
    const Index mid = lo + (hi - lo) / 2;
    if (probe(mid) >= target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  result.n_star = hi;
  return result;
}

}  // namespace rglab
