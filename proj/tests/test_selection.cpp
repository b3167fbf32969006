#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rglab/selection.hpp"

using namespace rglab;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

CorrelationVector corr(std::initializer_list<double> xs, Index n) {
  CorrelationVector r;
  r.values = vec(xs);
  r.n = n;
  return r;
}

}  // namespace

TEST_CASE("top_u_indices picks the largest values") {
  CHECK(top_u_indices(vec({3, 1, 2}), 2) == std::vector<Index>{0, 2});
  CHECK(top_u_indices(vec({3, 1, 2}), 3) == std::vector<Index>{0, 1, 2});
  CHECK(top_u_indices(vec({1, 1, 1, 1}), 2) == std::vector<Index>{0, 1});
  CHECK_THROWS_AS(top_u_indices(vec({1, 2}), 3), std::invalid_argument);
  CHECK_THROWS_AS(top_u_indices(vec({1, 2}), 0), std::invalid_argument);
}

TEST_CASE("select_top_u scores overlap against the truth set") {
  const CorrelationVector r = corr({0.9, -0.8, 0.1, 0.05, -0.95}, 100);
  const SelectionOutcome outcome = select_top_u(r, {0, 1, 4}, 3);
  CHECK(outcome.chosen == std::vector<Index>{0, 1, 4});
  CHECK(outcome.overlap == 1.0);

  const SelectionOutcome partial = select_top_u(r, {2, 3, 4}, 3);
  CHECK(partial.overlap == doctest::Approx(1.0 / 3.0));

  // Symmetry of the overlap in the two index sets.
  const SelectionOutcome swapped = select_top_u(r, {0, 1, 4}, 3);
  CHECK(partial.overlap ==
        select_top_u(corr({0.1, 0.05, 0.9, -0.8, -0.95}, 100), {0, 1, 4}, 3)
            .overlap);
  CHECK(swapped.overlap == 1.0);

  // Degenerate u = k: every feature is selected, overlap is full.
  CHECK(select_top_u(r, {0, 1, 2, 3, 4}, 5).overlap == 1.0);
}

TEST_CASE("selection is invariant under sign flips and feature relabeling") {
  RngStream rng = RngStream::root(14);
  Eigen::VectorXd values(12);
  for (Index i = 0; i < 12; ++i) values[i] = rng.normal();

  CorrelationVector r;
  r.values = values;
  r.n = 50;
  const SelectionOutcome base = select_top_u(r, {1, 3, 5}, 3);

  CorrelationVector flipped;
  flipped.values = -values;
  flipped.n = 50;
  CHECK(select_top_u(flipped, {1, 3, 5}, 3).overlap == base.overlap);

  // Relabel features by a rotation of the indices.
  CorrelationVector rotated;
  rotated.values.resize(12);
  for (Index i = 0; i < 12; ++i) rotated.values[(i + 4) % 12] = values[i];
  rotated.n = 50;
  const SelectionOutcome relabeled =
      select_top_u(rotated, {(1 + 4) % 12, (3 + 4) % 12, (5 + 4) % 12}, 3);
  CHECK(relabeled.overlap == base.overlap);
}

TEST_CASE("selection through correlate_all ignores per-column sign and scale") {
  RngStream rng = RngStream::root(808);
  Dataset data;
  const Index n = 40, k = 15, u = 4;
  data.features.resize(n, k);
  data.target.resize(n);
  for (Index i = 0; i < n; ++i) {
    data.target[i] = rng.normal();
    for (Index j = 0; j < k; ++j) data.features(i, j) = rng.normal();
  }
  const std::vector<Index> truth{0, 3, 7, 11};
  const double base =
      select_top_u(correlate_all(data), truth, u).overlap;

  Dataset scaled = data;
  for (Index j = 0; j < k; ++j) {
    const double a = (rng.uniform01() < 0.5 ? -1.0 : 1.0) *
                     (0.1 + 3.0 * rng.uniform01());
    scaled.features.col(j) *= a;
  }
  CHECK(select_top_u(correlate_all(scaled), truth, u).overlap == base);
}

TEST_CASE("estimate_sigma_q boundary and clamping behaviour") {
  // k = 2, values (a, -a): W = a^2 exactly. n = 7 gives 1/(n-3) = 0.25.
  CHECK(estimate_sigma_q(corr({0.5, -0.5}, 7), SigmaQScale::raw).value == 0.0);
  CHECK_FALSE(
      estimate_sigma_q(corr({0.5, -0.5}, 7), SigmaQScale::raw).clamped);

  const SigmaQEstimate clamped =
      estimate_sigma_q(corr({0.4, -0.4}, 7), SigmaQScale::raw);
  CHECK(clamped.value == 0.0);
  CHECK(clamped.clamped);

  const SigmaQEstimate above =
      estimate_sigma_q(corr({0.6, -0.6}, 7), SigmaQScale::raw);
  CHECK(above.value == doctest::Approx(std::sqrt(0.36 - 0.25)).epsilon(1e-12));
  CHECK_FALSE(above.clamped);

  CHECK_THROWS_AS(estimate_sigma_q(corr({0.5}, 7), SigmaQScale::raw),
                  std::invalid_argument);
  CHECK_THROWS_AS(estimate_sigma_q(corr({0.5, -0.5}, 3), SigmaQScale::raw),
                  std::invalid_argument);
}

TEST_CASE("estimate_sigma_q recovers the prior scale on synthetic data") {
  const Index k = 100000;
  const Index n = 103;
  PriorSpec prior{0.1, k};
  RngStream rng = RngStream::root(2718);
  const FisherVector truth = sample_prior_fisher(prior, rng);
  RngStream noise = rng.child("noise");
  const FisherVector observed = synthetic_correlation_noise(truth, n, noise);

  CorrelationVector r;
  r.values = observed.values.array().tanh();
  r.n = n;
  const SigmaQEstimate est = estimate_sigma_q(r, SigmaQScale::fisher);
  CHECK(std::abs(est.value - 0.1) < 0.005);
  CHECK_FALSE(est.clamped);
  CHECK(std::isfinite(est.value));
}

TEST_CASE("estimate_sigma_q never returns NaN on pure noise") {
  RngStream rng = RngStream::root(5150);
  for (int rep = 0; rep < 20; ++rep) {
    const Index n = 50;
    FisherVector zero;
    zero.values = Eigen::VectorXd::Zero(40);
    RngStream sub = rng.child("rep", static_cast<std::uint64_t>(rep));
    const FisherVector noisy = synthetic_correlation_noise(zero, n, sub);
    CorrelationVector r;
    r.values = noisy.values.array().tanh();
    r.n = n;
    for (SigmaQScale scale : {SigmaQScale::raw, SigmaQScale::fisher}) {
      const SigmaQEstimate est = estimate_sigma_q(r, scale);
      CHECK(std::isfinite(est.value));
      CHECK(est.value >= 0.0);
    }
  }
}

TEST_CASE("straightforward selection is perfect at very large n") {
  SparseLinearSpec spec{200, 10, std::nullopt};
  RngStream rng = RngStream::root(33);
  const StraightforwardResult res = straightforward_replicate(spec, 100000, rng);
  CHECK(res.d_t == 1.0);
  CHECK(res.r.n == 100000);
  CHECK(res.support.size() == 10);
}

TEST_CASE("straightforward replicate is deterministic in the stream") {
  SparseLinearSpec spec{300, 10, std::nullopt};
  RngStream a = RngStream::root(17);
  RngStream b = RngStream::root(17);
  const StraightforwardResult ra = straightforward_replicate(spec, 60, a);
  const StraightforwardResult rb = straightforward_replicate(spec, 60, b);
  CHECK(ra.d_t == rb.d_t);
  CHECK((ra.r.values.array() == rb.r.values.array()).all());
  CHECK(ra.support == rb.support);
}

TEST_CASE("approximated estimator returns 1 when u = k") {
  const CorrelationVector r = corr({0.3, -0.2, 0.1, 0.05}, 40);
  RngStream rng = RngStream::root(3);
  for (ApproxMode mode : {ApproxMode::paper_literal, ApproxMode::synthetic}) {
    RngStream sub = rng.child(to_string(mode));
    const ApproximatedResult res =
        approximated_replicate(r, 4, mode, SigmaQScale::raw, sub);
    CHECK(res.c_t == 1.0);
  }
}

TEST_CASE("paper-literal estimator hovers at the hypergeometric mean") {
  // S1 is an independent uniform u-subset, so E[c_t] = u/k.
  SparseLinearSpec spec{5000, 50, std::nullopt};
  RngStream rng = RngStream::root(1234);
  double total = 0.0;
  const int B = 10;
  for (int t = 0; t < B; ++t) {
    RngStream rep = rng.child("rep", static_cast<std::uint64_t>(t));
    const StraightforwardResult straight =
        straightforward_replicate(spec, 100, rep);
    RngStream approx = rep.child("approx");
    total += approximated_replicate(straight.r, spec.u,
                                    ApproxMode::paper_literal,
                                    SigmaQScale::raw, approx)
                 .c_t;
  }
  CHECK(total / B < 0.05);
}

TEST_CASE("synthetic mode agrees with a known-sigma_q oracle") {
  // Genuinely prior-consistent data: phi(rho) ~ N(0, sigma_q^2),
  // phi(r) = phi(rho) + noise. The oracle runs the same scheme with the true
  // sigma_q instead of the estimate.
  const Index k = 10000, u = 100, n = 103;
  const double sigma_q = 0.1;
  RngStream rng = RngStream::root(424242);

  double mean_est = 0.0, mean_oracle = 0.0;
  const int B = 40;
  for (int t = 0; t < B; ++t) {
    RngStream rep = rng.child("rep", static_cast<std::uint64_t>(t));
    RngStream prior_stream = rep.child("truth");
    const FisherVector truth =
        sample_prior_fisher({sigma_q, k}, prior_stream);
    RngStream chan = rep.child("channel");
    const FisherVector observed = synthetic_correlation_noise(truth, n, chan);
    CorrelationVector r;
    r.values = observed.values.array().tanh();
    r.n = n;

    RngStream est_stream = rep.child("estimate");
    mean_est += approximated_replicate(r, u, ApproxMode::synthetic,
                                       SigmaQScale::fisher, est_stream)
                    .c_t;

    // Oracle: same draws scheme, true sigma_q.
    RngStream oracle_stream = rep.child("oracle");
    RngStream oracle_prior = oracle_stream.child("prior");
    const FisherVector phi_rho =
        sample_prior_fisher({sigma_q, k}, oracle_prior);
    const std::vector<Index> s1 = top_u_indices(phi_rho.values.cwiseAbs(), u);
    RngStream oracle_noise = oracle_stream.child("noise");
    const FisherVector v =
        synthetic_correlation_noise(phi_rho, n, oracle_noise);
    const std::vector<Index> s2 = top_u_indices(v.values.cwiseAbs(), u);
    std::vector<Index> common;
    std::set_intersection(s1.begin(), s1.end(), s2.begin(), s2.end(),
                          std::back_inserter(common));
    mean_oracle += static_cast<double>(common.size()) / u;
  }
  mean_est /= B;
  mean_oracle /= B;
  CHECK(std::abs(mean_est - mean_oracle) < 0.05);
}

TEST_CASE("run_experiment with B = 1 reports zero SDs") {
  SparseLinearSpec spec{100, 5, std::nullopt};
  RngStream rng = RngStream::root(7);
  const auto summaries = run_experiment(spec, {30, 60}, 1,
                                        ApproxMode::paper_literal,
                                        SigmaQScale::raw, rng);
  REQUIRE(summaries.size() == 2);
  for (const auto& s : summaries) {
    CHECK(s.d_sd == 0.0);
    CHECK(s.c_sd == 0.0);
    CHECK(s.B == 1);
    CHECK(s.d_mean >= 0.0);
    CHECK(s.d_mean <= 1.0);
    CHECK(s.c_mean >= 0.0);
    CHECK(s.c_mean <= 1.0);
  }
}

TEST_CASE("run_experiment aggregates identically for any worker count") {
  SparseLinearSpec spec{500, 10, std::nullopt};
  RngStream rng = RngStream::root(99);
  const auto seq = run_experiment(spec, {40, 80}, 4,
                                  ApproxMode::paper_literal, SigmaQScale::raw,
                                  rng, 1);
  const auto par = run_experiment(spec, {40, 80}, 4,
                                  ApproxMode::paper_literal, SigmaQScale::raw,
                                  rng, 4);
  REQUIRE(seq.size() == par.size());
  for (std::size_t i = 0; i < seq.size(); ++i) {
    CHECK(seq[i].d_mean == par[i].d_mean);
    CHECK(seq[i].d_sd == par[i].d_sd);
    CHECK(seq[i].c_mean == par[i].c_mean);
    CHECK(seq[i].c_sd == par[i].c_sd);
    CHECK(seq[i].d_ts == par[i].d_ts);
    CHECK(seq[i].c_ts == par[i].c_ts);
    CHECK(seq[i].sigma_q_hats == par[i].sigma_q_hats);
  }
}

TEST_CASE("run_experiment validates inputs") {
  SparseLinearSpec spec{100, 5, std::nullopt};
  RngStream rng = RngStream::root(1);
  CHECK_THROWS_AS(run_experiment(spec, {30}, 0, ApproxMode::paper_literal,
                                 SigmaQScale::raw, rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(run_experiment(spec, {3}, 2, ApproxMode::paper_literal,
                                 SigmaQScale::raw, rng),
                  std::invalid_argument);
}

TEST_CASE("minimal_sample_size returns n_lo for a trivial target") {
  SparseLinearSpec spec{200, 10, std::nullopt};
  RngStream rng = RngStream::root(5);
  const SampleSizeResult res = minimal_sample_size(
      spec, RobustnessCriterion{1e-9}, EstimatorKind::straightforward, 20, 320,
      2, ApproxMode::paper_literal, SigmaQScale::raw, rng);
  REQUIRE(res.n_star.has_value());
  CHECK(*res.n_star == 20);
  CHECK_FALSE(res.exhausted);
}

TEST_CASE("minimal_sample_size exhausts for the paper-literal estimator") {
  SparseLinearSpec spec{2000, 20, std::nullopt};
  RngStream rng = RngStream::root(6);
  const SampleSizeResult res = minimal_sample_size(
      spec, RobustnessCriterion{0.5}, EstimatorKind::approximated, 50, 200, 3,
      ApproxMode::paper_literal, SigmaQScale::raw, rng);
  CHECK(res.exhausted);
  CHECK_FALSE(res.n_star.has_value());
  CHECK(res.best_mean < 0.1);
  CHECK(!res.trace.empty());
}

TEST_CASE("minimal_sample_size brackets the straightforward crossing") {
  // k = 500, u = 10: active correlation 1/sqrt(10); the analytic threshold
  // model puts the 50% crossing near n = 65.
  SparseLinearSpec spec{500, 10, std::nullopt};
  RngStream rng = RngStream::root(7);
  const SampleSizeResult res = minimal_sample_size(
      spec, RobustnessCriterion{0.5}, EstimatorKind::straightforward, 10, 640,
      8, ApproxMode::paper_literal, SigmaQScale::raw, rng, 1, 10);
  REQUIRE(res.n_star.has_value());
  CHECK(*res.n_star >= 30);
  CHECK(*res.n_star <= 120);
  CHECK(res.resolution == 10);
}

// Full experiment scale; excluded from the default unit invocation and run
// as its own ctest entry.
TEST_SUITE("slow") {

TEST_CASE("minimal_sample_size brackets the full-scale crossing") {
  SparseLinearSpec spec{20000, 100, std::nullopt};
  RngStream rng = RngStream::root(77);
  const SampleSizeResult res = minimal_sample_size(
      spec, RobustnessCriterion{0.5}, EstimatorKind::straightforward, 600,
      1200, 10, ApproxMode::paper_literal, SigmaQScale::raw, rng, 1, 100);
  REQUIRE(res.n_star.has_value());
  CHECK(*res.n_star >= 800);
  CHECK(*res.n_star <= 1200);
  for (const auto& p : res.trace) {
    CHECK(p.mean >= 0.0);
    CHECK(p.mean <= 1.0);
  }
}

}  // TEST_SUITE("slow")

TEST_CASE("minimal_sample_size validates bounds") {
  SparseLinearSpec spec{100, 5, std::nullopt};
  RngStream rng = RngStream::root(8);
  CHECK_THROWS_AS(
      minimal_sample_size(spec, RobustnessCriterion{0.5},
                          EstimatorKind::straightforward, 100, 50, 2,
                          ApproxMode::paper_literal, SigmaQScale::raw, rng),
      std::invalid_argument);
  CHECK_THROWS_AS(
      minimal_sample_size(spec, RobustnessCriterion{1.5},
                          EstimatorKind::straightforward, 10, 50, 2,
                          ApproxMode::paper_literal, SigmaQScale::raw, rng),
      std::invalid_argument);
}
