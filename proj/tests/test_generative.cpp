#include <doctest.h>

#include <cmath>
#include <set>
#include <stdexcept>

#include "rglab/asymptotics.hpp"
#include "rglab/correlation.hpp"
#include "rglab/generative.hpp"

using namespace rglab;

TEST_CASE("sample_support rejects degenerate sizes") {
  RngStream rng = RngStream::root(1);
  CHECK_THROWS_AS(sample_support(5, 5, rng), std::invalid_argument);
  CHECK_THROWS_AS(sample_support(5, 0, rng), std::invalid_argument);
  CHECK_THROWS_AS(sample_support(5, 6, rng), std::invalid_argument);
}

TEST_CASE("sample_support is uniform for k=2, u=1") {
  RngStream rng = RngStream::root(99);
  int hits = 0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    RngStream sub = rng.child("draw", static_cast<std::uint64_t>(i));
    if (sample_support(2, 1, sub)[0] == 0) ++hits;
  }
  CHECK(std::abs(hits / static_cast<double>(draws) - 0.5) < 0.02);
}

TEST_CASE("sample_support yields distinct in-range indices at scale") {
  RngStream rng = RngStream::root(3);
  const auto support = sample_support(20000, 100, rng);
  REQUIRE(support.size() == 100);
  std::set<Index> unique(support.begin(), support.end());
  CHECK(unique.size() == 100);
  CHECK(*unique.begin() >= 0);
  CHECK(*unique.rbegin() < 20000);
}

TEST_CASE("sparse dataset with u=1 copies the support column") {
  SparseLinearSpec spec{5, 1, std::vector<Index>{3}};
  RngStream rng = RngStream::root(8);
  auto [data, support] = sample_sparse_dataset(spec, 20, rng);
  REQUIRE(support == std::vector<Index>{3});
  CHECK((data.target.array() == data.features.col(3).array()).all());
}

TEST_CASE("sparse dataset has the requested shape") {
  SparseLinearSpec spec{20000, 100, std::nullopt};
  RngStream rng = RngStream::root(4);
  auto [data, support] = sample_sparse_dataset(spec, 59, rng);
  CHECK(data.n() == 59);
  CHECK(data.k() == 20000);
  CHECK(support.size() == 100);
}

TEST_CASE("sparse target is the exact sum of support columns") {
  SparseLinearSpec spec{40, 7, std::nullopt};
  RngStream rng = RngStream::root(12);
  auto [data, support] = sample_sparse_dataset(spec, 64, rng);
  Eigen::VectorXd expected = Eigen::VectorXd::Zero(64);
  for (Index idx : support) expected += data.features.col(idx);
  CHECK((data.target.array() == expected.array()).all());
}

TEST_CASE("sparse target variance approaches u") {
  const Index n = 100000, u = 100;
  SparseLinearSpec spec{110, u, std::nullopt};
  RngStream rng = RngStream::root(21);
  auto [data, support] = sample_sparse_dataset(spec, n, rng);
  const double mean = data.target.mean();
  const double var =
      (data.target.array() - mean).square().sum() / static_cast<double>(n);
  const double tol = 3.0 * std::sqrt(2.0 * u * u / static_cast<double>(n));
  CHECK(std::abs(var - static_cast<double>(u)) < tol);
}

TEST_CASE("sparse feature columns are empirically uncorrelated") {
  SparseLinearSpec spec{6, 2, std::nullopt};
  RngStream rng = RngStream::root(31);
  const Index n = 4000;
  auto [data, support] = sample_sparse_dataset(spec, n, rng);
  const double bound = 4.0 / std::sqrt(static_cast<double>(n));
  for (Index i = 0; i < 6; ++i) {
    for (Index j = i + 1; j < 6; ++j) {
      CHECK(std::abs(pearson(data.features.col(i), data.features.col(j))) <
            bound);
    }
  }
}

TEST_CASE("sparse sampling is bit-identical for equal seeds") {
  SparseLinearSpec spec{200, 10, std::nullopt};
  RngStream a = RngStream::root(77);
  RngStream b = RngStream::root(77);
  auto [da, sa] = sample_sparse_dataset(spec, 50, a);
  auto [db, sb] = sample_sparse_dataset(spec, 50, b);
  CHECK(sa == sb);
  CHECK((da.features.array() == db.features.array()).all());
  CHECK((da.target.array() == db.target.array()).all());
}

TEST_CASE("true_correlations_sparse fills 1/sqrt(u) on the support") {
  SparseLinearSpec spec{10, 4, std::vector<Index>{0, 2, 5, 9}};
  const CorrelationVector truth = true_correlations_sparse(spec);
  CHECK(truth.n == 0);
  for (Index j = 0; j < 10; ++j) {
    const bool active = j == 0 || j == 2 || j == 5 || j == 9;
    CHECK(truth.values[j] == (active ? 0.5 : 0.0));
  }

  SparseLinearSpec single{10, 1, std::vector<Index>{7}};
  CHECK(true_correlations_sparse(single).values[7] == 1.0);

  SparseLinearSpec missing{10, 4, std::nullopt};
  CHECK_THROWS_AS(true_correlations_sparse(missing), std::invalid_argument);
}

TEST_CASE("gaussian sampler reproduces an identity covariance") {
  GaussianSpec spec;
  spec.covariance = Eigen::MatrixXd::Identity(4, 4);
  RngStream rng = RngStream::root(17);
  const Dataset data = sample_gaussian_dataset(spec, 100000, rng);
  for (Index i = 0; i < 3; ++i) {
    CHECK(std::abs(pearson(data.features.col(i), data.target)) < 0.01);
    for (Index j = i + 1; j < 3; ++j) {
      CHECK(std::abs(pearson(data.features.col(i), data.features.col(j))) <
            0.01);
    }
  }
}

TEST_CASE("gaussian sampler recovers a target correlation of 0.5") {
  GaussianSpec spec;
  spec.covariance.resize(2, 2);
  spec.covariance << 1.0, 0.5, 0.5, 1.0;
  RngStream rng = RngStream::root(23);
  const Dataset data = sample_gaussian_dataset(spec, 100000, rng);
  CHECK(pearson(data.features.col(0), data.target) ==
        doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("gaussian sampler rejects the non-PSD construction") {
  const double c = 0.5;
  const double rho2 = std::sqrt((2.0 - c * c) / 2.0);
  GaussianSpec spec;
  spec.covariance.resize(3, 3);
  spec.covariance << 1.0, c, 0.0,  //
      c, 1.0, rho2,                //
      0.0, rho2, 1.0;
  RngStream rng = RngStream::root(2);
  CHECK_THROWS_AS(sample_gaussian_dataset(spec, 100, rng),
                  std::invalid_argument);
}

TEST_CASE("gaussian PSD gate agrees with the characteristic polynomial") {
  RngStream rng = RngStream::root(41);
  const double grid[] = {-0.9, -0.6, -0.3, 0.0, 0.3, 0.6, 0.9};
  for (double rho1 : grid) {
    for (double rho2 : grid) {
      for (double c : grid) {
        GaussianSpec spec;
        spec.covariance.resize(3, 3);
        spec.covariance << 1.0, c, rho1,  //
            c, 1.0, rho2,                 //
            rho1, rho2, 1.0;
        const bool valid = is_valid_correlation_structure(rho1, rho2, c);
        if (valid) {
          CHECK_NOTHROW(sample_gaussian_dataset(spec, 8, rng));
        } else {
          CHECK_THROWS_AS(sample_gaussian_dataset(spec, 8, rng),
                          std::invalid_argument);
        }
      }
    }
  }
}

TEST_CASE("gaussian spec validation flags asymmetry") {
  GaussianSpec spec;
  spec.covariance.resize(2, 2);
  spec.covariance << 1.0, 0.2, 0.2 + 1e-9, 1.0;
  CHECK_THROWS_AS(validate_gaussian_spec(spec), std::invalid_argument);
}

TEST_CASE("prior sampler concentrates at sigma_q") {
  PriorSpec spec{0.1, 1000000};
  RngStream rng = RngStream::root(6);
  const FisherVector z = sample_prior_fisher(spec, rng);
  const double mean = z.values.mean();
  const double sd = std::sqrt((z.values.array() - mean).square().sum() /
                              static_cast<double>(spec.k));
  CHECK(std::abs(sd - 0.1) < 0.001);
  // Back on the correlation scale everything stays inside (-1, 1).
  for (Index i = 0; i < 1000; ++i) {
    const double r = fisher_inverse(z.values[i]);
    CHECK(std::abs(r) < 1.0);
  }
}

TEST_CASE("prior sampler shrinks to theta as sigma_q approaches zero") {
  PriorSpec spec{1e-12, 1000};
  RngStream rng = RngStream::root(6);
  const FisherVector z = sample_prior_fisher(spec, rng);
  CHECK(z.values.cwiseAbs().maxCoeff() < 1e-10);
  CHECK_THROWS_AS(validate_prior_spec(PriorSpec{0.0, 10}),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate_prior_spec(PriorSpec{-0.1, 10}),
                  std::invalid_argument);
}

TEST_CASE("noise channel has variance 1/(n-3)") {
  FisherVector zero;
  zero.values = Eigen::VectorXd::Zero(100000);
  RngStream rng = RngStream::root(9);
  const FisherVector noisy = synthetic_correlation_noise(zero, 103, rng);
  const double var = noisy.values.squaredNorm() / 100000.0;
  CHECK(std::abs(var - 0.01) < 0.0005);
  CHECK_THROWS_AS(synthetic_correlation_noise(zero, 3, rng),
                  std::invalid_argument);
}

TEST_CASE("noise channel sd matches the closed form at n = 603") {
  FisherVector zero;
  zero.values = Eigen::VectorXd::Zero(200000);
  RngStream rng = RngStream::root(27);
  const FisherVector noisy = synthetic_correlation_noise(zero, 603, rng);
  const double sd = std::sqrt(noisy.values.squaredNorm() / 200000.0);
  CHECK(std::abs(sd - 0.040824829046386302) < 0.0005);  // 1/sqrt(600)
}

TEST_CASE("noise channel vanishes as n grows") {
  FisherVector base;
  base.values = Eigen::VectorXd::LinSpaced(100, -0.5, 0.5);
  RngStream rng = RngStream::root(10);
  const FisherVector noisy =
      synthetic_correlation_noise(base, Index{1000000000003}, rng);
  CHECK((noisy.values - base.values).cwiseAbs().maxCoeff() < 1e-4);
}
