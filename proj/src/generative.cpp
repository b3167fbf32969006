#include "rglab/generative.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace rglab {

namespace {

constexpr double kPsdTolerance = -1e-10;
constexpr double kSymmetryTolerance = 1e-12;

}  // namespace

void validate_sparse_spec(const SparseLinearSpec& spec) {
  if (spec.u <= 0 || spec.u >= spec.k) {
    std::ostringstream msg;
    msg << "sparse model needs 0 < u < k, got u = " << spec.u
        << ", k = " << spec.k;
    throw std::invalid_argument(msg.str());
  }
  if (spec.support) {
    const auto& s = *spec.support;
    if (static_cast<Index>(s.size()) != spec.u) {
      std::ostringstream msg;
      msg << "support has " << s.size() << " indices, expected u = " << spec.u;
      throw std::invalid_argument(msg.str());
    }
    std::vector<Index> sorted = s;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw std::invalid_argument("support indices must be distinct");
    }
    if (sorted.front() < 0 || sorted.back() >= spec.k) {
      throw std::invalid_argument("support index out of range [0, k)");
    }
  }
}

void validate_gaussian_spec(const GaussianSpec& spec) {
  const auto& sigma = spec.covariance;
  if (sigma.rows() != sigma.cols() || sigma.rows() < 2) {
    std::ostringstream msg;
    msg << "covariance must be square with dimension >= 2, got " << sigma.rows()
        << "x" << sigma.cols();
    throw std::invalid_argument(msg.str());
  }
  const double asym = (sigma - sigma.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTolerance) {
    std::ostringstream msg;
    msg << "covariance asymmetric: max |S - S^T| = " << asym;
    throw std::invalid_argument(msg.str());
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sigma,
                                                     Eigen::EigenvaluesOnly);
  const double min_eig = eig.eigenvalues().minCoeff();
  if (min_eig < kPsdTolerance) {
    std::ostringstream msg;
    msg << "covariance is not positive semi-definite (min eigenvalue = "
        << min_eig << "); a valid correlation structure requires PSD";
    throw std::invalid_argument(msg.str());
  }
}

void validate_prior_spec(const PriorSpec& spec) {
  if (!(spec.sigma_q > 0.0)) {
    std::ostringstream msg;
    msg << "prior needs sigma_q > 0, got " << spec.sigma_q;
    throw std::invalid_argument(msg.str());
  }
  if (spec.k <= 0) {
    std::ostringstream msg;
    msg << "prior needs k > 0, got " << spec.k;
    throw std::invalid_argument(msg.str());
  }
}

std::vector<Index> sample_support(Index k, Index u, RngStream& rng) {
  if (u <= 0 || u >= k) {
    std::ostringstream msg;
    msg << "sample_support needs 0 < u < k, got u = " << u << ", k = " << k;
    throw std::invalid_argument(msg.str());
  }
  // Partial Fisher-Yates over {0,...,k-1}: the first u slots are a uniform
  // u-subset.
  std::vector<Index> pool(static_cast<std::size_t>(k));
  std::iota(pool.begin(), pool.end(), Index{0});
  for (Index i = 0; i < u; ++i) {
    const auto span = static_cast<std::uint64_t>(k - i);
    const auto j = i + static_cast<Index>(rng.next_u64() % span);
    std::swap(pool[static_cast<std::size_t>(i)],
              pool[static_cast<std::size_t>(j)]);
  }
  std::vector<Index> support(pool.begin(), pool.begin() + u);
  std::sort(support.begin(), support.end());
  return support;
}

std::pair<Dataset, std::vector<Index>> sample_sparse_dataset(
    const SparseLinearSpec& spec, Index n, RngStream& rng) {
  validate_sparse_spec(spec);
  if (n < 4) {
    std::ostringstream msg;
    msg << "sparse dataset needs n >= 4, got n = " << n;
    throw std::invalid_argument(msg.str());
  }

  std::vector<Index> support;
  if (spec.support) {
    support = *spec.support;
    std::sort(support.begin(), support.end());
  } else {
    RngStream sub = rng.child("support");
    support = sample_support(spec.k, spec.u, sub);
  }

  Dataset data;
  data.features.resize(n, spec.k);
  RngStream feat = rng.child("features");
  for (Index col = 0; col < spec.k; ++col) {
    for (Index row = 0; row < n; ++row) {
      data.features(row, col) = feat.normal();
    }
  }

  data.target = Eigen::VectorXd::Zero(n);
  for (Index idx : support) {
    data.target += data.features.col(idx);
  }
  return {std::move(data), std::move(support)};
}

CorrelationVector true_correlations_sparse(const SparseLinearSpec& spec) {
  validate_sparse_spec(spec);
  if (!spec.support) {
    throw std::invalid_argument(
        "true_correlations_sparse needs a realized support");
  }
  CorrelationVector out;
  out.values = Eigen::VectorXd::Zero(spec.k);
  out.n = 0;
  const double active = 1.0 / std::sqrt(static_cast<double>(spec.u));
  for (Index idx : *spec.support) {
    out.values[idx] = active;
  }
  return out;
}

Dataset sample_gaussian_dataset(const GaussianSpec& spec, Index n,
                                RngStream& rng) {
  validate_gaussian_spec(spec);
  if (n < 4) {
    std::ostringstream msg;
    msg << "gaussian dataset needs n >= 4, got n = " << n;
    throw std::invalid_argument(msg.str());
  }

  const Index d = spec.dimension();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(spec.covariance);
  Eigen::VectorXd lambda = eig.eigenvalues().cwiseMax(0.0);
  const Eigen::MatrixXd transform =
      eig.eigenvectors() * lambda.cwiseSqrt().asDiagonal();

  Eigen::MatrixXd standard(n, d);
  for (Index row = 0; row < n; ++row) {
    for (Index col = 0; col < d; ++col) {
      standard(row, col) = rng.normal();
    }
  }
  const Eigen::MatrixXd sample = standard * transform.transpose();

  Dataset data;
  data.features = sample.leftCols(d - 1);
  data.target = sample.col(d - 1);
  return data;
}

FisherVector sample_prior_fisher(const PriorSpec& spec, RngStream& rng) {
  validate_prior_spec(spec);
  FisherVector out;
  out.values.resize(spec.k);
  for (Index i = 0; i < spec.k; ++i) {
    out.values[i] = spec.theta + spec.sigma_q * rng.normal();
  }
  return out;
}

FisherVector synthetic_correlation_noise(const FisherVector& fisher_true,
                                         Index n, RngStream& rng) {
  if (n < 4) {
    std::ostringstream msg;
    msg << "noise channel needs n >= 4, got n = " << n;
    throw std::invalid_argument(msg.str());
  }
  const double sd = 1.0 / std::sqrt(static_cast<double>(n - 3));
  FisherVector out;
  out.values.resize(fisher_true.values.size());
  for (Index i = 0; i < fisher_true.values.size(); ++i) {
    out.values[i] = fisher_true.values[i] + sd * rng.normal();
  }
  return out;
}

}  // namespace rglab
