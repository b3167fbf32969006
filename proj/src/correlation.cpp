#include "rglab/correlation.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace rglab {

namespace {

constexpr double kClampMargin = 1e-12;

double mean_of(const Eigen::Ref<const Eigen::VectorXd>& v) {
  return v.mean();
}

}  // namespace

void validate_dataset(const Dataset& data) {
  if (data.n() < 4) {
    std::ostringstream msg;
    msg << "dataset needs n >= 4 observations, got n = " << data.n();
    throw std::invalid_argument(msg.str());
  }
  if (data.target.size() != data.n()) {
    std::ostringstream msg;
    msg << "target length " << data.target.size()
        << " does not match feature rows " << data.n();
    throw std::invalid_argument(msg.str());
  }
  if (!data.features.allFinite() || !data.target.allFinite()) {
    throw std::invalid_argument("dataset contains non-finite entries");
  }
}

double fisher(double h) {
  if (!(std::abs(h) < 1.0)) {
    std::ostringstream msg;
    msg << "fisher transform requires |h| < 1, got h = " << h;
    throw std::domain_error(msg.str());
  }
  // atanh(h) == 0.5 * ln((1+h)/(1-h)), and is exactly odd.
  return std::atanh(h);
}

double fisher_inverse(double z) {
  if (!std::isfinite(z)) {
    std::ostringstream msg;
    msg << "fisher_inverse requires finite input, got z = " << z;
    throw std::domain_error(msg.str());
  }
  return std::tanh(z);
}

double pearson(const Eigen::Ref<const Eigen::VectorXd>& x,
               const Eigen::Ref<const Eigen::VectorXd>& y) {
  const Index n = x.size();
  if (y.size() != n) {
    std::ostringstream msg;
    msg << "pearson length mismatch: " << n << " vs " << y.size();
    throw std::invalid_argument(msg.str());
  }
  if (n < 4) {
    std::ostringstream msg;
    msg << "pearson needs n >= 4, got n = " << n;
    throw std::invalid_argument(msg.str());
  }

  const double inv_n = 1.0 / static_cast<double>(n);
  const double m_x = x.sum() * inv_n;
  const double m_y = y.sum() * inv_n;
  const double m_x2 = x.squaredNorm() * inv_n;
  const double m_y2 = y.squaredNorm() * inv_n;
  const double m_xy = x.dot(y) * inv_n;

  const double s2_x = m_x2 - m_x * m_x;
  const double s2_y = m_y2 - m_y * m_y;
  if (s2_x <= 0.0 || s2_y <= 0.0) {
    std::ostringstream msg;
    msg << "degenerate variance in pearson (s2_x = " << s2_x
        << ", s2_y = " << s2_y << ")";
    throw std::domain_error(msg.str());
  }

  const double r = (m_xy - m_x * m_y) / std::sqrt(s2_x * s2_y);
  // Floating point can overshoot the exact bound by a few ulps.
  if (r > 1.0) return 1.0;
  if (r < -1.0) return -1.0;
  return r;
}

CorrelationVector correlate_all(const Dataset& data) {
  validate_dataset(data);
  const Index k = data.k();

  CorrelationVector out;
  out.values.resize(k);
  out.n = data.n();

  for (Index i = 0; i < k; ++i) {
    double r;
    try {
      r = pearson(data.features.col(i), data.target);
    } catch (const std::exception& e) {
      std::ostringstream msg;
      msg << "column " << i << ": " << e.what();
      throw std::domain_error(msg.str());
    }
    if (r >= 1.0 || r <= -1.0) {
      out.clamped.push_back({i, r});
      r = std::copysign(1.0 - kClampMargin, r);
    }
    out.values[i] = r;
  }
  return out;
}

FisherVector fisher_all(const CorrelationVector& r) {
  FisherVector out;
  out.values.resize(r.values.size());
  for (Index i = 0; i < r.values.size(); ++i) {
    out.values[i] = fisher(r.values[i]);
  }
  return out;
}

PairwiseMoments pairwise_moments(const Dataset& data, Index i, Index j) {
  validate_dataset(data);
  if (i < 0 || i >= data.k() || j < 0 || j >= data.k()) {
    std::ostringstream msg;
    msg << "pairwise_moments indices (" << i << ", " << j
        << ") out of range for k = " << data.k();
    throw std::invalid_argument(msg.str());
  }

  const Index n = data.n();
  const double inv_n = 1.0 / static_cast<double>(n);

  // Centering enforces the mean-zero convention the condition is stated in.
  Eigen::VectorXd xi = data.features.col(i);
  Eigen::VectorXd xj = data.features.col(j);
  Eigen::VectorXd y = data.target;
  xi.array() -= mean_of(xi);
  xj.array() -= mean_of(xj);
  y.array() -= mean_of(y);

  PairwiseMoments m;
  m.var_xi = xi.squaredNorm() * inv_n;
  m.var_xj = xj.squaredNorm() * inv_n;
  m.var_y = y.squaredNorm() * inv_n;
  if (m.var_xi <= 0.0 || m.var_xj <= 0.0 || m.var_y <= 0.0) {
    std::ostringstream msg;
    msg << "degenerate variance in pairwise_moments for pair (" << i << ", "
        << j << ")";
    throw std::domain_error(msg.str());
  }

  const double cov_iy = xi.dot(y) * inv_n;
  const double cov_jy = xj.dot(y) * inv_n;
  const double cov_ij = xi.dot(xj) * inv_n;
  m.rho_i = cov_iy / std::sqrt(m.var_xi * m.var_y);
  m.rho_j = cov_jy / std::sqrt(m.var_xj * m.var_y);
  m.rho_xixj = cov_ij / std::sqrt(m.var_xi * m.var_xj);

  const Eigen::ArrayXd xi2 = xi.array().square();
  const Eigen::ArrayXd xj2 = xj.array().square();
  const Eigen::ArrayXd y2 = y.array().square();
  const Eigen::ArrayXd xiy = xi.array() * y.array();
  const Eigen::ArrayXd xjy = xj.array() * y.array();

  const double m_xi2 = m.var_xi;
  const double m_xj2 = m.var_xj;
  const double m_y2 = m.var_y;
  const double m_xiy = cov_iy;
  const double m_xjy = cov_jy;

  auto cov4 = [inv_n](const Eigen::ArrayXd& a, double mean_a,
                      const Eigen::ArrayXd& b, double mean_b) {
    return (a * b).sum() * inv_n - mean_a * mean_b;
  };

  m.c_xi2_xj2 = cov4(xi2, m_xi2, xj2, m_xj2);
  m.c_y2_xj2 = cov4(y2, m_y2, xj2, m_xj2);
  m.c_xiy_xj2 = cov4(xiy, m_xiy, xj2, m_xj2);
  m.c_xi2_y2 = cov4(xi2, m_xi2, y2, m_y2);
  m.c_y2_y2 = cov4(y2, m_y2, y2, m_y2);
  m.c_xiy_y2 = cov4(xiy, m_xiy, y2, m_y2);
  m.c_xi2_xjy = cov4(xi2, m_xi2, xjy, m_xjy);
  m.c_y2_xjy = cov4(y2, m_y2, xjy, m_xjy);
  m.c_xiy_xjy = cov4(xiy, m_xiy, xjy, m_xjy);
  return m;
}

}  // namespace rglab
