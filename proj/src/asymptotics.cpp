#include "rglab/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <utility>

#include <Eigen/Eigenvalues>

namespace rglab {

namespace {

constexpr double kPsdTolerance = -1e-10;
constexpr double kRealAxisTolerance = 1e-10;

void require_open_unit(double value, const char* name) {
  if (!(std::abs(value) < 1.0)) {
    std::ostringstream msg;
    msg << name << " must lie in (-1, 1), got " << value;
    throw std::domain_error(msg.str());
  }
}

std::complex<double> cubic_eval(double c3, double c2, double c1, double c0,
                                std::complex<double> x) {
  return ((c3 * x + c2) * x + c1) * x + c0;
}

std::complex<double> cubic_deriv(double c3, double c2, double c1,
                                 std::complex<double> x) {
  return (3.0 * c3 * x + 2.0 * c2) * x + c1;
}

}  // namespace

CubicRoots solve_cubic(double c3, double c2, double c1, double c0) {
  if (c3 == 0.0) {
    throw std::invalid_argument("solve_cubic: leading coefficient is zero");
  }
  const double a = c2 / c3;
  const double b = c1 / c3;
  const double c = c0 / c3;

  // Depressed form t^3 + p t + q with x = t - a/3.
  const double shift = a / 3.0;
  const double p = b - a * a / 3.0;
  const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;

  std::array<std::complex<double>, 3> t;
  const double disc = -4.0 * p * p * p - 27.0 * q * q;
  if (p == 0.0 && q == 0.0) {
    t = {0.0, 0.0, 0.0};
  } else if (disc >= 0.0 && p < 0.0) {
    // Three real roots: trigonometric form.
    const double m = 2.0 * std::sqrt(-p / 3.0);
    const double cos_arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
    const double theta = std::acos(cos_arg) / 3.0;
    for (int k = 0; k < 3; ++k) {
      t[static_cast<std::size_t>(k)] =
          m * std::cos(theta - 2.0 * std::numbers::pi * k / 3.0);
    }
  } else {
    // One real root: Cardano.
    const double radicand = q * q / 4.0 + p * p * p / 27.0;
    const double sq = std::sqrt(std::max(radicand, 0.0));
    const double u = std::cbrt(-q / 2.0 + sq);
    const double v = std::cbrt(-q / 2.0 - sq);
    const double real = u + v;
    const double imag = std::sqrt(3.0) / 2.0 * (u - v);
    t = {std::complex<double>(real, 0.0),
         std::complex<double>(-real / 2.0, imag),
         std::complex<double>(-real / 2.0, -imag)};
  }

  CubicRoots out;
  double scale = 1.0;
  for (std::size_t i = 0; i < 3; ++i) {
    std::complex<double> x = t[i] - shift;
    // One Newton step stabilizes near-multiple roots the closed form leaves
    // slightly off.
    const std::complex<double> d = cubic_deriv(c3, c2, c1, x);
    if (std::abs(d) > 1e-300) {
      x -= cubic_eval(c3, c2, c1, c0, x) / d;
    }
    out.roots[i] = x;
    scale = std::max(scale, std::abs(x));
  }
  for (const auto& x : out.roots) {
    if (std::abs(x.imag()) < kRealAxisTolerance * scale) {
      out.real_roots.push_back(x.real());
    }
  }
  std::sort(out.real_roots.begin(), out.real_roots.end());
  return out;
}

CubicRoots char_poly_roots(double rho1, double rho2, double c) {
  require_open_unit(rho1, "rho1");
  require_open_unit(rho2, "rho2");
  require_open_unit(c, "c");
  const double s = rho1 * rho1 + rho2 * rho2 + c * c;
  const double t = 2.0 * c * rho1 * rho2;
  // det(M - lambda I) = (1-l)^3 - (1-l)s + t, written monic in lambda.
  return solve_cubic(1.0, -3.0, 3.0 - s, -(1.0 - s + t));
}

bool is_valid_correlation_structure(double rho1, double rho2, double c) {
  const CubicRoots roots = char_poly_roots(rho1, rho2, c);
  // A symmetric matrix has only real eigenvalues.
  double min_root = roots.real_roots.empty()
                        ? std::numeric_limits<double>::infinity()
                        : roots.real_roots.front();
  return min_root >= kPsdTolerance;
}

PairwiseMoments isserlis_pair_moments(const Eigen::Matrix3d& sigma) {
  const double asym = (sigma - sigma.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12) {
    std::ostringstream msg;
    msg << "isserlis_pair_moments: asymmetric covariance (max dev " << asym
        << ")";
    throw std::invalid_argument(msg.str());
  }
  if (sigma(0, 0) <= 0.0 || sigma(1, 1) <= 0.0 || sigma(2, 2) <= 0.0) {
    throw std::invalid_argument(
        "isserlis_pair_moments: diagonal must be positive");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(sigma,
                                                     Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < kPsdTolerance) {
    std::ostringstream msg;
    msg << "isserlis_pair_moments: covariance not PSD (min eigenvalue "
        << eig.eigenvalues().minCoeff() << ")";
    throw std::invalid_argument(msg.str());
  }

  const double v_i = sigma(0, 0);
  const double v_j = sigma(1, 1);
  const double v_y = sigma(2, 2);
  const double s_ij = sigma(0, 1);
  const double s_iy = sigma(0, 2);
  const double s_jy = sigma(1, 2);

  PairwiseMoments m;
  m.var_xi = v_i;
  m.var_xj = v_j;
  m.var_y = v_y;
  m.rho_i = s_iy / std::sqrt(v_i * v_y);
  m.rho_j = s_jy / std::sqrt(v_j * v_y);
  m.rho_xixj = s_ij / std::sqrt(v_i * v_j);

  m.c_xi2_xj2 = 2.0 * s_ij * s_ij;
  m.c_y2_xj2 = 2.0 * s_jy * s_jy;
  m.c_xiy_xj2 = 2.0 * s_ij * s_jy;
  m.c_xi2_y2 = 2.0 * s_iy * s_iy;
  m.c_y2_y2 = 2.0 * v_y * v_y;
  m.c_xiy_y2 = 2.0 * v_y * s_iy;
  m.c_xi2_xjy = 2.0 * s_ij * s_iy;
  m.c_y2_xjy = 2.0 * v_y * s_jy;
  m.c_xiy_xjy = v_y * s_ij + s_iy * s_jy;
  return m;
}

double independence_lhs(const PairwiseMoments& m) {
  const double sd_xi = std::sqrt(m.var_xi);
  const double sd_xj = std::sqrt(m.var_xj);
  const double sd_y = std::sqrt(m.var_y);

  const double w_xi2 = -m.rho_i / (2.0 * m.var_xi);
  const double w_y2 = -m.rho_i / (2.0 * m.var_y);
  const double w_xiy = 1.0 / (sd_xi * sd_y);

  const double bracket_xj2 =
      w_xi2 * m.c_xi2_xj2 + w_y2 * m.c_y2_xj2 + w_xiy * m.c_xiy_xj2;
  const double bracket_y2 =
      w_xi2 * m.c_xi2_y2 + w_y2 * m.c_y2_y2 + w_xiy * m.c_xiy_y2;
  const double bracket_xjy =
      w_xi2 * m.c_xi2_xjy + w_y2 * m.c_y2_xjy + w_xiy * m.c_xiy_xjy;

  return -m.rho_j / (2.0 * m.var_xj) * bracket_xj2 -
         m.rho_j / (2.0 * m.var_y) * bracket_y2 +
         1.0 / (sd_xj * sd_y) * bracket_xjy;
}

std::vector<double> QuadraticCondition::real_roots() const {
  std::vector<double> roots;
  if (a == 0.0) {
    if (b != 0.0) {
      roots.push_back(-c / b);
    }
    return roots;
  }
  if (discriminant < 0.0) {
    return roots;
  }
  const double sq = std::sqrt(discriminant);
  roots.push_back((-b - sq) / (2.0 * a));
  roots.push_back((-b + sq) / (2.0 * a));
  std::sort(roots.begin(), roots.end());
  return roots;
}

QuadraticCondition gaussian_condition(double rho1, double rho2) {
  require_open_unit(rho1, "rho1");
  require_open_unit(rho2, "rho2");
  QuadraticCondition cond;
  cond.a = rho1 * rho2 / 2.0;
  cond.b = 1.0 - rho1 * rho1 - rho2 * rho2;
  cond.c =
      (rho1 * rho2 * rho2 * rho2 + rho1 * rho1 * rho1 * rho2 - rho1 * rho2) /
      2.0;
  cond.discriminant = cond.b * cond.b - 4.0 * cond.a * cond.c;
  return cond;
}

Eigen::MatrixXd asymptotic_fisher_covariance(const GaussianSpec& spec) {
  const Index k = spec.k();
  if (k < 1) {
    throw std::invalid_argument("asymptotic_fisher_covariance: need k >= 1");
  }
  if (k > kMaxAsymptoticFeatures) {
    std::ostringstream msg;
    msg << "asymptotic_fisher_covariance: k = " << k
        << " exceeds the dense-pipeline cap of " << kMaxAsymptoticFeatures;
    throw std::invalid_argument(msg.str());
  }
  validate_gaussian_spec(spec);

  const Eigen::MatrixXd& sigma = spec.covariance;
  const Index y = k;  // linear coordinate of Y
  for (Index i = 0; i < k; ++i) {
    const double det2 =
        sigma(i, i) * sigma(y, y) - sigma(i, y) * sigma(i, y);
    if (sigma(i, i) <= 0.0 || sigma(y, y) <= 0.0 || det2 <= 0.0) {
      std::ostringstream msg;
      msg << "asymptotic_fisher_covariance: (X_" << i
          << ", Y) restriction is not positive definite";
      throw std::invalid_argument(msg.str());
    }
  }

  // Coordinates of Z = (X_1..X_k, Y, X_1^2..X_k^2, Y^2, X_1 Y..X_k Y): each
  // entry of the tail is a product of two linear coordinates.
  const Index dim = 3 * k + 2;
  const Index n_quad = 2 * k + 1;
  std::vector<std::pair<Index, Index>> quad_pairs;
  quad_pairs.reserve(static_cast<std::size_t>(n_quad));
  for (Index i = 0; i < k; ++i) quad_pairs.emplace_back(i, i);  // X_i^2
  quad_pairs.emplace_back(y, y);                                // Y^2
  for (Index i = 0; i < k; ++i) quad_pairs.emplace_back(i, y);  // X_i Y

  Eigen::MatrixXd sigma1 = Eigen::MatrixXd::Zero(dim, dim);
  sigma1.topLeftCorner(k + 1, k + 1) = sigma;
  // Linear-quadratic blocks vanish (odd Gaussian moments); the
  // quadratic-quadratic block follows from the Isserlis identity.
  for (Index a = 0; a < n_quad; ++a) {
    for (Index b = a; b < n_quad; ++b) {
      const auto [a1, a2] = quad_pairs[static_cast<std::size_t>(a)];
      const auto [b1, b2] = quad_pairs[static_cast<std::size_t>(b)];
      const double cov =
          sigma(a1, b1) * sigma(a2, b2) + sigma(a1, b2) * sigma(a2, b1);
      sigma1(k + 1 + a, k + 1 + b) = cov;
      sigma1(k + 1 + b, k + 1 + a) = cov;
    }
  }

  // First delta step: at the zero-mean population point the Jacobian of the
  // raw-to-central moment map selects the quadratic block.
  Eigen::MatrixXd grad_eta = Eigen::MatrixXd::Zero(dim, n_quad);
  grad_eta.bottomRows(n_quad).setIdentity();
  const Eigen::MatrixXd sigma2 =
      grad_eta.transpose() * sigma1 * grad_eta;

  // Second delta step: central moments to correlations.
  Eigen::VectorXd rho(k);
  Eigen::MatrixXd grad_gamma_t = Eigen::MatrixXd::Zero(k, n_quad);
  const double var_y = sigma(y, y);
  for (Index i = 0; i < k; ++i) {
    const double var_x = sigma(i, i);
    const double cov_xy = sigma(i, y);
    rho[i] = cov_xy / std::sqrt(var_x * var_y);
    grad_gamma_t(i, i) = -cov_xy / (2.0 * std::sqrt(var_x * var_x * var_x * var_y));
    grad_gamma_t(i, k) = -cov_xy / (2.0 * std::sqrt(var_x * var_y * var_y * var_y));
    grad_gamma_t(i, k + 1 + i) = 1.0 / std::sqrt(var_x * var_y);
  }
  const Eigen::MatrixXd sigma3 =
      grad_gamma_t * sigma2 * grad_gamma_t.transpose();

  // Fisher scaling: phi'(rho) = 1 / (1 - rho^2).
  Eigen::VectorXd dphi(k);
  for (Index i = 0; i < k; ++i) {
    dphi[i] = 1.0 / (1.0 - rho[i] * rho[i]);
  }
  return dphi.asDiagonal() * sigma3 * dphi.asDiagonal();
}

}  // namespace rglab
