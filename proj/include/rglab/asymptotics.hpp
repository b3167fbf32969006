#pragma once

#include <array>
#include <complex>
#include <vector>

#include <Eigen/Core>

#include "rglab/generative.hpp"
#include "rglab/moments.hpp"

namespace rglab {

// Roots of a cubic polynomial; real_roots lists the real subset with
// multiplicity, sorted ascending.
struct CubicRoots {
  std::array<std::complex<double>, 3> roots;
  std::vector<double> real_roots;
};

// All three complex roots of c3*x^3 + c2*x^2 + c1*x + c0 via the closed
// Cardano/trigonometric forms, each followed by one Newton polish. Throws on
// c3 == 0.
CubicRoots solve_cubic(double c3, double c2, double c1, double c0);

// Eigenvalues of the correlation matrix
//   [[1, c, rho1], [c, 1, rho2], [rho1, rho2, 1]]
// of (X_1, X_2, Y), i.e. roots of its characteristic polynomial. Inputs must
// lie in (-1, 1).
CubicRoots char_poly_roots(double rho1, double rho2, double c);

// True iff the correlation structure above is positive semi-definite,
// i.e. min eigenvalue >= -1e-10.
bool is_valid_correlation_structure(double rho1, double rho2, double c);

// Closed-form fourth-order covariances of a zero-mean Gaussian triple
// (X_i, X_j, Y) with covariance sigma, via the Wick/Isserlis identity
// Cov(AB, CD) = S_AC*S_BD + S_AD*S_BC.
PairwiseMoments isserlis_pair_moments(const Eigen::Matrix3d& sigma);

// Left-hand side of the asymptotic-independence condition: zero (within
// tolerance) iff phi(r_i) and phi(r_j) are asymptotically independent. The
// expression is dimensionless (invariant under rescaling of X_i, X_j, Y).
double independence_lhs(const PairwiseMoments& m);

// Under joint Gaussianity the independence condition reduces to a quadratic
// a*rho_x1x2^2 + b*rho_x1x2 + c = 0 in the feature-feature correlation.
struct QuadraticCondition {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double discriminant = 0.0;

  // Real roots of the quadratic (the degenerate a == 0 case is linear with
  // exactly one root; b > 0 is guaranteed there for |rho| < 1).
  std::vector<double> real_roots() const;
};

QuadraticCondition gaussian_condition(double rho1, double rho2);

// Asymptotic covariance of sqrt(n) * (phi(r) - phi(rho)) for a joint Gaussian
// spec, computed by the exact moment pipeline: the (3k+2)-dimensional CLT
// covariance of (X, Y, X^2, Y^2, XY), two delta-method Jacobians, and the
// final Fisher-derivative scaling. Dense work, so k is capped at 64.
Eigen::MatrixXd asymptotic_fisher_covariance(const GaussianSpec& spec);

inline constexpr Index kMaxAsymptoticFeatures = 64;

}  // namespace rglab
