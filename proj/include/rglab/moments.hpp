#pragma once

namespace rglab {

// Variances, pairwise correlations and the nine fourth-order covariances of
// a feature pair (X_i, X_j) against the target Y. Naming: c_ab_cd is the
// covariance of a*b with c*d, e.g. c_xiy_xj2 = Cov(X_i*Y, X_j^2).
struct PairwiseMoments {
  double var_xi = 0.0;
  double var_xj = 0.0;
  double var_y = 0.0;
  double rho_i = 0.0;
  double rho_j = 0.0;
  double rho_xixj = 0.0;

  double c_xi2_xj2 = 0.0;
  double c_y2_xj2 = 0.0;
  double c_xiy_xj2 = 0.0;
  double c_xi2_y2 = 0.0;
  double c_y2_y2 = 0.0;
  double c_xiy_y2 = 0.0;
  double c_xi2_xjy = 0.0;
  double c_y2_xjy = 0.0;
  double c_xiy_xjy = 0.0;
};

}  // namespace rglab
