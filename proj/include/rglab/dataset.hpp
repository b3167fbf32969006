#pragma once

#include <Eigen/Core>

namespace rglab {

using Index = Eigen::Index;

// A sampled realization of (X_1,...,X_k, Y): one row per observation.
struct Dataset {
  Eigen::MatrixXd features;  // n x k
  Eigen::VectorXd target;    // n

  Index n() const { return features.rows(); }
  Index k() const { return features.cols(); }
};

// Checks n >= 4, matching row counts and finite entries. Constant columns are
// caught later, at correlation time.
void validate_dataset(const Dataset& data);

}  // namespace rglab
