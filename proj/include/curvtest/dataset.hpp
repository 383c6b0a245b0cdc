#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "curvtest/errors.hpp"

namespace curvtest {

// =====================================================================
// Core sample type: outcomes y (length n) and regressors x (n x q).
// Immutable after construction; validated once at the boundary.
// =====================================================================

struct Dataset {
  Eigen::VectorXd y;
  Eigen::MatrixXd x;
  std::vector<std::string> column_names;  // optional; size q when present
  double tie_fraction = 0.0;              // 1 - (#distinct y)/n

  Eigen::Index n() const { return y.size(); }
  Eigen::Index q() const { return x.cols(); }
};

// Checks dimensions (n >= 3, q >= 1, rows match), rejects non-finite
// entries (reporting 1-based row/column), and computes tie_fraction.
// Throws DataError on any violation.
Dataset validate_dataset(Eigen::VectorXd y, Eigen::MatrixXd x,
                         std::vector<std::string> column_names = {});

// Fraction of y values that duplicate an earlier one: 1 - (#distinct)/n.
double y_tie_fraction(const Eigen::VectorXd& y);

}  // namespace curvtest
