#include "curvtest/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace curvtest {

double y_tie_fraction(const Eigen::VectorXd& y) {
  std::vector<double> sorted(y.data(), y.data() + y.size());
  std::sort(sorted.begin(), sorted.end());
  const auto distinct = std::unique(sorted.begin(), sorted.end()) - sorted.begin();
  return 1.0 - static_cast<double>(distinct) / static_cast<double>(sorted.size());
}

Dataset validate_dataset(Eigen::VectorXd y, Eigen::MatrixXd x,
                         std::vector<std::string> column_names) {
  const Eigen::Index n = y.size();
  if (x.rows() != n) {
    throw DataError("dimension mismatch: y has " + std::to_string(n) + " rows but x has " +
                    std::to_string(x.rows()));
  }
  if (n < 3) {
    throw DataError("need at least 3 observations, got " + std::to_string(n));
  }
  if (x.cols() < 1) {
    throw DataError("need at least one regressor column");
  }
  if (!column_names.empty() &&
      static_cast<Eigen::Index>(column_names.size()) != x.cols()) {
    throw DataError("column_names size does not match regressor count");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!std::isfinite(y[i])) {
      throw DataError("non-finite y value at row " + std::to_string(i + 1));
    }
  }
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!std::isfinite(x(i, j))) {
        throw DataError("non-finite x value at row " + std::to_string(i + 1) + ", column " +
                        std::to_string(j + 1));
      }
    }
  }
  Dataset data;
  data.tie_fraction = y_tie_fraction(y);
  data.y = std::move(y);
  data.x = std::move(x);
  data.column_names = std::move(column_names);
  return data;
}

}  // namespace curvtest
