#pragma once

#include <Eigen/Dense>

#include "curvtest/dataset.hpp"
#include "curvtest/errors.hpp"

namespace curvtest {

// =====================================================================
// Index estimators: OLS (default) and maximum rank correlation.
// Both produce the fitted index X'beta and linear residuals, which is
// all downstream statistics and the bootstrap ever consume.
// =====================================================================

enum class EstimatorKind { OLS, MRC };

struct MrcOptions {
  int multistarts = 8;   // random starts per sign of beta_1
  int refine_iters = 3;  // coordinate-sweep refinement rounds per start
};

struct EstimatorSpec {
  EstimatorKind kind = EstimatorKind::OLS;
  bool intercept = false;  // OLS only; MRC is location-free
  MrcOptions mrc{};
};

struct EstimatedModel {
  Eigen::VectorXd beta;      // length q (intercept kept separate)
  double intercept = 0.0;    // 0 unless OLS with intercept
  Eigen::VectorXd index;     // x * beta, intercept excluded
  Eigen::VectorXd residuals; // y - intercept - index
};

// Least squares via column-pivoted QR.  Rank deficiency (relative pivot
// below 1e-12) throws NumericalError naming the offending column.
EstimatedModel ols_fit(const Eigen::VectorXd& y, const Eigen::MatrixXd& x,
                       bool intercept);
EstimatedModel ols_fit(const Dataset& data, bool intercept);

// Maximum rank correlation: beta maximizes the count of concordant
// pairs Q(beta) = #{i,j : Y_i > Y_j and X_i'beta > X_j'beta} under the
// normalization |beta_1| = 1.  Multistart coordinate search with
// golden-section sweeps; deterministic tie-breaking (first maximizer in
// scan order).  All Y tied throws DataError (Q is identically zero).
EstimatedModel mrc_fit(const Eigen::VectorXd& y, const Eigen::MatrixXd& x,
                       const MrcOptions& opts = {});
EstimatedModel mrc_fit(const Dataset& data, const MrcOptions& opts = {});

// Concordant-pair count Q(beta) for a given index vector, computed in
// O(n log n) with a Fenwick tree.  Exposed for tests and diagnostics.
long long mrc_objective(const Eigen::VectorXd& y, const Eigen::VectorXd& index);

// Dispatch on spec.kind.
EstimatedModel fit_model(const Eigen::VectorXd& y, const Eigen::MatrixXd& x,
                         const EstimatorSpec& spec);
EstimatedModel fit_model(const Dataset& data, const EstimatorSpec& spec);

}  // namespace curvtest
