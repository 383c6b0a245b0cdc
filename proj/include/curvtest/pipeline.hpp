#pragma once

#include <cstdint>
#include <map>
#include <optional>

#include "curvtest/bootstrap.hpp"
#include "curvtest/config.hpp"
#include "curvtest/dataset.hpp"

namespace curvtest {

// =====================================================================
// End-to-end test pipeline: estimate beta, resolve bandwidths/grid,
// evaluate the configured statistic, bootstrap its distribution, and
// apply the decision rule.
// =====================================================================

struct TestReport {
  TestFlavor flavor = TestFlavor::Global;
  Hypothesis hypothesis = Hypothesis::Concave;

  // The scalar actually tested: s_n (global) or the hypothesis-matched
  // curve aggregate (local).
  double statistic = 0.0;

  std::optional<GlobalStat> global_stat;   // global flavor
  std::optional<LocalStatCurve> curve;     // local flavor

  std::map<double, double> bootstrap_quantiles;
  double critical_value = 0.0;
  bool reject_below = false;   // rejection side of the rule applied
  double quantile_level = 0.0; // level of the critical value
  Decision decision = Decision::FailToReject;

  Eigen::VectorXd beta_hat;
  double intercept_hat = 0.0;
  double h_x_used = 0.0;
  std::optional<double> h_y_used;

  double tie_fraction = 0.0;
  bool tie_warning = false;  // tie_fraction > 0.10 (theory assumes continuous Y)

  std::int64_t runtime_ms = 0;
};

// Re-applies the published decision rule to the report's own fields;
// used to assert that `decision` is a pure function of (statistic,
// critical value, side).
Decision rederive_decision(const TestReport& report);

TestReport run_test(const Dataset& data, const TestConfig& config);

}  // namespace curvtest
