#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "curvtest/errors.hpp"
#include "curvtest/estimators.hpp"
#include "curvtest/kernel.hpp"
#include "curvtest/ustat.hpp"

namespace curvtest {

// =====================================================================
// Test configuration shared by the bootstrap, the MC harness, and the
// CLI.  Optional fields left empty mean "resolve automatically from the
// sample" (rule-of-thumb bandwidths, quantile-based grid).
// =====================================================================

enum class Hypothesis { Concave, Linear, Convex };
enum class TestFlavor { Global, Local };
enum class BootstrapScheme { WildTwoPoint, ResampleResiduals };
enum class Decision { Reject, FailToReject };

struct TestConfig {
  Hypothesis hypothesis = Hypothesis::Concave;
  TestFlavor flavor = TestFlavor::Global;
  KernelSpec kernel{};
  std::optional<double> h_x;              // empty = rule of thumb
  std::optional<double> h_y;              // local only; empty = rule of thumb
  std::optional<std::vector<double>> grid;  // local only; empty = auto
  BootstrapScheme scheme = BootstrapScheme::WildTwoPoint;
  int n_bootstrap = 500;
  double level = 0.05;  // alpha in (0, 0.5]
  std::uint64_t seed = 0;
  EstimatorSpec estimator{};
  EvalMode pruning = EvalMode::Exact;
  // Diagnostics: skip estimation and use this coefficient vector as-is
  // (residuals y - x*beta, zero intercept).
  std::optional<Eigen::VectorXd> beta_fixed;
};

// Throws UsageError on invalid combinations: alpha outside (0, 0.5],
// n_bootstrap < 2, ResampleResiduals with the Global flavor (the wild
// two-point scheme is the only one that imposes the error symmetry the
// global statistic's bootstrap needs), non-positive manual bandwidths,
// unsorted/empty manual grid.
void validate_config(const TestConfig& config);

std::string hypothesis_name(Hypothesis h);
std::string flavor_name(TestFlavor f);
std::string scheme_name(BootstrapScheme s);
std::string decision_name(Decision d);
std::string estimator_name(EstimatorKind k);
std::string mode_name(EvalMode m);

}  // namespace curvtest
