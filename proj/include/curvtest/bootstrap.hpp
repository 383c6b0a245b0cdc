#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "curvtest/config.hpp"
#include "curvtest/dataset.hpp"
#include "curvtest/estimators.hpp"

namespace curvtest {

// =====================================================================
// Residual bootstrap for critical values.
//
// Per replicate b: draw bootstrap errors from the fitted residuals
// (wild two-point signs, or resampling with replacement), form
// Y* = X beta_hat + eps*, re-estimate beta on (Y*, X), recompute the
// configured statistic with freshly resolved rule-of-thumb bandwidths,
// and record it.  Replicate b draws from an RNG substream keyed by
// (seed, b), so the vector of replicate statistics is identical no
// matter how replicates are scheduled across threads.
// =====================================================================

struct BootstrapResult {
  std::vector<double> replicate_stats;  // length B, indexed by replicate
  std::map<double, double> quantiles;   // empirical lower quantiles
  BootstrapScheme scheme = BootstrapScheme::WildTwoPoint;
  std::uint64_t seed = 0;
};

// Everything resolved once from the original sample before replication
// starts: the fitted model and, for local tests, the evaluation grid
// (which must not drift with Y*).
struct ResolvedTestContext {
  EstimatedModel model;
  Bandwidth h_x{};                 // used for the original statistic
  std::optional<Bandwidth> h_y;    // local only
  std::vector<double> grid;        // empty for global flavor
};

ResolvedTestContext resolve_context(const Dataset& data, const TestConfig& config);

// Quantile-based default grid: 17 equally spaced points between the
// 5th and 95th percentiles of y.
std::vector<double> auto_grid(const Eigen::VectorXd& y);

BootstrapResult bootstrap_distribution(const Dataset& data, const TestConfig& config);
BootstrapResult bootstrap_distribution(const Dataset& data, const TestConfig& config,
                                       const ResolvedTestContext& ctx);

// Lower empirical quantile: the ceil(alpha*B)-th order statistic.
// alpha must lie in (0, 1).
double empirical_quantile(std::vector<double> values, double alpha);

// Decision core, shared by global and local flavors.  `statistic` is
// s_n (global) or the hypothesis-matched curve aggregate (local);
// replicate_stats must already be on the same scale.
struct DecisionOutcome {
  Decision decision = Decision::FailToReject;
  double statistic = 0.0;       // the value actually compared
  double critical_value = 0.0;  // the bootstrap quantile compared against
  bool reject_below = false;    // true: reject when statistic < critical
  double quantile_level = 0.0;  // which quantile the critical value is
};

DecisionOutcome decide_global(const GlobalStat& stat, const BootstrapResult& boot,
                              Hypothesis hypothesis, double alpha);
DecisionOutcome decide_local(const LocalStatCurve& curve, const BootstrapResult& boot,
                             Hypothesis hypothesis, double alpha);

// Curve aggregate the given hypothesis tests against (inf / sup-abs / sup).
double local_aggregate(const LocalStatCurve& curve, Hypothesis hypothesis);

// Raw draw helpers, exposed for direct distributional tests.
std::vector<double> wild_multipliers(std::mt19937_64& engine, int n);
std::vector<int> resample_indices(std::mt19937_64& engine, int n);

}  // namespace curvtest
