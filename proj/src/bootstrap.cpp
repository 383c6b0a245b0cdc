#include "curvtest/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "curvtest/rng.hpp"
#include "curvtest/ustat.hpp"

namespace curvtest {

namespace {

constexpr int kMaxRedraws = 10;

// Standard levels always present in the quantile map, plus whatever the
// configured alpha needs.
std::set<double> quantile_levels(double alpha) {
  std::set<double> levels = {0.01, 0.025, 0.05, 0.10, 0.25, 0.50,
                             0.75, 0.90, 0.95, 0.975, 0.99};
  levels.insert(alpha);
  levels.insert(1.0 - alpha);
  levels.insert(1.0 - alpha / 2.0);
  return levels;
}

}  // namespace

std::vector<double> auto_grid(const Eigen::VectorXd& y) {
  std::vector<double> sorted(y.data(), y.data() + y.size());
  std::sort(sorted.begin(), sorted.end());
  const double lo = empirical_quantile(sorted, 0.05);
  const double hi = empirical_quantile(sorted, 0.95);
  std::vector<double> grid(17);
  for (int t = 0; t < 17; ++t) grid[t] = lo + (hi - lo) * t / 16.0;
  return grid;
}

double empirical_quantile(std::vector<double> values, double alpha) {
  if (values.empty()) throw UsageError("quantile of an empty sample");
  if (!(alpha > 0.0 && alpha < 1.0)) throw UsageError("quantile level must be in (0, 1)");
  std::sort(values.begin(), values.end());
  const double b = static_cast<double>(values.size());
  // ceil(alpha*B) with a fuzz guard so exactly-integer products do not
  // round up through floating error (0.05 * 500 must give 25, not 26).
  auto k = static_cast<std::size_t>(std::ceil(alpha * b - 1e-9));
  k = std::clamp<std::size_t>(k, 1, values.size());
  return values[k - 1];
}

std::vector<double> wild_multipliers(std::mt19937_64& engine, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = (engine() & 1ULL) ? 1.0 : -1.0;
  return v;
}

std::vector<int> resample_indices(std::mt19937_64& engine, int n) {
  std::uniform_int_distribution<int> pick(0, n - 1);
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = pick(engine);
  return idx;
}

double local_aggregate(const LocalStatCurve& curve, Hypothesis hypothesis) {
  switch (hypothesis) {
    case Hypothesis::Concave: return curve.aggregate_inf;
    case Hypothesis::Convex: return curve.aggregate_sup;
    case Hypothesis::Linear: return curve.aggregate_sup_abs;
  }
  return 0.0;
}

ResolvedTestContext resolve_context(const Dataset& data, const TestConfig& config) {
  validate_config(config);
  ResolvedTestContext ctx;
  if (config.beta_fixed) {
    if (config.beta_fixed->size() != data.q()) {
      throw UsageError("fixed beta length does not match regressor count");
    }
    ctx.model.beta = *config.beta_fixed;
    ctx.model.intercept = 0.0;
    ctx.model.index = data.x * ctx.model.beta;
    ctx.model.residuals = data.y - ctx.model.index;
  } else {
    ctx.model = fit_model(data, config.estimator);
  }
  ctx.h_x = config.h_x ? manual_bandwidth(*config.h_x)
                       : index_diff_bandwidth(ctx.model.index);
  if (config.flavor == TestFlavor::Local) {
    ctx.h_y = config.h_y
                  ? manual_bandwidth(*config.h_y)
                  : bandwidth_rot(std::span<const double>(data.y.data(), data.y.size()));
    ctx.grid = config.grid ? *config.grid : auto_grid(data.y);
  }
  return ctx;
}

BootstrapResult bootstrap_distribution(const Dataset& data, const TestConfig& config) {
  return bootstrap_distribution(data, config, resolve_context(data, config));
}

BootstrapResult bootstrap_distribution(const Dataset& data, const TestConfig& config,
                                       const ResolvedTestContext& ctx) {
  validate_config(config);
  const int b_total = config.n_bootstrap;
  const Eigen::Index n = data.n();
  const Eigen::VectorXd fitted =
      Eigen::VectorXd::Constant(n, ctx.model.intercept) + ctx.model.index;
  const Eigen::VectorXd& resid = ctx.model.residuals;

  std::vector<double> stats(b_total, 0.0);
  std::string first_error;
  int first_error_rep = -1;

#pragma omp parallel for schedule(dynamic)
  for (int b = 0; b < b_total; ++b) {
    auto engine = make_engine(config.seed, stream::kBootstrap + static_cast<std::uint64_t>(b));
    bool done = false;
    std::string fail_reason;
    for (int attempt = 0; attempt < kMaxRedraws && !done; ++attempt) {
      Eigen::VectorXd ystar(n);
      if (config.scheme == BootstrapScheme::WildTwoPoint) {
        const std::vector<double> v = wild_multipliers(engine, static_cast<int>(n));
        for (Eigen::Index i = 0; i < n; ++i) ystar[i] = fitted[i] + v[i] * resid[i];
      } else {
        const std::vector<int> idx = resample_indices(engine, static_cast<int>(n));
        for (Eigen::Index i = 0; i < n; ++i) ystar[i] = fitted[i] + resid[idx[i]];
      }
      if ((ystar.array() == ystar[0]).all()) {
        fail_reason = "all bootstrap outcomes tied";
        continue;  // degenerate draw, retry
      }
      try {
        Eigen::VectorXd index_star;
        if (config.beta_fixed) {
          index_star = ctx.model.index;
        } else {
          index_star = data.x * fit_model(ystar, data.x, config.estimator).beta;
        }
        const Bandwidth hx = config.h_x ? manual_bandwidth(*config.h_x)
                                        : index_diff_bandwidth(index_star);
        if (config.flavor == TestFlavor::Global) {
          stats[b] = global_u_stat(ystar, index_star, config.kernel, hx, config.pruning).s_n;
        } else {
          const Bandwidth hy =
              config.h_y ? manual_bandwidth(*config.h_y)
                         : bandwidth_rot(std::span<const double>(ystar.data(), n));
          const LocalStatCurve curve = local_statistics(
              ystar, index_star, config.kernel, hx, hy, ctx.grid, config.pruning);
          stats[b] = local_aggregate(curve, config.hypothesis);
        }
        done = true;
      } catch (const NumericalError& err) {
        fail_reason = err.what();  // degenerate re-estimate/bandwidth, retry
      }
    }
    if (!done) {
#pragma omp critical
      {
        if (first_error_rep < 0 || b < first_error_rep) {
          first_error_rep = b;
          first_error = fail_reason;
        }
      }
    }
  }
  if (first_error_rep >= 0) {
    throw NumericalError("bootstrap replicate " + std::to_string(first_error_rep + 1) +
                         " degenerate after " + std::to_string(kMaxRedraws) +
                         " redraws: " + first_error);
  }

  BootstrapResult result;
  result.replicate_stats = std::move(stats);
  result.scheme = config.scheme;
  result.seed = config.seed;
  for (double level : quantile_levels(config.level)) {
    result.quantiles[level] = empirical_quantile(result.replicate_stats, level);
  }
  return result;
}

DecisionOutcome decide_global(const GlobalStat& stat, const BootstrapResult& boot,
                              Hypothesis hypothesis, double alpha) {
  if (!(alpha > 0.0 && alpha <= 0.5)) throw UsageError("level must lie in (0, 0.5]");
  DecisionOutcome out;
  switch (hypothesis) {
    case Hypothesis::Concave:
      out.statistic = stat.s_n;
      out.quantile_level = alpha;
      out.critical_value = empirical_quantile(boot.replicate_stats, alpha);
      out.reject_below = true;
      break;
    case Hypothesis::Convex:
      out.statistic = stat.s_n;
      out.quantile_level = 1.0 - alpha;
      out.critical_value = empirical_quantile(boot.replicate_stats, 1.0 - alpha);
      out.reject_below = false;
      break;
    case Hypothesis::Linear: {
      std::vector<double> abs_reps(boot.replicate_stats.size());
      for (std::size_t i = 0; i < abs_reps.size(); ++i) {
        abs_reps[i] = std::abs(boot.replicate_stats[i]);
      }
      out.statistic = std::abs(stat.s_n);
      out.quantile_level = 1.0 - alpha / 2.0;
      out.critical_value = empirical_quantile(abs_reps, out.quantile_level);
      out.reject_below = false;
      break;
    }
  }
  const bool reject = out.reject_below ? out.statistic < out.critical_value
                                       : out.statistic > out.critical_value;
  out.decision = reject ? Decision::Reject : Decision::FailToReject;
  return out;
}

DecisionOutcome decide_local(const LocalStatCurve& curve, const BootstrapResult& boot,
                             Hypothesis hypothesis, double alpha) {
  if (!(alpha > 0.0 && alpha <= 0.5)) throw UsageError("level must lie in (0, 0.5]");
  DecisionOutcome out;
  out.statistic = local_aggregate(curve, hypothesis);
  switch (hypothesis) {
    case Hypothesis::Concave:
      out.quantile_level = alpha;
      out.reject_below = true;
      break;
    case Hypothesis::Convex:
    case Hypothesis::Linear:
      out.quantile_level = 1.0 - alpha;
      out.reject_below = false;
      break;
  }
  out.critical_value = empirical_quantile(boot.replicate_stats, out.quantile_level);
  const bool reject = out.reject_below ? out.statistic < out.critical_value
                                       : out.statistic > out.critical_value;
  out.decision = reject ? Decision::Reject : Decision::FailToReject;
  return out;
}

}  // namespace curvtest
