#include "curvtest/pipeline.hpp"

#include <chrono>

#include "curvtest/ustat.hpp"

namespace curvtest {

Decision rederive_decision(const TestReport& report) {
  const bool reject = report.reject_below ? report.statistic < report.critical_value
                                          : report.statistic > report.critical_value;
  return reject ? Decision::Reject : Decision::FailToReject;
}

TestReport run_test(const Dataset& data, const TestConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  const ResolvedTestContext ctx = resolve_context(data, config);

  TestReport report;
  report.flavor = config.flavor;
  report.hypothesis = config.hypothesis;
  report.beta_hat = ctx.model.beta;
  report.intercept_hat = ctx.model.intercept;
  report.h_x_used = ctx.h_x.value;
  report.tie_fraction = data.tie_fraction;
  report.tie_warning = data.tie_fraction > 0.10;

  DecisionOutcome outcome;
  if (config.flavor == TestFlavor::Global) {
    const GlobalStat stat =
        global_u_stat(data.y, ctx.model.index, config.kernel, ctx.h_x, config.pruning);
    const BootstrapResult boot = bootstrap_distribution(data, config, ctx);
    outcome = decide_global(stat, boot, config.hypothesis, config.level);
    report.global_stat = stat;
    report.bootstrap_quantiles = boot.quantiles;
  } else {
    report.h_y_used = ctx.h_y->value;
    const LocalStatCurve curve = local_statistics(data.y, ctx.model.index, config.kernel,
                                                  ctx.h_x, *ctx.h_y, ctx.grid, config.pruning);
    const BootstrapResult boot = bootstrap_distribution(data, config, ctx);
    outcome = decide_local(curve, boot, config.hypothesis, config.level);
    report.curve = curve;
    report.bootstrap_quantiles = boot.quantiles;
  }

  report.statistic = outcome.statistic;
  report.critical_value = outcome.critical_value;
  report.reject_below = outcome.reject_below;
  report.quantile_level = outcome.quantile_level;
  report.decision = outcome.decision;
  report.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
  return report;
}

}  // namespace curvtest
