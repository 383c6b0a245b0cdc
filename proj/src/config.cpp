#include "curvtest/config.hpp"

#include <cmath>

namespace curvtest {

void validate_config(const TestConfig& config) {
  if (!(config.level > 0.0 && config.level <= 0.5)) {
    throw UsageError("level must lie in (0, 0.5]");
  }
  if (config.n_bootstrap < 2) {
    throw UsageError("need at least 2 bootstrap replications");
  }
  if (config.flavor == TestFlavor::Global &&
      config.scheme == BootstrapScheme::ResampleResiduals) {
    throw UsageError(
        "the global statistic's bootstrap requires the wild two-point scheme "
        "(residual resampling does not impose the error symmetry it relies on)");
  }
  if (config.h_x && (!std::isfinite(*config.h_x) || *config.h_x <= 0.0)) {
    throw UsageError("bandwidth-x must be positive and finite");
  }
  if (config.h_y && (!std::isfinite(*config.h_y) || *config.h_y <= 0.0)) {
    throw UsageError("bandwidth-y must be positive and finite");
  }
  if (config.grid) {
    if (config.grid->empty()) throw UsageError("grid must be nonempty");
    for (std::size_t t = 0; t < config.grid->size(); ++t) {
      if (!std::isfinite((*config.grid)[t])) throw UsageError("grid points must be finite");
      if (t > 0 && (*config.grid)[t] < (*config.grid)[t - 1]) {
        throw UsageError("grid must be sorted ascending");
      }
    }
  }
  if (config.estimator.kind == EstimatorKind::MRC &&
      (config.estimator.mrc.multistarts < 1 || config.estimator.mrc.refine_iters < 1)) {
    throw UsageError("mrc options must be positive");
  }
  // Validates the (family, truncation) combination.
  make_kernel(config.kernel.family, config.kernel.truncation_radius);
}

std::string hypothesis_name(Hypothesis h) {
  switch (h) {
    case Hypothesis::Concave: return "concavity";
    case Hypothesis::Linear: return "linearity";
    case Hypothesis::Convex: return "convexity";
  }
  return "?";
}

std::string flavor_name(TestFlavor f) {
  return f == TestFlavor::Global ? "global" : "local";
}

std::string scheme_name(BootstrapScheme s) {
  return s == BootstrapScheme::WildTwoPoint ? "wild" : "resample";
}

std::string decision_name(Decision d) {
  return d == Decision::Reject ? "reject" : "fail-to-reject";
}

std::string estimator_name(EstimatorKind k) {
  return k == EstimatorKind::OLS ? "ols" : "mrc";
}

std::string mode_name(EvalMode m) {
  return m == EvalMode::Exact ? "exact" : "prune";
}

}  // namespace curvtest
