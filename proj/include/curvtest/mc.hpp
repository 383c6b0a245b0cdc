#pragma once

#include <cstdint>
#include <string>

#include "curvtest/config.hpp"
#include "curvtest/dataset.hpp"

namespace curvtest {

// =====================================================================
// Monte Carlo designs D0-D4 and the size/power harness.
//
// Each design fixes an increasing transformation T with T(0) = 0,
// draws X and eps i.i.d. (standard normal, or centered Gumbel for the
// robustness variant), sets Z = X + eps, and returns Y = T^{-1}(Z):
//   D0  Y = Z                       (linear)
//   D1  Y = 2.12 (e^Z - 1)          (T concave)
//   D2  Y = asinh(13 Z) / 2         (T convex-concave S-shape)
//   D3  Y = 2.12 (1 - e^{-Z})       (T convex)
//   D4  Y = 2 atanh(Z / 5)          (T mixed; |Z| < 5 enforced by
//                                    redrawing the (X, eps) pair)
// =====================================================================

enum class McDesignId { D0, D1, D2, D3, D4 };
enum class ErrorDist { StdNormal, GumbelCentered };

struct McDesign {
  McDesignId id = McDesignId::D0;
  ErrorDist error_dist = ErrorDist::StdNormal;
  int n = 100;
};

// Forward map T (design transformation) and its inverse.
double design_t(McDesignId id, double y);
double design_t_inv(McDesignId id, double z);

std::string design_name(McDesignId id);
std::string error_dist_name(ErrorDist dist);

Dataset generate_design(const McDesign& design, std::uint64_t seed);

// Instrumented variant reporting how many (X, eps) pairs the D4 domain
// guard redrew (always 0 for other designs).
struct GeneratedSample {
  Dataset data;
  std::int64_t redraws = 0;
};
GeneratedSample generate_design_stats(const McDesign& design, std::uint64_t seed);

// One row of a rejection table: run the configured test on `reps`
// independent replications of the design and count rejections.
struct RejectionRow {
  McDesign design{};
  TestFlavor flavor = TestFlavor::Global;
  Hypothesis hypothesis = Hypothesis::Concave;
  BootstrapScheme scheme = BootstrapScheme::WildTwoPoint;
  int reps = 0;
  int n_bootstrap = 0;
  double level = 0.0;
  std::uint64_t seed = 0;
  int rejections = 0;
  double frequency = 0.0;
  double std_error = 0.0;  // binomial sqrt(p(1-p)/reps)
  std::int64_t wall_ms = 0;
};

// Replication r generates data from substream (config.seed, r) and runs
// the test with an independent per-replication bootstrap seed; errors
// abort with the failing replication index attached.
RejectionRow run_mc(const McDesign& design, int reps, const TestConfig& config);

}  // namespace curvtest
