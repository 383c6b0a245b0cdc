#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "curvtest/bootstrap.hpp"
#include "curvtest/mc.hpp"
#include "curvtest/pipeline.hpp"
#include "curvtest/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace curvtest;

namespace {

TestConfig base_config() {
  TestConfig config;
  config.hypothesis = Hypothesis::Concave;
  config.flavor = TestFlavor::Global;
  config.kernel = make_kernel(KernelFamily::Gaussian);
  config.scheme = BootstrapScheme::WildTwoPoint;
  config.n_bootstrap = 50;
  config.level = 0.05;
  config.seed = 11;
  return config;
}

Dataset small_sample(int n, std::uint64_t seed) {
  McDesign design;
  design.id = McDesignId::D0;
  design.n = n;
  return generate_design(design, seed);
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  return std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("empirical quantile is the ceil(alpha B) order statistic") {
  std::vector<double> values;
  for (int i = 100; i >= 1; --i) values.push_back(static_cast<double>(i));  // 1..100 reversed
  CHECK(empirical_quantile(values, 0.05) == 5.0);    // ceil(5) = 5th order stat
  CHECK(empirical_quantile(values, 0.051) == 6.0);   // ceil(5.1) = 6
  CHECK(empirical_quantile(values, 0.95) == 95.0);
  CHECK(empirical_quantile(values, 0.975) == 98.0);  // ceil(97.5) = 98
  CHECK(empirical_quantile(values, 0.001) == 1.0);   // clamped to the minimum
  CHECK(empirical_quantile(values, 0.9999) == 100.0);

  // B = 500, alpha = 0.05: the 25th order statistic exactly (the 1e-9 fuzz
  // keeps 0.05 * 500 = 25.000000000000004 from bumping to 26).
  std::vector<double> five_hundred;
  for (int i = 0; i < 500; ++i) five_hundred.push_back(static_cast<double>(i + 1));
  CHECK(empirical_quantile(five_hundred, 0.05) == 25.0);

  CHECK_THROWS_AS(empirical_quantile(values, 0.0), UsageError);
  CHECK_THROWS_AS(empirical_quantile(values, 1.0), UsageError);
  CHECK_THROWS_AS(empirical_quantile({}, 0.5), UsageError);
}

TEST_CASE("quantiles are monotone in the level") {
  const Dataset data = small_sample(40, 3);
  TestConfig config = base_config();
  config.n_bootstrap = 80;
  const BootstrapResult boot = bootstrap_distribution(data, config);
  REQUIRE(boot.replicate_stats.size() == 80);
  double prev = -1e300;
  for (const auto& [level, value] : boot.quantiles) {
    CHECK(value >= prev);
    prev = value;
  }
  CHECK(boot.quantiles.count(0.05) == 1);
  CHECK(boot.quantiles.count(0.95) == 1);
  CHECK(boot.quantiles.count(0.975) == 1);
}

TEST_CASE("bootstrap reruns are bit-identical") {
  const Dataset data = small_sample(35, 17);
  TestConfig config = base_config();
  const BootstrapResult a = bootstrap_distribution(data, config);
  const BootstrapResult b = bootstrap_distribution(data, config);
  CHECK(bitwise_equal(a.replicate_stats, b.replicate_stats));

#ifdef _OPENMP
  // Scheduling must not matter: same stats with 1 thread and 4.
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const BootstrapResult serial = bootstrap_distribution(data, config);
  omp_set_num_threads(4);
  const BootstrapResult parallel = bootstrap_distribution(data, config);
  omp_set_num_threads(saved);
  CHECK(bitwise_equal(serial.replicate_stats, parallel.replicate_stats));
#endif

  // A different seed gives a different distribution.
  config.seed = 12;
  const BootstrapResult c = bootstrap_distribution(data, config);
  CHECK_FALSE(bitwise_equal(a.replicate_stats, c.replicate_stats));
}

TEST_CASE("wild multipliers are +-1 and nearly balanced") {
  auto engine = make_engine(5, stream::kBootstrap);
  const std::vector<double> v = wild_multipliers(engine, 10000);
  double sum = 0.0;
  for (const double m : v) {
    CHECK((m == 1.0 || m == -1.0));
    sum += m;
  }
  CHECK(std::fabs(sum / 10000.0) < 0.03);
}

TEST_CASE("resample indices are in range and hit most of the sample") {
  auto engine = make_engine(5, stream::kBootstrap + 1);
  const std::vector<int> idx = resample_indices(engine, 200);
  REQUIRE(idx.size() == 200);
  std::vector<bool> seen(200, false);
  for (const int i : idx) {
    REQUIRE(i >= 0);
    REQUIRE(i < 200);
    seen[i] = true;
  }
  int distinct = 0;
  for (const bool s : seen) distinct += s ? 1 : 0;
  // E[distinct] = 200 (1 - (1-1/200)^200) ~ 126.5; a wide band around it.
  CHECK(distinct > 90);
  CHECK(distinct < 160);
}

TEST_CASE("wild replicate statistics straddle zero under the null") {
  McDesign design;
  design.id = McDesignId::D0;
  design.n = 100;
  const Dataset data = generate_design(design, 4);
  TestConfig config = base_config();
  config.n_bootstrap = 200;
  const BootstrapResult boot = bootstrap_distribution(data, config);
  double mean = 0.0, ss = 0.0, lo = 1e300, hi = -1e300;
  for (const double s : boot.replicate_stats) {
    mean += s;
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  mean /= 200.0;
  for (const double s : boot.replicate_stats) ss += (s - mean) * (s - mean);
  const double sd = std::sqrt(ss / 199.0);
  // The bootstrap distribution sits around zero at finite n only up to a
  // small centering term, so demand that both tails exist and the mean is
  // within one replicate-level spread of zero.
  CHECK(lo < 0.0);
  CHECK(hi > 0.0);
  CHECK(std::fabs(mean) < sd);
}

TEST_CASE("global flavor requires the wild scheme") {
  TestConfig config = base_config();
  config.scheme = BootstrapScheme::ResampleResiduals;
  CHECK_THROWS_AS(validate_config(config), UsageError);
  config.flavor = TestFlavor::Local;
  CHECK_NOTHROW(validate_config(config));
}

TEST_CASE("degenerate resamples exhaust the redraw budget") {
  // Constant Y with a fixed zero coefficient: every resampled residual
  // vector is (5,5,5), so Y* is all-tied on every attempt and the
  // replicate gives up after the redraw cap.
  Eigen::VectorXd y(3);
  y << 5.0, 5.0, 5.0;
  Eigen::MatrixXd x(3, 1);
  x << 1.0, 2.0, 3.0;
  Dataset data = validate_dataset(y, x);
  TestConfig config;
  config.hypothesis = Hypothesis::Convex;
  config.flavor = TestFlavor::Local;
  config.kernel = make_kernel(KernelFamily::Gaussian);
  config.scheme = BootstrapScheme::ResampleResiduals;
  config.n_bootstrap = 4;
  config.seed = 1;
  config.h_x = 1.0;
  config.h_y = 1.0;
  config.grid = std::vector<double>{4.0, 5.0, 6.0};
  Eigen::VectorXd beta0(1);
  beta0 << 0.0;
  config.beta_fixed = beta0;
  try {
    bootstrap_distribution(data, config);
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("replicate") != std::string::npos);
  }
}

TEST_CASE("decision rules compare the right tails") {
  GlobalStat stat;
  stat.s_n = -2.0;
  BootstrapResult boot;
  for (int i = -50; i < 50; ++i) boot.replicate_stats.push_back(0.1 * i);  // -5.0 .. 4.9

  // Concave: reject when s_n falls below the alpha quantile.
  DecisionOutcome concave = decide_global(stat, boot, Hypothesis::Concave, 0.05);
  CHECK(concave.reject_below);
  CHECK(concave.quantile_level == doctest::Approx(0.05));
  CHECK(concave.critical_value == doctest::Approx(-4.6));  // 5th of -5.0,-4.9,...
  CHECK(concave.decision == Decision::FailToReject);
  stat.s_n = -4.8;
  concave = decide_global(stat, boot, Hypothesis::Concave, 0.05);
  CHECK(concave.decision == Decision::Reject);

  // Convex: upper tail.
  stat.s_n = 4.85;
  DecisionOutcome convex = decide_global(stat, boot, Hypothesis::Convex, 0.05);
  CHECK_FALSE(convex.reject_below);
  CHECK(convex.quantile_level == doctest::Approx(0.95));
  CHECK(convex.decision == Decision::Reject);

  // Linear: |s_n| against the 1 - alpha/2 quantile of |replicates|.
  stat.s_n = -4.99;
  DecisionOutcome linear = decide_global(stat, boot, Hypothesis::Linear, 0.05);
  CHECK_FALSE(linear.reject_below);
  CHECK(linear.statistic == doctest::Approx(4.99));
  CHECK(linear.quantile_level == doctest::Approx(0.975));
  CHECK(linear.decision == Decision::Reject);
}

TEST_CASE("local decisions use the hypothesis-matched aggregate") {
  LocalStatCurve curve;
  curve.grid = {0.0, 1.0, 2.0};
  curve.values = {-1.5, 0.2, 2.5};
  curve.aggregate_inf = -1.5;
  curve.aggregate_sup = 2.5;
  curve.aggregate_sup_abs = 2.5;
  CHECK(local_aggregate(curve, Hypothesis::Concave) == doctest::Approx(-1.5));
  CHECK(local_aggregate(curve, Hypothesis::Convex) == doctest::Approx(2.5));
  CHECK(local_aggregate(curve, Hypothesis::Linear) == doctest::Approx(2.5));

  BootstrapResult boot;
  for (int i = 0; i < 100; ++i) boot.replicate_stats.push_back(0.01 * i);  // 0.00 .. 0.99
  DecisionOutcome convex = decide_local(curve, boot, Hypothesis::Convex, 0.05);
  CHECK(convex.statistic == doctest::Approx(2.5));
  CHECK(convex.decision == Decision::Reject);
  DecisionOutcome concave = decide_local(curve, boot, Hypothesis::Concave, 0.05);
  CHECK(concave.reject_below);
  CHECK(concave.decision == Decision::Reject);  // -1.5 < 0.05-quantile of replicates
}

TEST_CASE("resolve_context freezes grid and bandwidths from the original sample") {
  const Dataset data = small_sample(60, 9);
  TestConfig config = base_config();
  config.flavor = TestFlavor::Local;
  config.scheme = BootstrapScheme::ResampleResiduals;
  const ResolvedTestContext ctx = resolve_context(data, config);
  CHECK(ctx.grid.size() == 17);
  CHECK(std::is_sorted(ctx.grid.begin(), ctx.grid.end()));
  REQUIRE(ctx.h_y.has_value());
  CHECK(ctx.h_y->value > 0.0);
  CHECK(ctx.h_x.value > 0.0);
  CHECK(ctx.model.beta.size() == 1);

  // Manual settings pass through untouched.
  config.h_x = 0.33;
  config.h_y = 0.44;
  config.grid = std::vector<double>{-1.0, 0.0, 1.0};
  const ResolvedTestContext manual = resolve_context(data, config);
  CHECK(manual.h_x.value == doctest::Approx(0.33));
  CHECK(manual.h_x.rule == BandwidthRule::Manual);
  CHECK(manual.h_y->value == doctest::Approx(0.44));
  CHECK(manual.grid.size() == 3);
}

TEST_CASE("auto grid spans the central ninety percent") {
  Eigen::VectorXd y = Eigen::VectorXd::LinSpaced(100, 1.0, 100.0);
  const std::vector<double> grid = auto_grid(y);
  REQUIRE(grid.size() == 17);
  CHECK(grid.front() == doctest::Approx(5.0));
  CHECK(grid.back() == doctest::Approx(95.0));
  for (std::size_t t = 1; t < grid.size(); ++t) {
    CHECK(grid[t] - grid[t - 1] == doctest::Approx(90.0 / 16.0).epsilon(1e-9));
  }
}
