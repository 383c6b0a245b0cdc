#include "curvtest/mc.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <string>

#include "curvtest/pipeline.hpp"
#include "curvtest/rng.hpp"

namespace curvtest {

namespace {

constexpr double kEulerMascheroni = 0.57721566490153286061;
constexpr double kD4Cutoff = 5.0 - 1e-9;  // |Z| at/above this redraws the pair

}  // namespace

double design_t(McDesignId id, double y) {
  switch (id) {
    case McDesignId::D0: return y;
    case McDesignId::D1: return std::log1p(y / 2.12);
    case McDesignId::D2: return std::sinh(2.0 * y) / 13.0;
    case McDesignId::D3: return -std::log1p(-y / 2.12);
    case McDesignId::D4: return 5.0 * std::tanh(y / 2.0);
  }
  return 0.0;
}

double design_t_inv(McDesignId id, double z) {
  switch (id) {
    case McDesignId::D0: return z;
    case McDesignId::D1: return 2.12 * std::expm1(z);
    case McDesignId::D2: return std::asinh(13.0 * z) / 2.0;
    case McDesignId::D3: return -2.12 * std::expm1(-z);
    case McDesignId::D4: return 2.0 * std::atanh(z / 5.0);
  }
  return 0.0;
}

std::string design_name(McDesignId id) {
  switch (id) {
    case McDesignId::D0: return "D0";
    case McDesignId::D1: return "D1";
    case McDesignId::D2: return "D2";
    case McDesignId::D3: return "D3";
    case McDesignId::D4: return "D4";
  }
  return "?";
}

std::string error_dist_name(ErrorDist dist) {
  return dist == ErrorDist::StdNormal ? "normal" : "gumbel";
}

GeneratedSample generate_design_stats(const McDesign& design, std::uint64_t seed) {
  if (design.n < 3) throw UsageError("design sample size must be at least 3");
  auto engine = make_engine(seed, 0);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  auto draw_error = [&]() {
    if (design.error_dist == ErrorDist::StdNormal) return normal(engine);
    double u = unif(engine);
    while (u <= 0.0) u = unif(engine);  // open-interval guard
    return -std::log(-std::log(u)) - kEulerMascheroni;
  };

  Eigen::VectorXd y(design.n);
  Eigen::MatrixXd x(design.n, 1);
  std::int64_t redraws = 0;
  for (int i = 0; i < design.n; ++i) {
    double xi = 0.0, z = 0.0;
    for (;;) {
      xi = normal(engine);
      z = xi + draw_error();
      if (design.id == McDesignId::D4 && std::abs(z) >= kD4Cutoff) {
        ++redraws;  // atanh domain guard: redraw the whole (X, eps) pair
        continue;
      }
      break;
    }
    x(i, 0) = xi;
    y[i] = design_t_inv(design.id, z);
  }
  return GeneratedSample{validate_dataset(std::move(y), std::move(x), {"x"}), redraws};
}

Dataset generate_design(const McDesign& design, std::uint64_t seed) {
  return generate_design_stats(design, seed).data;
}

RejectionRow run_mc(const McDesign& design, int reps, const TestConfig& config) {
  if (reps < 1) throw UsageError("reps must be at least 1");
  validate_config(config);
  const auto t0 = std::chrono::steady_clock::now();

  int rejections = 0;
  int first_error_rep = -1;
  std::string first_error;
  int first_error_kind = 0;  // 1 data, 2 numerical, 3 usage

#pragma omp parallel for schedule(dynamic) reduction(+ : rejections)
  for (int r = 0; r < reps; ++r) {
    try {
      const Dataset data =
          generate_design(design, mix_seed(config.seed, stream::kMcData + static_cast<std::uint64_t>(r)));
      TestConfig rep_config = config;
      rep_config.seed = mix_seed(config.seed, stream::kMcTest + static_cast<std::uint64_t>(r));
      if (run_test(data, rep_config).decision == Decision::Reject) ++rejections;
    } catch (const CurvtestError& err) {
#pragma omp critical
      {
        if (first_error_rep < 0 || r < first_error_rep) {
          first_error_rep = r;
          first_error = err.what();
          if (dynamic_cast<const DataError*>(&err)) first_error_kind = 1;
          else if (dynamic_cast<const NumericalError*>(&err)) first_error_kind = 2;
          else first_error_kind = 3;
        }
      }
    }
  }
  if (first_error_rep >= 0) {
    const std::string msg =
        "replication " + std::to_string(first_error_rep + 1) + ": " + first_error;
    if (first_error_kind == 1) throw DataError(msg);
    if (first_error_kind == 2) throw NumericalError(msg);
    throw UsageError(msg);
  }

  RejectionRow row;
  row.design = design;
  row.flavor = config.flavor;
  row.hypothesis = config.hypothesis;
  row.scheme = config.scheme;
  row.reps = reps;
  row.n_bootstrap = config.n_bootstrap;
  row.level = config.level;
  row.seed = config.seed;
  row.rejections = rejections;
  row.frequency = static_cast<double>(rejections) / reps;
  row.std_error = std::sqrt(row.frequency * (1.0 - row.frequency) / reps);
  row.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
  return row;
}

}  // namespace curvtest
