#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <span>
#include <tuple>
#include <vector>

#include "curvtest/mc.hpp"
#include "curvtest/ustat.hpp"
#include "../tests/naive/naive_ustat.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

// =====================================================================
// Timing harness: production evaluators (serial and OpenMP, exact and
// compact-support pruned) against the naive reference loops.  Numbers
// are the best of three runs; the last column is the max abs gap to
// the naive value at the same inputs.
// =====================================================================

namespace {

using namespace curvtest;

double time_ms(const std::function<void()>& body) {
  double best = 1e300;
  for (int rep = 0; rep < 3; ++rep) {
    const auto t0 = std::chrono::steady_clock::now();
    body();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

void set_threads(int n) {
#ifdef _OPENMP
  omp_set_num_threads(n);
#else
  (void)n;
#endif
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void print_row(const char* label, int n, double ms, double baseline_ms, double max_gap) {
  std::printf("%-26s %6d %12.2f %9.2fx %12.3g\n", label, n, ms,
              baseline_ms / std::max(ms, 1e-9), max_gap);
}

}  // namespace

int main() {
  const int hw = max_threads();
  std::printf("threads available: %d\n\n", hw);
  std::printf("%-26s %6s %12s %10s %12s\n", "evaluator", "n", "ms", "speedup", "max|diff|");

  const KernelSpec gauss = make_kernel(KernelFamily::Gaussian);
  const KernelSpec epan = make_kernel(KernelFamily::Epanechnikov);

  using Case = std::tuple<const char*, int, KernelSpec, EvalMode>;

  for (const int n : {60, 120, 240}) {
    McDesign design;
    design.id = McDesignId::D1;
    design.n = n;
    const Dataset data = generate_design(design, /*seed=*/7);
    Eigen::VectorXd beta = Eigen::VectorXd::Ones(1);
    const Eigen::VectorXd index = data.x * beta;
    const Bandwidth h = index_diff_bandwidth(index);
    const Bandwidth hy =
        bandwidth_rot(std::span<const double>(data.y.data(), static_cast<std::size_t>(n)));
    std::vector<double> grid(9);
    for (int t = 0; t < 9; ++t) grid[t] = -2.0 + 0.5 * t;

    // --- global statistic -------------------------------------------
    double naive_gauss = 0.0;
    const double naive_ms =
        time_ms([&] { naive_gauss = naive::global_u(data.y, data.x, beta, gauss, h.value); });
    print_row("naive global", n, naive_ms, naive_ms, 0.0);

    for (const auto& [label, threads, spec, mode] :
         {Case{"global serial", 1, gauss, EvalMode::Exact},
          Case{"global omp", hw, gauss, EvalMode::Exact},
          Case{"global omp epan pruned", hw, epan, EvalMode::CompactSupportPrune}}) {
      set_threads(threads);
      GlobalStat stat;
      const double ms = time_ms([&] { stat = global_u_stat(data, beta, spec, h, mode); });
      const double ref = spec.family == KernelFamily::Gaussian
                             ? naive_gauss
                             : naive::global_u(data.y, data.x, beta, spec, h.value);
      print_row(label, n, ms, naive_ms, std::fabs(stat.u_n - ref));
    }

    // --- local curve over a 9-point grid ----------------------------
    std::vector<double> naive_curve(grid.size());
    const double naive_local_ms = time_ms([&] {
      for (std::size_t t = 0; t < grid.size(); ++t) {
        naive_curve[t] =
            naive::local_u(data.y, data.x, beta, gauss, h.value, hy.value, grid[t]);
      }
    });
    print_row("naive local (9 pts)", n, naive_local_ms, naive_local_ms, 0.0);

    for (const auto& [label, threads, spec, mode] :
         {Case{"local serial", 1, gauss, EvalMode::Exact},
          Case{"local omp", hw, gauss, EvalMode::Exact},
          Case{"local omp epan pruned", hw, epan, EvalMode::CompactSupportPrune}}) {
      set_threads(threads);
      LocalStatCurve curve;
      const double ms =
          time_ms([&] { curve = local_statistics(data, beta, spec, h, hy, grid, mode); });
      const double scale = std::sqrt(static_cast<double>(n) * hy.value);
      double gap = 0.0;
      for (std::size_t t = 0; t < grid.size(); ++t) {
        const double ref =
            spec.family == KernelFamily::Gaussian
                ? naive_curve[t]
                : naive::local_u(data.y, data.x, beta, spec, h.value, hy.value, grid[t]);
        gap = std::max(gap, std::fabs(curve.values[t] / scale - ref));
      }
      print_row(label, n, ms, naive_local_ms, gap);
    }
    std::printf("\n");
  }
  set_threads(hw);
  return 0;
}
