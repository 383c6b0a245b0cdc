#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "curvtest/dataset.hpp"
#include "curvtest/kernel.hpp"

namespace curvtest {

// =====================================================================
// Curvature statistics.
//
// Global third-order U-statistic
//   U_n = [n(n-1)(n-2)]^{-1} sum over ordered distinct triples of
//         1{Y_i<Y_j<Y_k} sgn(Y_k - 2Y_j + Y_i) K_h((X_kj - X_ji)' beta),
// with sgn(0)=0 and K_h(v) = K(v/h)/h; the local version additionally
// weights all three Y's by K_{h_y}(Y - y).  Evaluation sorts by Y first
// (only sorted triples survive the indicator) and parallelizes over the
// outer index with fixed-order compensated block reduction, so serial,
// parallel, pruned, and exact runs return bitwise-identical values.
// =====================================================================

enum class EvalMode { Exact, CompactSupportPrune };

struct GlobalStat {
  double u_n = 0.0;
  double s_n = 0.0;  // sqrt(n) * u_n
  std::int64_t n_triples_contributing = 0;
  Bandwidth h_x{};
};

struct LocalStatCurve {
  std::vector<double> grid;
  std::vector<double> values;  // sqrt(n * h_y) * U_n(grid[t])
  double aggregate_inf = 0.0;
  double aggregate_sup = 0.0;
  double aggregate_sup_abs = 0.0;
  Bandwidth h_x{};
  Bandwidth h_y{};
};

// --- global -----------------------------------------------------------

GlobalStat global_u_stat(const Eigen::VectorXd& y, const Eigen::VectorXd& index,
                         const KernelSpec& spec, const Bandwidth& h_x,
                         EvalMode mode);
GlobalStat global_u_stat(const Dataset& data, const Eigen::VectorXd& beta,
                         const KernelSpec& spec, const Bandwidth& h_x,
                         EvalMode mode);

// Same computation; named for the sqrt(n)-scaled s_n it reports.
GlobalStat global_statistic(const Dataset& data, const Eigen::VectorXd& beta,
                            const KernelSpec& spec, const Bandwidth& h_x,
                            EvalMode mode);

// --- local ------------------------------------------------------------

// Raw U_n(y) at one point (no sqrt(n h_y) scaling).
double local_u_stat(const Eigen::VectorXd& y, const Eigen::VectorXd& index,
                    const KernelSpec& spec, const Bandwidth& h_x,
                    const Bandwidth& h_y, double y_point, EvalMode mode);
double local_u_stat(const Dataset& data, const Eigen::VectorXd& beta,
                    const KernelSpec& spec, const Bandwidth& h_x,
                    const Bandwidth& h_y, double y_point, EvalMode mode);

// Whole curve over a sorted grid; values[t] reproduces
// sqrt(n h_y) * local_u_stat(grid[t]) bitwise (shared core evaluator).
LocalStatCurve local_statistics(const Eigen::VectorXd& y,
                                const Eigen::VectorXd& index,
                                const KernelSpec& spec, const Bandwidth& h_x,
                                const Bandwidth& h_y,
                                const std::vector<double>& grid, EvalMode mode);
LocalStatCurve local_statistics(const Dataset& data, const Eigen::VectorXd& beta,
                                const KernelSpec& spec, const Bandwidth& h_x,
                                const Bandwidth& h_y,
                                const std::vector<double>& grid, EvalMode mode);

// --- 4th-order variant --------------------------------------------------

// S~_n = sqrt(n) [n(n-1)(n-2)(n-3)]^{-1} sum over sorted quadruples of
// sgn(Y_m - Y_k - Y_j + Y_i) K_h((X_mk - X_ji)' beta).  O(n^4); refuses
// n above the cap unless the caller raises it.
double global_u_stat_quad(const Eigen::VectorXd& y, const Eigen::VectorXd& index,
                          const KernelSpec& spec, const Bandwidth& h_x,
                          EvalMode mode = EvalMode::Exact, int n_cap = 500);
double global_u_stat_quad(const Dataset& data, const Eigen::VectorXd& beta,
                          const KernelSpec& spec, const Bandwidth& h_x,
                          EvalMode mode = EvalMode::Exact, int n_cap = 500);

// --- bandwidth helper ---------------------------------------------------

// Rule-of-thumb bandwidth for the kernel argument: sd of the second
// differences a_i - 2 a_j + a_k of the fitted index over at most 50,000
// distinct triples (all of them when that is fewer; otherwise a
// fixed-seed subsample), scaled by 1.06 * n^{-1/5} with n the sample
// size.  Deterministic for a given index vector.
Bandwidth index_diff_bandwidth(const Eigen::VectorXd& index);

}  // namespace curvtest
