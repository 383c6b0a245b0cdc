#include "curvtest/ustat.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "curvtest/accum.hpp"
#include "curvtest/errors.hpp"
#include "curvtest/rng.hpp"

namespace curvtest {

namespace {

// ======================================================================
// Shared evaluation core.  All statistics sort by Y first: the ordering
// indicator kills every non-sorted arrangement, so sorted tuples are
// enumerated once and the textbook normalization n(n-1)...(n-k+1)
// is kept.  Work is split into blocks by the outer sorted index; each
// block accumulates with compensation and blocks combine in ascending
// order, making serial/parallel/pruned/exact runs bitwise identical.
// ======================================================================

struct SortedSample {
  std::vector<double> ys;  // ascending
  std::vector<double> as;  // fitted index aligned with ys
};

SortedSample sort_by_y(const Eigen::VectorXd& y, const Eigen::VectorXd& index) {
  const Eigen::Index n = y.size();
  std::vector<int> ord(n);
  std::iota(ord.begin(), ord.end(), 0);
  std::sort(ord.begin(), ord.end(), [&](int a, int b) {
    if (y[a] != y[b]) return y[a] < y[b];
    return a < b;
  });
  SortedSample s;
  s.ys.resize(n);
  s.as.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    s.ys[i] = y[ord[i]];
    s.as[i] = index[ord[i]];
  }
  return s;
}

inline double sign3(double d) { return d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0); }

void check_inputs(const Eigen::VectorXd& y, const Eigen::VectorXd& index,
                  const Bandwidth& h, Eigen::Index min_n) {
  if (y.size() != index.size()) throw DataError("y and index length mismatch");
  if (y.size() < min_n) {
    throw DataError("statistic needs at least " + std::to_string(min_n) +
                    " observations, got " + std::to_string(y.size()));
  }
  if (!std::isfinite(h.value) || h.value <= 0.0) {
    throw UsageError("bandwidth must be positive and finite");
  }
}

struct GlobalSums {
  double total = 0.0;
  std::int64_t contributing = 0;
};

GlobalSums global_core(const SortedSample& s, const KernelSpec& spec, double h,
                       EvalMode mode) {
  const int n = static_cast<int>(s.ys.size());
  const double support = kernel_support_radius(spec);
  const bool prune_x = mode == EvalMode::CompactSupportPrune && std::isfinite(support);
  const double max_arg = support * h;
  const double* ys = s.ys.data();
  const double* as = s.as.data();

  std::vector<double> block(n, 0.0);
  std::vector<std::int64_t> counts(n, 0);
#pragma omp parallel for schedule(dynamic)
  for (int p = 0; p < n - 2; ++p) {
    KahanAccumulator acc;
    std::int64_t cnt = 0;
    const double yp = ys[p], ap = as[p];
    for (int q = p + 1; q < n - 1; ++q) {
      if (ys[q] == yp) continue;
      const double yq = ys[q], aq = as[q];
      for (int r = q + 1; r < n; ++r) {
        if (ys[r] == yq) continue;
        const double sgn = sign3(ys[r] - 2.0 * yq + yp);
        if (sgn == 0.0) continue;
        const double arg = as[r] - 2.0 * aq + ap;
        if (prune_x && std::abs(arg) > max_arg) continue;
        const double term = sgn * (kernel_eval(spec, KernelOrder::Value, arg / h) / h);
        if (term != 0.0) {
          acc.add(term);
          ++cnt;
        }
      }
    }
    block[p] = acc.value();
    counts[p] = cnt;
  }
  GlobalSums out;
  out.total = combine_blocks(block);
  for (std::int64_t c : counts) out.contributing += c;
  return out;
}

// Y-direction weights at one grid point; shared by every local path so
// single-point and whole-curve evaluations use identical doubles.
std::vector<double> y_weights(const std::vector<double>& ys, double y0,
                              const KernelSpec& spec, double hy) {
  std::vector<double> w(ys.size());
  for (std::size_t i = 0; i < ys.size(); ++i) {
    w[i] = kernel_eval(spec, KernelOrder::Value, (ys[i] - y0) / hy) / hy;
  }
  return w;
}

// Raw U_n(y_t) for every grid point.  Fused pass: kernel argument terms
// are computed once per triple; the per-(block, point) accumulators see
// the same nonzero-term sequence a per-point evaluation would, so both
// representations agree bitwise.
std::vector<double> local_core(const SortedSample& s, const KernelSpec& spec,
                               double hx, double hy,
                               const std::vector<double>& grid, EvalMode mode) {
  const int n = static_cast<int>(s.ys.size());
  const int g = static_cast<int>(grid.size());
  const double support = kernel_support_radius(spec);
  const bool prune = mode == EvalMode::CompactSupportPrune && std::isfinite(support);
  const double max_arg = support * hx;
  const double* ys = s.ys.data();
  const double* as = s.as.data();

  // Weight table, observation-major: wtab[i*g + t].
  std::vector<double> wtab(static_cast<std::size_t>(n) * g);
  for (int t = 0; t < g; ++t) {
    const std::vector<double> w = y_weights(s.ys, grid[t], spec, hy);
    for (int i = 0; i < n; ++i) wtab[static_cast<std::size_t>(i) * g + t] = w[i];
  }

  // Per grid point, the index range whose Y-weights can be nonzero.
  std::vector<int> lo(g, 0), hi(g, n);
  if (prune) {
    for (int t = 0; t < g; ++t) {
      const double radius = support * hy;
      lo[t] = static_cast<int>(std::lower_bound(s.ys.begin(), s.ys.end(),
                                                grid[t] - radius) -
                               s.ys.begin());
      hi[t] = static_cast<int>(std::upper_bound(s.ys.begin(), s.ys.end(),
                                                grid[t] + radius) -
                               s.ys.begin());
    }
  }

  std::vector<double> bm(static_cast<std::size_t>(n) * g, 0.0);  // block-major: bm[p*g + t]
  if (!prune) {
#pragma omp parallel for schedule(dynamic)
    for (int p = 0; p < n - 2; ++p) {
      std::vector<KahanAccumulator> accs(g);
      const double yp = ys[p], ap = as[p];
      const double* wp = &wtab[static_cast<std::size_t>(p) * g];
      for (int q = p + 1; q < n - 1; ++q) {
        if (ys[q] == yp) continue;
        const double yq = ys[q], aq = as[q];
        const double* wq = &wtab[static_cast<std::size_t>(q) * g];
        for (int r = q + 1; r < n; ++r) {
          if (ys[r] == yq) continue;
          const double sgn = sign3(ys[r] - 2.0 * yq + yp);
          if (sgn == 0.0) continue;
          const double arg = as[r] - 2.0 * aq + ap;
          const double base = sgn * (kernel_eval(spec, KernelOrder::Value, arg / hx) / hx);
          if (base == 0.0) continue;
          const double* wr = &wtab[static_cast<std::size_t>(r) * g];
          for (int t = 0; t < g; ++t) {
            accs[t].add(((wp[t] * wq[t]) * wr[t]) * base);
          }
        }
      }
      double* row = &bm[static_cast<std::size_t>(p) * g];
      for (int t = 0; t < g; ++t) row[t] = accs[t].value();
    }
  } else {
    // Compact Y-support: visit only in-window triples per grid point.
    // Out-of-window terms are exact zeros, so the accumulated sequences
    // match the fused pass term for term.
#pragma omp parallel for schedule(dynamic)
    for (int p = 0; p < n - 2; ++p) {
      const double yp = ys[p], ap = as[p];
      const double* wp = &wtab[static_cast<std::size_t>(p) * g];
      double* row = &bm[static_cast<std::size_t>(p) * g];
      for (int t = 0; t < g; ++t) {
        if (p < lo[t] || p >= hi[t]) continue;
        KahanAccumulator acc;
        const double wpt = wp[t];
        if (wpt == 0.0) continue;
        const int qhi = std::min(hi[t], n - 1);
        for (int q = p + 1; q < qhi; ++q) {
          if (ys[q] == yp) continue;
          const double wqt = wtab[static_cast<std::size_t>(q) * g + t];
          if (wqt == 0.0) continue;
          const double yq = ys[q], aq = as[q];
          for (int r = q + 1; r < hi[t]; ++r) {
            if (ys[r] == yq) continue;
            const double wrt = wtab[static_cast<std::size_t>(r) * g + t];
            if (wrt == 0.0) continue;
            const double sgn = sign3(ys[r] - 2.0 * yq + yp);
            if (sgn == 0.0) continue;
            const double arg = as[r] - 2.0 * aq + ap;
            if (std::abs(arg) > max_arg) continue;
            const double base =
                sgn * (kernel_eval(spec, KernelOrder::Value, arg / hx) / hx);
            if (base == 0.0) continue;
            acc.add(((wpt * wqt) * wrt) * base);
          }
        }
        row[t] = acc.value();
      }
    }
  }

  // Combine per-point columns in ascending block order.
  const double denom = static_cast<double>(n) * (n - 1.0) * (n - 2.0);
  std::vector<double> raw(g, 0.0);
  std::vector<double> col(n);
  for (int t = 0; t < g; ++t) {
    for (int p = 0; p < n; ++p) col[p] = bm[static_cast<std::size_t>(p) * g + t];
    raw[t] = combine_blocks(col) / denom;
  }
  return raw;
}

void check_grid(const std::vector<double>& grid) {
  if (grid.empty()) throw UsageError("grid must be nonempty");
  for (std::size_t t = 0; t < grid.size(); ++t) {
    if (!std::isfinite(grid[t])) throw UsageError("grid points must be finite");
    if (t > 0 && grid[t] < grid[t - 1]) throw UsageError("grid must be sorted ascending");
  }
}

}  // namespace

GlobalStat global_u_stat(const Eigen::VectorXd& y, const Eigen::VectorXd& index,
                         const KernelSpec& spec, const Bandwidth& h_x, EvalMode mode) {
  check_inputs(y, index, h_x, 3);
  const SortedSample s = sort_by_y(y, index);
  const GlobalSums sums = global_core(s, spec, h_x.value, mode);
  const double n = static_cast<double>(y.size());
  GlobalStat stat;
  stat.u_n = sums.total / (n * (n - 1.0) * (n - 2.0));
  stat.s_n = std::sqrt(n) * stat.u_n;
  stat.n_triples_contributing = sums.contributing;
  stat.h_x = h_x;
  return stat;
}

GlobalStat global_u_stat(const Dataset& data, const Eigen::VectorXd& beta,
                         const KernelSpec& spec, const Bandwidth& h_x, EvalMode mode) {
  if (beta.size() != data.q()) throw UsageError("beta length does not match regressor count");
  return global_u_stat(data.y, data.x * beta, spec, h_x, mode);
}

GlobalStat global_statistic(const Dataset& data, const Eigen::VectorXd& beta,
                            const KernelSpec& spec, const Bandwidth& h_x, EvalMode mode) {
  return global_u_stat(data, beta, spec, h_x, mode);
}

double local_u_stat(const Eigen::VectorXd& y, const Eigen::VectorXd& index,
                    const KernelSpec& spec, const Bandwidth& h_x, const Bandwidth& h_y,
                    double y_point, EvalMode mode) {
  check_inputs(y, index, h_x, 3);
  check_inputs(y, index, h_y, 3);
  if (!std::isfinite(y_point)) throw UsageError("evaluation point must be finite");
  const SortedSample s = sort_by_y(y, index);
  return local_core(s, spec, h_x.value, h_y.value, {y_point}, mode)[0];
}

double local_u_stat(const Dataset& data, const Eigen::VectorXd& beta,
                    const KernelSpec& spec, const Bandwidth& h_x, const Bandwidth& h_y,
                    double y_point, EvalMode mode) {
  if (beta.size() != data.q()) throw UsageError("beta length does not match regressor count");
  return local_u_stat(data.y, data.x * beta, spec, h_x, h_y, y_point, mode);
}

LocalStatCurve local_statistics(const Eigen::VectorXd& y, const Eigen::VectorXd& index,
                                const KernelSpec& spec, const Bandwidth& h_x,
                                const Bandwidth& h_y, const std::vector<double>& grid,
                                EvalMode mode) {
  check_inputs(y, index, h_x, 3);
  check_inputs(y, index, h_y, 3);
  check_grid(grid);
  const SortedSample s = sort_by_y(y, index);
  const std::vector<double> raw = local_core(s, spec, h_x.value, h_y.value, grid, mode);
  LocalStatCurve curve;
  curve.grid = grid;
  curve.values.resize(grid.size());
  const double scale = std::sqrt(static_cast<double>(y.size()) * h_y.value);
  for (std::size_t t = 0; t < grid.size(); ++t) curve.values[t] = scale * raw[t];
  curve.aggregate_inf = *std::min_element(curve.values.begin(), curve.values.end());
  curve.aggregate_sup = *std::max_element(curve.values.begin(), curve.values.end());
  curve.aggregate_sup_abs = std::max(std::abs(curve.aggregate_inf), std::abs(curve.aggregate_sup));
  curve.h_x = h_x;
  curve.h_y = h_y;
  return curve;
}

LocalStatCurve local_statistics(const Dataset& data, const Eigen::VectorXd& beta,
                                const KernelSpec& spec, const Bandwidth& h_x,
                                const Bandwidth& h_y, const std::vector<double>& grid,
                                EvalMode mode) {
  if (beta.size() != data.q()) throw UsageError("beta length does not match regressor count");
  return local_statistics(data.y, data.x * beta, spec, h_x, h_y, grid, mode);
}

double global_u_stat_quad(const Eigen::VectorXd& y, const Eigen::VectorXd& index,
                          const KernelSpec& spec, const Bandwidth& h_x, EvalMode mode,
                          int n_cap) {
  check_inputs(y, index, h_x, 4);
  const int n = static_cast<int>(y.size());
  if (n > n_cap) {
    throw UsageError("4th-order statistic is O(n^4); n=" + std::to_string(n) +
                     " exceeds the cap of " + std::to_string(n_cap) +
                     " (raise the cap to override)");
  }
  const SortedSample s = sort_by_y(y, index);
  const double support = kernel_support_radius(spec);
  const bool prune_x = mode == EvalMode::CompactSupportPrune && std::isfinite(support);
  const double h = h_x.value;
  const double max_arg = support * h;
  const double* ys = s.ys.data();
  const double* as = s.as.data();

  std::vector<double> block(n, 0.0);
#pragma omp parallel for schedule(dynamic)
  for (int p = 0; p < n - 3; ++p) {
    KahanAccumulator acc;
    const double yp = ys[p], ap = as[p];
    for (int q = p + 1; q < n - 2; ++q) {
      if (ys[q] == yp) continue;
      const double yq = ys[q], aq = as[q];
      for (int r = q + 1; r < n - 1; ++r) {
        if (ys[r] == yq) continue;
        const double yr = ys[r], ar = as[r];
        for (int m = r + 1; m < n; ++m) {
          if (ys[m] == yr) continue;
          const double sgn = sign3(ys[m] - yr - yq + yp);
          if (sgn == 0.0) continue;
          const double arg = as[m] - ar - aq + ap;
          if (prune_x && std::abs(arg) > max_arg) continue;
          const double term = sgn * (kernel_eval(spec, KernelOrder::Value, arg / h) / h);
          if (term != 0.0) acc.add(term);
        }
      }
    }
    block[p] = acc.value();
  }
  const double nd = static_cast<double>(n);
  const double denom = nd * (nd - 1.0) * (nd - 2.0) * (nd - 3.0);
  return std::sqrt(nd) * combine_blocks(block) / denom;
}

double global_u_stat_quad(const Dataset& data, const Eigen::VectorXd& beta,
                          const KernelSpec& spec, const Bandwidth& h_x, EvalMode mode,
                          int n_cap) {
  if (beta.size() != data.q()) throw UsageError("beta length does not match regressor count");
  return global_u_stat_quad(data.y, data.x * beta, spec, h_x, mode, n_cap);
}

Bandwidth index_diff_bandwidth(const Eigen::VectorXd& index) {
  const Eigen::Index n = index.size();
  if (n < 3) throw DataError("index bandwidth needs at least 3 observations");
  constexpr std::int64_t kMaxTriples = 50000;
  std::vector<double> diffs;
  const std::int64_t total =
      static_cast<std::int64_t>(n) * (n - 1) * (n - 2);
  if (total <= kMaxTriples) {
    diffs.reserve(total);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        for (Eigen::Index k = 0; k < n; ++k) {
          if (k == i || k == j) continue;
          diffs.push_back(index[i] - 2.0 * index[j] + index[k]);
        }
      }
    }
  } else {
    // Fixed-seed subsample: deterministic for a given sample size and
    // independent of the user seed.
    auto eng = make_engine(stream::kBandwidthTriples, static_cast<std::uint64_t>(n));
    std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
    diffs.reserve(kMaxTriples);
    while (static_cast<std::int64_t>(diffs.size()) < kMaxTriples) {
      const Eigen::Index i = pick(eng), j = pick(eng), k = pick(eng);
      if (i == j || j == k || i == k) continue;
      diffs.push_back(index[i] - 2.0 * index[j] + index[k]);
    }
  }
  const double sd = sample_sd(diffs);
  if (!(sd > 0.0)) {
    throw NumericalError("degenerate index bandwidth: fitted index has zero spread");
  }
  // n^{-1/5} uses the sample size, not the subsample size.
  return Bandwidth{1.06 * sd * std::pow(static_cast<double>(n), -0.2),
                   BandwidthRule::RuleOfThumb};
}

}  // namespace curvtest
