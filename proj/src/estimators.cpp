#include "curvtest/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "curvtest/rng.hpp"

namespace curvtest {

namespace {

// --- Fenwick tree over compressed ranks --------------------------------

class Fenwick {
 public:
  explicit Fenwick(int n) : tree_(n + 1, 0) {}
  void add(int pos) {  // 1-based
    for (; pos < static_cast<int>(tree_.size()); pos += pos & -pos) ++tree_[pos];
  }
  long long prefix(int pos) const {  // sum of positions 1..pos
    long long s = 0;
    for (; pos > 0; pos -= pos & -pos) s += tree_[pos];
    return s;
  }

 private:
  std::vector<long long> tree_;
};

int rank_of(const std::vector<double>& sorted_unique, double v) {
  return static_cast<int>(std::lower_bound(sorted_unique.begin(), sorted_unique.end(), v) -
                          sorted_unique.begin()) +
         1;
}

// Deterministic line scan for a piecewise-constant objective: golden
// sections shrink the bracket while the best value ever evaluated (and
// the first point attaining it) is what gets returned.
template <typename F>
std::pair<double, long long> golden_scan(F&& f, double cur, long long cur_val, double lo,
                                         double hi, int iters) {
  double best_x = cur;
  long long best_val = cur_val;
  auto consider = [&](double x) {
    const long long v = f(x);
    if (v > best_val) {
      best_val = v;
      best_x = x;
    }
    return v;
  };
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double c1 = b - kInvPhi * (b - a);
  double c2 = a + kInvPhi * (b - a);
  long long f1 = consider(c1);
  long long f2 = consider(c2);
  for (int it = 0; it < iters; ++it) {
    if (f1 >= f2) {
      b = c2;
      c2 = c1;
      f2 = f1;
      c1 = b - kInvPhi * (b - a);
      f1 = consider(c1);
    } else {
      a = c1;
      c1 = c2;
      f1 = f2;
      c2 = a + kInvPhi * (b - a);
      f2 = consider(c2);
    }
  }
  return {best_x, best_val};
}

}  // namespace

EstimatedModel ols_fit(const Eigen::VectorXd& y, const Eigen::MatrixXd& x,
                       bool intercept) {
  const Eigen::Index n = y.size();
  const Eigen::Index q = x.cols();
  if (x.rows() != n) throw DataError("ols_fit: y/x row mismatch");
  Eigen::MatrixXd design;
  if (intercept) {
    design.resize(n, q + 1);
    design.col(0).setOnes();
    design.rightCols(q) = x;
  } else {
    design = x;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  qr.setThreshold(1e-12);
  if (qr.rank() < design.cols()) {
    const Eigen::Index bad = qr.colsPermutation().indices()[qr.rank()];
    std::string which;
    if (intercept && bad == 0) {
      which = "intercept";
    } else {
      which = "column " + std::to_string(intercept ? bad : bad + 1);
    }
    throw NumericalError("singular design matrix (rank " + std::to_string(qr.rank()) +
                         " of " + std::to_string(design.cols()) + "), offending " + which);
  }
  const Eigen::VectorXd coef = qr.solve(y);
  EstimatedModel model;
  if (intercept) {
    model.intercept = coef[0];
    model.beta = coef.tail(q);
  } else {
    model.intercept = 0.0;
    model.beta = coef;
  }
  model.index = x * model.beta;
  model.residuals = y - Eigen::VectorXd::Constant(n, model.intercept) - model.index;
  return model;
}

EstimatedModel ols_fit(const Dataset& data, bool intercept) {
  return ols_fit(data.y, data.x, intercept);
}

long long mrc_objective(const Eigen::VectorXd& y, const Eigen::VectorXd& index) {
  const Eigen::Index n = y.size();
  std::vector<int> order(n);
  for (Eigen::Index i = 0; i < n; ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return y[a] < y[b]; });

  std::vector<double> vals(index.data(), index.data() + n);
  std::vector<double> uniq = vals;
  std::sort(uniq.begin(), uniq.end());
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());

  Fenwick tree(static_cast<int>(uniq.size()));
  long long q_count = 0;
  Eigen::Index i = 0;
  while (i < n) {
    // Group of tied Y values: query all members against strictly
    // smaller Y's before inserting any of them.
    Eigen::Index j = i;
    while (j < n && y[order[j]] == y[order[i]]) ++j;
    for (Eigen::Index k = i; k < j; ++k) {
      q_count += tree.prefix(rank_of(uniq, index[order[k]]) - 1);
    }
    for (Eigen::Index k = i; k < j; ++k) {
      tree.add(rank_of(uniq, index[order[k]]));
    }
    i = j;
  }
  return q_count;
}

EstimatedModel mrc_fit(const Eigen::VectorXd& y, const Eigen::MatrixXd& x,
                       const MrcOptions& opts) {
  const Eigen::Index n = y.size();
  const Eigen::Index q = x.cols();
  if (x.rows() != n) throw DataError("mrc_fit: y/x row mismatch");
  if (opts.multistarts < 1 || opts.refine_iters < 1) {
    throw UsageError("mrc options must be positive");
  }
  if ((y.array() == y[0]).all()) {
    throw DataError("degenerate rank-correlation objective: all Y values tied");
  }

  Eigen::VectorXd best_beta;
  long long best_q = -1;

  auto evaluate = [&](const Eigen::VectorXd& beta) {
    return mrc_objective(y, x * beta);
  };

  for (double sign : {1.0, -1.0}) {
    if (q == 1) {
      Eigen::VectorXd beta(1);
      beta[0] = sign;
      const long long val = evaluate(beta);
      if (val > best_q) {
        best_q = val;
        best_beta = beta;
      }
      continue;
    }

    // Starting points for the free coordinates beta_2..beta_q.
    std::vector<Eigen::VectorXd> starts;
    Eigen::VectorXd ols_dir = Eigen::VectorXd::Zero(q - 1);
    try {
      const EstimatedModel ols = ols_fit(y, x, false);
      if (std::abs(ols.beta[0]) > 1e-12 * ols.beta.norm()) {
        ols_dir = ols.beta.tail(q - 1) * (sign / ols.beta[0]);
      }
    } catch (const NumericalError&) {
      // singular design: fall back to the zero start
    }
    starts.push_back(ols_dir);
    starts.push_back(Eigen::VectorXd::Zero(q - 1));
    for (int s = static_cast<int>(starts.size()); s < opts.multistarts; ++s) {
      auto eng = make_engine(stream::kMrcStart, (sign > 0 ? 0 : 1) * 1000003ULL +
                                                    static_cast<std::uint64_t>(s));
      std::uniform_real_distribution<double> unif(-5.0, 5.0);
      Eigen::VectorXd r(q - 1);
      for (Eigen::Index c = 0; c < q - 1; ++c) r[c] = unif(eng);
      starts.push_back(r);
    }

    for (const auto& start : starts) {
      Eigen::VectorXd beta(q);
      beta[0] = sign;
      beta.tail(q - 1) = start;
      long long cur_val = evaluate(beta);
      double span = 2.5;
      for (int round = 0; round < opts.refine_iters; ++round) {
        for (Eigen::Index c = 1; c < q; ++c) {
          auto line = [&](double v) {
            Eigen::VectorXd b = beta;
            b[c] = v;
            return mrc_objective(y, x * b);
          };
          const auto [bx, bv] =
              golden_scan(line, beta[c], cur_val, beta[c] - span, beta[c] + span, 28);
          beta[c] = bx;
          cur_val = bv;
        }
        span *= 0.5;
      }
      if (cur_val > best_q) {
        best_q = cur_val;
        best_beta = beta;
      }
    }
  }

  EstimatedModel model;
  model.beta = best_beta;
  model.intercept = 0.0;
  model.index = x * model.beta;
  model.residuals = y - model.index;
  return model;
}

EstimatedModel mrc_fit(const Dataset& data, const MrcOptions& opts) {
  return mrc_fit(data.y, data.x, opts);
}

EstimatedModel fit_model(const Eigen::VectorXd& y, const Eigen::MatrixXd& x,
                         const EstimatorSpec& spec) {
  if (spec.kind == EstimatorKind::OLS) return ols_fit(y, x, spec.intercept);
  return mrc_fit(y, x, spec.mrc);
}

EstimatedModel fit_model(const Dataset& data, const EstimatorSpec& spec) {
  return fit_model(data.y, data.x, spec);
}

}  // namespace curvtest
