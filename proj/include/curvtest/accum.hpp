#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace curvtest {

// =====================================================================
// Guarded compensated accumulation (Neumaier variant of Kahan).
//
// Exact zeros are skipped *before* touching the accumulator state.
// That guard is what makes the compact-support pruned evaluation path
// bitwise identical to the exact path: pruning only ever removes terms
// that are exactly zero, and a skipped zero leaves (sum, comp)
// untouched just like a never-visited one.
// =====================================================================

struct KahanAccumulator {
  double sum = 0.0;
  double comp = 0.0;

  void add(double term) {
    if (term == 0.0) return;  // the pruning guard; see header comment
    const double t = sum + term;
    if (std::abs(sum) >= std::abs(term)) {
      comp += (sum - t) + term;
    } else {
      comp += (term - t) + sum;
    }
    sum = t;
  }

  double value() const { return sum + comp; }
};

// Combines per-block partial values in ascending block order, again with
// compensation, so the grand total is independent of which thread
// produced which block.
inline double combine_blocks(const std::vector<double>& block_values) {
  KahanAccumulator acc;
  for (double v : block_values) acc.add(v);
  return acc.value();
}

// Sample standard deviation with the (n-1) denominator.
inline double sample_sd(std::span<const double> values) {
  const std::size_t n = values.size();
  KahanAccumulator mean_acc;
  for (double v : values) mean_acc.add(v);
  const double mean = mean_acc.value() / static_cast<double>(n);
  KahanAccumulator ss;
  for (double v : values) {
    const double d = v - mean;
    ss.add(d * d);
  }
  return std::sqrt(ss.value() / static_cast<double>(n - 1));
}

}  // namespace curvtest
