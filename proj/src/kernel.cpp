#include "curvtest/kernel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "curvtest/accum.hpp"

namespace curvtest {

namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267794;  // 1/sqrt(2*pi)

double std_normal_pdf(double u) { return kInvSqrt2Pi * std::exp(-0.5 * u * u); }

double std_normal_cdf(double u) { return 0.5 * std::erfc(-u * std::numbers::sqrt2 / 2.0); }

// --- per-family closed forms (untruncated) ---------------------------

double gaussian_eval(KernelOrder order, double u) {
  switch (order) {
    case KernelOrder::Value: return std_normal_pdf(u);
    case KernelOrder::D1: return -u * std_normal_pdf(u);
    case KernelOrder::D2: return (u * u - 1.0) * std_normal_pdf(u);
    case KernelOrder::Antiderivative: return std_normal_cdf(u);
  }
  return 0.0;
}

double epanechnikov_eval(KernelOrder order, double u) {
  const bool inside = std::abs(u) <= 1.0;
  switch (order) {
    case KernelOrder::Value: return inside ? 0.75 * (1.0 - u * u) : 0.0;
    case KernelOrder::D1: return inside ? -1.5 * u : 0.0;
    case KernelOrder::D2: return inside ? -1.5 : 0.0;
    case KernelOrder::Antiderivative:
      if (u < -1.0) return 0.0;
      if (u > 1.0) return 1.0;
      return 0.5 + 0.75 * u - 0.25 * u * u * u;
  }
  return 0.0;
}

double biweight_eval(KernelOrder order, double u) {
  const bool inside = std::abs(u) <= 1.0;
  const double w = 1.0 - u * u;
  switch (order) {
    case KernelOrder::Value: return inside ? (15.0 / 16.0) * w * w : 0.0;
    case KernelOrder::D1: return inside ? -(15.0 / 4.0) * u * w : 0.0;
    case KernelOrder::D2: return inside ? -(15.0 / 4.0) * (1.0 - 3.0 * u * u) : 0.0;
    case KernelOrder::Antiderivative:
      if (u < -1.0) return 0.0;
      if (u > 1.0) return 1.0;
      return 0.5 + (15.0 / 16.0) * (u - (2.0 / 3.0) * u * u * u + 0.2 * std::pow(u, 5));
  }
  return 0.0;
}

// --- Gauss-Legendre nodes ---------------------------------------------

struct GlRule {
  std::vector<double> nodes;    // on (-1, 1)
  std::vector<double> weights;
};

// Newton iteration on P_n with the Chebyshev-angle initial guess;
// accurate to ~1e-15 for the sizes used here.
GlRule gauss_legendre(int n) {
  GlRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

// Tensor-product integral of the condition integrand over [-1,1]^2
// split into `panels` x `panels` uniform panels.
double condition_level(const KernelSpec& spec, const GlRule& rule, int panels) {
  const int m = static_cast<int>(rule.nodes.size());
  const double width = 2.0 / panels;
  // Flatten all nodes along one axis (panel offsets + scaled GL nodes).
  std::vector<double> pts(panels * m), wts(panels * m);
  for (int p = 0; p < panels; ++p) {
    const double lo = -1.0 + p * width;
    const double mid = lo + 0.5 * width;
    for (int i = 0; i < m; ++i) {
      pts[p * m + i] = mid + 0.5 * width * rule.nodes[i];
      wts[p * m + i] = 0.5 * width * rule.weights[i];
    }
  }
  const int total = panels * m;
  std::vector<double> k1(total), kcal_cache;
  for (int i = 0; i < total; ++i) k1[i] = kernel_eval(spec, KernelOrder::Value, pts[i]);

  KahanAccumulator acc;
  for (int i = 0; i < total; ++i) {
    const double s1 = pts[i];
    const double f1 = k1[i] * s1 * wts[i];
    if (f1 == 0.0) continue;
    for (int j = 0; j < total; ++j) {
      const double s2 = pts[j];
      const double k2 = k1[j];
      if (k2 == 0.0) continue;
      const double bracket = kernel_eval(spec, KernelOrder::Antiderivative, 2.0 * s1 - s2) +
                             2.0 * kernel_eval(spec, KernelOrder::Antiderivative, 2.0 * s2 - s1);
      acc.add(f1 * k2 * wts[j] * bracket);
    }
  }
  return acc.value();
}

}  // namespace

KernelSpec make_kernel(KernelFamily family, std::optional<double> truncation_radius) {
  if (truncation_radius) {
    if (family != KernelFamily::Gaussian) {
      throw UsageError("truncation radius applies to the gaussian kernel only");
    }
    if (!std::isfinite(*truncation_radius) || *truncation_radius <= 0.0) {
      throw UsageError("truncation radius must be positive and finite");
    }
  }
  return KernelSpec{family, truncation_radius};
}

double kernel_eval(const KernelSpec& spec, KernelOrder order, double u) {
  if (!std::isfinite(u)) throw UsageError("kernel argument must be finite");
  switch (spec.family) {
    case KernelFamily::Gaussian: {
      if (spec.truncation_radius) {
        const double r = *spec.truncation_radius;
        if (order == KernelOrder::Antiderivative) {
          // Integral of the truncated (unnormalized) density.
          if (u <= -r) return 0.0;
          const double hi = std::min(u, r);
          return std_normal_cdf(hi) - std_normal_cdf(-r);
        }
        if (std::abs(u) > r) return 0.0;
      }
      return gaussian_eval(order, u);
    }
    case KernelFamily::Epanechnikov: return epanechnikov_eval(order, u);
    case KernelFamily::Biweight: return biweight_eval(order, u);
  }
  return 0.0;
}

double kernel_support_radius(const KernelSpec& spec) {
  if (spec.family == KernelFamily::Gaussian) {
    return spec.truncation_radius ? *spec.truncation_radius
                                  : std::numeric_limits<double>::infinity();
  }
  return 1.0;
}

std::string kernel_family_name(KernelFamily family) {
  switch (family) {
    case KernelFamily::Gaussian: return "gaussian";
    case KernelFamily::Epanechnikov: return "epanechnikov";
    case KernelFamily::Biweight: return "biweight";
  }
  return "?";
}

Bandwidth bandwidth_rot(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) throw DataError("rule-of-thumb bandwidth needs at least 2 values");
  const double sd = sample_sd(values);
  if (!(sd > 0.0)) {
    throw NumericalError("degenerate bandwidth: sample standard deviation is zero");
  }
  return Bandwidth{1.06 * sd * std::pow(static_cast<double>(n), -0.2),
                   BandwidthRule::RuleOfThumb};
}

Bandwidth manual_bandwidth(double value) {
  if (!std::isfinite(value) || value <= 0.0) {
    throw UsageError("bandwidth must be positive and finite");
  }
  return Bandwidth{value, BandwidthRule::Manual};
}

KernelConditionResult kernel_condition_integral(const KernelSpec& spec) {
  static const GlRule rule = gauss_legendre(64);
  constexpr int kMaxLevel = 5;
  double prev = condition_level(spec, rule, 1);
  for (int level = 1; level <= kMaxLevel; ++level) {
    const double cur = condition_level(spec, rule, 1 << level);
    if (std::abs(cur - prev) < 1e-6) {
      return KernelConditionResult{cur, cur > 0.0, level};
    }
    prev = cur;
  }
  throw NumericalError("kernel condition integral did not converge");
}

}  // namespace curvtest
