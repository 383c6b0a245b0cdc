#pragma once

#include <optional>
#include <span>
#include <string>

#include "curvtest/errors.hpp"

namespace curvtest {

// =====================================================================
// Kernel families, closed-form evaluation, rule-of-thumb bandwidths,
// and the numerical check of the kernel positivity condition that the
// local test's power rests on.
// =====================================================================

enum class KernelFamily { Gaussian, Epanechnikov, Biweight };

enum class KernelOrder { Value, D1, D2, Antiderivative };

struct KernelSpec {
  KernelFamily family = KernelFamily::Gaussian;
  // Optional hard truncation for the Gaussian: values/derivatives are
  // multiplied by 1{|u| <= r} (no renormalization).  Lets the pruned
  // evaluation path agree bit-for-bit with the exact one.
  std::optional<double> truncation_radius;
};

// Validates the (family, truncation) combination.
KernelSpec make_kernel(KernelFamily family,
                       std::optional<double> truncation_radius = std::nullopt);

// Closed-form K, K', K'', or antiderivative 1{s<=u} integral of K.
// Total on finite u; throws UsageError on non-finite input.
double kernel_eval(const KernelSpec& spec, KernelOrder order, double u);

// Radius R with K(u)=0 for |u|>R; +infinity for the untruncated Gaussian.
double kernel_support_radius(const KernelSpec& spec);

std::string kernel_family_name(KernelFamily family);

// ---------------------------------------------------------------------
// Bandwidths.
// ---------------------------------------------------------------------

enum class BandwidthRule { RuleOfThumb, Manual };

struct Bandwidth {
  double value = 0.0;
  BandwidthRule rule = BandwidthRule::Manual;
};

// h = 1.06 * sd(values) * n^{-1/5}, sd with the (n-1) denominator.
// DataError if fewer than 2 values; NumericalError if sd == 0.
Bandwidth bandwidth_rot(std::span<const double> values);

// Wraps a user-supplied value; must be positive and finite.
Bandwidth manual_bandwidth(double value);

// ---------------------------------------------------------------------
// Kernel positivity condition.
//
// Evaluates I = \int\int K(s1) K(s2) [Kcal(2 s1 - s2) + 2 Kcal(2 s2 - s1)]
// s1 ds1 ds2 over the unit window (s1, s2) in [-1,1]^2, the support
// stipulated for admissible kernels; Kcal is the antiderivative of K.
// Positivity of I drives the local test's power.  Over the unbounded
// domain the Gaussian integral cancels to exactly zero, so the window
// form is the meaningful (and conventional) constant.
// ---------------------------------------------------------------------

struct KernelConditionResult {
  double value = 0.0;
  bool positive = false;
  int refinement_levels = 0;  // panel-bisection levels used
};

// Tensor-product Gauss-Legendre (64 nodes per axis per panel) with
// panel bisection until successive levels differ by < 1e-6; throws
// NumericalError if not converged by the maximum refinement level.
KernelConditionResult kernel_condition_integral(const KernelSpec& spec);

}  // namespace curvtest
