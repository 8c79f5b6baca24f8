#pragma once

#include <limits>
#include <vector>

#include "pdo/expr.hpp"

namespace pdo {

/// psi(x) = profile(x) on (lo, hi) and 0 elsewhere; profile is an Expr in x1
/// that must vanish to all orders at both ends.
struct TestFunction {
  Expr profile;
  double lo = -1.0;
  double hi = 1.0;

  double at(double x) const;
};

/// exp(-1/(1 - ((x - center)/radius)^2)) on (center - radius, center + radius).
TestFunction bump(double center, double radius);

/// Amplitude a(theta) as an Expr in xi1. With `excise` set the integrand uses
/// (1 - phi)(theta) a(theta), phi = 1 on |theta| <= 1/2 and 0 on |theta| >= 1.
struct Amplitude {
  Expr a;
  bool excise = true;
};

enum class CutoffProfile { Exponential, Gaussian };
enum class OscMethod { EpsilonCutoff, Parts };

/// Smooth step: 0 for t <= 0, 1 for t >= 1.
double smooth_step(double t, CutoffProfile profile = CutoffProfile::Exponential);
/// The same step on (0, 1) as an expression in `t`.
Expr smooth_step_expr(const Expr& t, CutoffProfile profile = CutoffProfile::Exponential);

struct OscOptions {
  CutoffProfile profile = CutoffProfile::Exponential;
  /// Cauchy tolerance of the extrapolated epsilon sequence (relative).
  double tol = 1e-6;
  /// Symbol order; NaN means estimate it from the growth of |a|.
  double order = std::numeric_limits<double>::quiet_NaN();
};

struct OscResult {
  Complex value;
  OscMethod method = OscMethod::EpsilonCutoff;
  /// Epsilon method: the raw values I(eps) for eps = 2^-4 .. 2^-10.
  std::vector<Complex> sequence;
  /// Epsilon method: |T_{k,k} - T_{k-1,k-1}| of the Richardson table.
  double cauchy_gap = 0.0;
  /// Parts method: number of applications of the transposed operator.
  int applications = 0;
  double order = 0.0;
};

/// Regularised pairing of the distribution int e^{i x theta} a(theta) dtheta
/// with psi. Throws NonConvergent when the epsilon sequence fails its Cauchy
/// test.
OscResult oscint_eval(const Amplitude& amplitude, const TestFunction& psi, OscMethod method,
                      const OscOptions& options = {});

/// Growth exponent of |a(theta)| at large |theta|.
double estimate_order(const Expr& a);

}  // namespace pdo
