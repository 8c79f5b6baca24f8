#pragma once

#include <vector>

#include "pdo/grid.hpp"
#include "pdo/symbol.hpp"

namespace pdo {

/// (Pu)(x) = sum_{k != 0} e^{ik.x} p(x, k) u^(k) + c0(x) u^(0), with c0 the
/// zero-mode symbol below. Terms that factor as sums of c(x) h(xi) are
/// applied with one inverse transform per distinct h; anything else falls
/// back to the dense O(M^{2n}) sum.
GridFunction op_apply(const ClassicalSymbol& p, const GridFunction& u);

/// Multiplier for the k = 0 mode: excised terms of positive degree vanish
/// there, negative degrees have no finite limit and are dropped, and
/// degree-0 terms contribute their value along e_1.
Expr zero_mode_symbol(const ClassicalSymbol& p);

/// (sum_k (1 + |k|^2)^s |u^(k)|^2)^{1/2}.
double sobolev_norm(const GridFunction& u, double s);

/// sum_k u^(k) conj(v^(k)). Throws GridMismatch.
Complex duality_pair(const GridFunction& u, const GridFunction& v);

struct SobolevTrend {
  std::vector<int> points;
  /// sobolev_norm at each grid size.
  std::vector<double> norms;
  /// Growth of the squared norm over the last doubling divided by the one before.
  double increment_ratio = 0.0;
  /// Squared-norm increments shrink by more than 1% per doubling.
  bool bounded = false;
};

/// Sobolev norms of the 1D field with u^(k) = coefficient(xi1 = k) for k != 0
/// and u^(0) = 0, over successive grid sizes (at least three).
SobolevTrend sobolev_trend(const Expr& coefficient, double s, const std::vector<int>& points);

}  // namespace pdo
