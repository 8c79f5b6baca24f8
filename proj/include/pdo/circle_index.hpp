#pragma once

#include <vector>

#include "pdo/expr.hpp"

namespace pdo {

/// Rank count of the truncated operator u -> a+ P+ u + a- P- u on the circle,
/// with P+ projecting onto modes j >= 0 and P- onto j < 0.
struct IndexReport {
  int winding_plus = 0;
  int winding_minus = 0;
  /// dim ker - dim coker at truncation K.
  int index = 0;
  int dim_ker = 0;
  int dim_coker = 0;
  int K = 0;
  /// Largest |k| with |a^(k)| above 1e-15 of the peak coefficient.
  int bandwidth = 0;
  /// Index recomputed at K + 8.
  int index_check = 0;
  /// Singular values below the rank threshold, kernel block then cokernel block.
  std::vector<double> small_singular_values;
  /// Smallest singular value kept as nonzero across both blocks.
  double smallest_kept = 0.0;
};

/// Winding number of a nonvanishing x1-expression over [0, 2pi] from
/// argument increments on `samples` points.
int winding_number(const Expr& a, int samples = 256);

IndexReport circle_index(const Expr& a_plus, const Expr& a_minus, int K = 32);

}  // namespace pdo
