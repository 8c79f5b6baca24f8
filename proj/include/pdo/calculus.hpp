#pragma once

#include <cstddef>
#include <vector>

#include "pdo/symbol.hpp"

namespace pdo {

/// Top-degree term of P; the zero term of degree order() when absent.
HomogeneousTerm principal(const ClassicalSymbol& p);

/// Left symbol of PQ:  r_{m+m'-l} = sum_{j+k+|a|=l} (1/a!) D_xi^a p_{m-j} d_x^a q_{m'-k}.
/// The result keeps min(N_P, N_Q) orders.
ClassicalSymbol compose(const ClassicalSymbol& p, const ClassicalSymbol& q);

/// Left symbol of P*:  sum_a (1/a!) d_x^a D_xi^a conj(p).
ClassicalSymbol adjoint(const ClassicalSymbol& p);

enum class SymbolSide { LeftToRight, RightToLeft };

/// Converts between left and right total symbols. Right symbols reuse the
/// x variables for the y (input) coordinates.
ClassicalSymbol convert_left_right(const ClassicalSymbol& p, SymbolSide direction);

/// [P, Q] = compose(P, Q) - compose(Q, P).
ClassicalSymbol commutator(const ClassicalSymbol& p, const ClassicalSymbol& q);

/// {p, q} = sum_j dp/dxi_j dq/dx_j - dp/dx_j dq/dxi_j.
HomogeneousTerm poisson_bracket(const HomogeneousTerm& p, const HomogeneousTerm& q);

struct EllipticityOptions {
  int x_points_per_axis = 16;
  std::size_t directions = 64;
  double threshold = 1e-8;
};

struct EllipticityReport {
  double min_modulus = 0.0;
  std::vector<double> argmin_x;
  std::vector<double> argmin_xi;
  bool elliptic = false;
};

/// Samples |sigma_m(P)| over a box grid times unit directions.
EllipticityReport is_elliptic(const ClassicalSymbol& p, const EllipticityOptions& options = {});

/// |sigma_m(P)(x0, xi0/|xi0|)| >= 1e-8. Throws ZeroCovector when xi0 = 0.
bool micro_elliptic_at(const ClassicalSymbol& p, const std::vector<double>& x0, const std::vector<double>& xi0);

/// Two-sided parametrix of an elliptic symbol, keeping `truncation` orders.
ClassicalSymbol parametrix(const ClassicalSymbol& p, int truncation,
                           const EllipticityOptions& options = {});

/// Q with Q o Q - P of degree <= m - truncation, for a real positive
/// principal symbol.
ClassicalSymbol sqrt_approx(const ClassicalSymbol& p, int truncation);

/// A diffeomorphism of the working box given by explicit forward and inverse
/// maps. Construction validates both invariants on the sample set.
class Diffeo {
 public:
  Diffeo(std::vector<Expr> forward, std::vector<Expr> inverse);

  int dim() const { return static_cast<int>(forward_.size()); }
  const std::vector<Expr>& forward() const { return forward_; }
  const std::vector<Expr>& inverse() const { return inverse_; }
  /// Entry (i, j) is d chi_i / d x_j.
  const std::vector<std::vector<Expr>>& jacobian() const { return jacobian_; }

 private:
  std::vector<Expr> forward_;
  std::vector<Expr> inverse_;
  std::vector<std::vector<Expr>> jacobian_;
};

/// (x, eta) -> p(chi(x), (d chi/dx)^{-T} eta).
HomogeneousTerm pullback_principal(const HomogeneousTerm& p, const Diffeo& chi);

}  // namespace pdo
