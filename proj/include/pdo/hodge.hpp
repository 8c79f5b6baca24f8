#pragma once

#include <cstdint>
#include <vector>

#include "pdo/grid.hpp"

namespace pdo {

/// Strictly increasing 0-based index tuple naming dx_alpha.
using FormIndex = std::vector<int>;

/// All |alpha| = j multi-indices in {0..n-1}, lexicographic.
std::vector<FormIndex> form_basis(int n, int j);

/// Sign and target of dx_l ^ dx_alpha; sign 0 when l is already in alpha.
struct WedgeResult {
  int sign = 0;
  FormIndex target;
};
WedgeResult wedge_front(int l, const FormIndex& alpha);

/// Sum over alpha of f_alpha dx_alpha on the flat torus T^n, coefficient
/// fields ordered as form_basis(n, j).
class FormField {
 public:
  FormField() = default;
  /// Zero form.
  FormField(int n, int j, int points);
  /// Coefficient fields given in form_basis order.
  FormField(int n, int j, std::vector<GridFunction> coefficients);
  /// Samples x-only expressions on the lattice.
  static FormField sample(int n, int j, int points, const std::vector<Expr>& coefficients);

  int dim() const { return n_; }
  int degree() const { return j_; }
  int points() const { return points_; }
  const std::vector<FormIndex>& basis() const { return basis_; }
  std::size_t slots() const { return coeffs_.size(); }
  GridFunction& operator[](std::size_t slot) { return coeffs_[slot]; }
  const GridFunction& operator[](std::size_t slot) const { return coeffs_[slot]; }
  /// Slot of a multi-index, or -1.
  int slot_of(const FormIndex& alpha) const;
  double max_abs() const;
  bool same_shape(const FormField& other) const;

  FormField& operator+=(const FormField& other);
  FormField& operator-=(const FormField& other);
  FormField& operator*=(Complex c);

 private:
  int n_ = 1;
  int j_ = 0;
  int points_ = 0;
  std::vector<FormIndex> basis_;
  std::vector<GridFunction> coeffs_;
};

FormField operator+(FormField a, const FormField& b);
FormField operator-(FormField a, const FormField& b);
FormField operator*(Complex c, FormField a);

/// Sum over slots of the coefficient duality pairs.
Complex inner(const FormField& a, const FormField& b);

/// Random field with modes |k_l| <= band, coefficients uniform in the unit square.
FormField random_form(int n, int j, int points, int band, std::uint64_t seed);

FormField ext_d(const FormField& w);
FormField hodge_star(const FormField& w);
FormField codifferential(const FormField& w);
/// d delta + delta d.
FormField laplacian(const FormField& w);
/// Exact pseudo-inverse of the Laplacian: nonzero modes divided by |k|^2,
/// k = 0 modes dropped.
FormField green(const FormField& w);
/// k = 0 part of every coefficient.
FormField harmonic_part(const FormField& w);

struct HodgeParts {
  FormField harmonic;
  FormField exact;
  FormField coexact;
};
HodgeParts hodge_decompose(const FormField& w);

/// Rank of the harmonic projector on `probes` random j-forms on T^n.
int betti(int n, int j, int probes = 0, int points = 8, std::uint64_t seed = 1);

struct ParametrixReport {
  int n = 0;
  int j = 0;
  int trials = 0;
  /// Max over trials of |(d Q_{j-1} + Q_j d - I + H) w|.
  double max_residual = 0.0;
};
/// Q_j = G delta on (j+1)-forms and H the harmonic projector.
ParametrixReport complex_parametrix_check(int n, int j, int trials, int points = 8, std::uint64_t seed = 1);

}  // namespace pdo
