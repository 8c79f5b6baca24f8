#pragma once

#include <span>
#include <vector>

#include "pdo/expr.hpp"

namespace pdo {

/// Degrees closer than this are the same degree.
inline constexpr double kDegreeTol = 1e-12;
/// Relative tolerance of the semantic zero test and the Euler check.
inline constexpr double kZeroTol = 1e-9;

/// A function of (x, xi) homogeneous of a real degree in xi.
struct HomogeneousTerm {
  Expr expr;
  double degree = 0.0;
  int dim = 1;
};

/// Truncated asymptotic series sum_j p_{m-j}; the remainder has degree m - N.
class ClassicalSymbol {
 public:
  ClassicalSymbol(int dim, double order, int truncation);

  /// Adds a term, merging with an existing term of the same degree. Terms at
  /// or below the truncation degree are dropped.
  void add(const HomogeneousTerm& term);
  void add(const Expr& expr, double degree) { add({expr, degree, dim_}); }

  int dim() const { return dim_; }
  double order() const { return order_; }
  int truncation() const { return truncation_; }
  /// Terms are kept sorted by strictly decreasing degree.
  const std::vector<HomogeneousTerm>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  /// Terms whose degree exceeds this value are kept.
  double cutoff_degree() const { return order_ - truncation_; }
  /// Term of the given degree, or the zero term when absent.
  HomogeneousTerm term_at(double degree) const;
  bool has_degree(double degree) const;

  /// Removes structurally zero terms.
  void prune_structural_zeros();

  /// The symbol 1 (identity operator).
  static ClassicalSymbol identity(int dim, int truncation);

 private:
  int dim_;
  double order_;
  int truncation_;
  std::vector<HomogeneousTerm> terms_;
};

ClassicalSymbol operator-(const ClassicalSymbol& a, const ClassicalSymbol& b);
ClassicalSymbol operator+(const ClassicalSymbol& a, const ClassicalSymbol& b);

/// Fixed seeded sample set: x uniform in [0, 2pi)^n, xi quasi-uniform on the
/// unit sphere. Row k holds point k.
struct SampleSet {
  std::vector<std::vector<double>> x;
  std::vector<std::vector<double>> xi;
  std::size_t size() const { return x.size(); }
};

inline constexpr std::size_t kSampleCount = 64;

const SampleSet& phase_samples(int dim);
/// n points quasi-uniform on the unit sphere S^{dim-1} (deterministic).
std::vector<std::vector<double>> sphere_directions(int dim, std::size_t count);

enum class DerivConvention { D, Partial };

/// D^alpha (or the plain partial) in x or xi. xi-derivatives lower the
/// degree by |alpha|.
HomogeneousTerm differentiate(const HomogeneousTerm& term, VarKind kind, const MultiIndex& alpha,
                              DerivConvention convention = DerivConvention::D);

struct HomogeneityReport {
  double residual = 0.0;
  bool accepted = false;
};

/// Max over the sample set of |sum_j xi_j d/dxi_j p - degree * p| / scale.
HomogeneityReport check_homogeneity(const HomogeneousTerm& term);

/// Semantic zero test over the fixed sample set.
bool is_zero(const HomogeneousTerm& term);
bool is_zero(const Expr& expr, int dim);

/// True when a and b agree term by term above the smaller cutoff degree.
bool agree_termwise(const ClassicalSymbol& a, const ClassicalSymbol& b);

/// Binomial expansion of <xi>^s = (1 + |xi|^2)^{s/2}.
ClassicalSymbol make_lambda_s(double s, int dim, int truncation);

HomogeneousTerm conjugate(const HomogeneousTerm& term);

/// Generalised binomial coefficient C(a, k).
double binomial(double a, int k);

}  // namespace pdo
