#include "pdo/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "pdo/error.hpp"

namespace pdo {

namespace {

Complex minus_i_power(int k) {
  static const Complex table[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
  return table[k % 4];
}

// Memoised plain partial derivatives of one term.
class Derivatives {
 public:
  explicit Derivatives(HomogeneousTerm term) : term_(std::move(term)) {}

  const HomogeneousTerm& term() const { return term_; }

  const Expr& get(VarKind kind, const MultiIndex& alpha) {
    if (alpha.order() == 0) return term_.expr;
    auto key = std::make_pair(kind == VarKind::X ? 0 : 1, alpha);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    std::vector<int> lower = alpha.entries();
    int j = 0;
    while (lower[j] == 0) ++j;
    --lower[j];
    Expr d = get(kind, MultiIndex(lower)).derivative({kind, j});
    return cache_.emplace(key, std::move(d)).first->second;
  }

 private:
  HomogeneousTerm term_;
  std::map<std::pair<int, MultiIndex>, Expr> cache_;
};

using TermList = std::vector<Derivatives>;

TermList make_list(const ClassicalSymbol& s) {
  TermList out;
  for (const auto& t : s.terms()) out.emplace_back(t);
  return out;
}

// Integer k >= 0 with a + b - k == target, or -1.
int level_gap(double a, double b, double target) {
  const double gap = a + b - target;
  const double k = std::nearbyint(gap);
  if (std::abs(gap - k) > kDegreeTol || k < 0) return -1;
  return static_cast<int>(k);
}

// Degrees a + b - k (k = 0, 1, ...) strictly above `cutoff`, descending.
std::vector<double> candidate_degrees(const std::vector<double>& da, const std::vector<double>& db, double cutoff) {
  std::vector<double> out;
  for (double a : da)
    for (double b : db)
      for (double d = a + b; d > cutoff + kDegreeTol; d -= 1.0) out.push_back(d);
  std::sort(out.begin(), out.end(), std::greater<>());
  std::vector<double> unique;
  for (double d : out)
    if (unique.empty() || std::abs(unique.back() - d) > kDegreeTol) unique.push_back(d);
  return unique;
}

std::vector<double> degrees_of(const TermList& list) {
  std::vector<double> out;
  for (const auto& t : list) out.push_back(t.term().degree);
  return out;
}

// The degree-`target` part of the composition series of (ps, qs).
Expr compose_level(TermList& ps, TermList& qs, double target, int dim) {
  std::vector<Expr> parts;
  for (auto& p : ps) {
    for (auto& q : qs) {
      const int k = level_gap(p.term().degree, q.term().degree, target);
      if (k < 0) continue;
      for (const MultiIndex& alpha : MultiIndex::of_order(dim, k)) {
        const Expr& dq = q.get(VarKind::X, alpha);
        if (dq.is_structural_zero()) continue;
        const Expr& dp = p.get(VarKind::Xi, alpha);
        if (dp.is_structural_zero()) continue;
        const Complex c = minus_i_power(k) / static_cast<double>(alpha.factorial());
        parts.push_back(Expr(c) * dp * dq);
      }
    }
  }
  return sum(parts);
}

bool semantically_zero(const Expr& e, int dim) { return e.is_structural_zero() || is_zero(e, dim); }

// sum_a (sign^{|a|} / a!) D_xi^a d_x^a p, shared by the adjoint and the
// left/right conversions.
ClassicalSymbol expand_mixed(const ClassicalSymbol& p, bool conjugate_first, double sign) {
  ClassicalSymbol out(p.dim(), p.order(), p.truncation());
  for (const auto& term : p.terms()) {
    Derivatives d(conjugate_first ? conjugate(term) : term);
    for (int k = 0; term.degree - k > p.cutoff_degree() + kDegreeTol; ++k) {
      const Complex c = minus_i_power(k) * std::pow(sign, k);
      for (const MultiIndex& alpha : MultiIndex::of_order(p.dim(), k)) {
        Expr e = d.get(VarKind::Xi, alpha);
        for (int j = 0; j < p.dim(); ++j)
          for (int r = 0; r < alpha[j]; ++r) e = e.derivative({VarKind::X, j});
        if (e.is_structural_zero()) continue;
        out.add(Expr(c / static_cast<double>(alpha.factorial())) * e, term.degree - k);
      }
    }
  }
  out.prune_structural_zeros();
  return out;
}

void require_same_dim(const ClassicalSymbol& p, const ClassicalSymbol& q) {
  if (p.dim() != q.dim()) throw DimensionMismatch("symbols have different dimensions");
}

}  // namespace

HomogeneousTerm principal(const ClassicalSymbol& p) { return p.term_at(p.order()); }

ClassicalSymbol compose(const ClassicalSymbol& p, const ClassicalSymbol& q) {
  require_same_dim(p, q);
  const int truncation = std::min(p.truncation(), q.truncation());
  ClassicalSymbol out(p.dim(), p.order() + q.order(), truncation);
  TermList ps = make_list(p);
  TermList qs = make_list(q);
  for (double d : candidate_degrees(degrees_of(ps), degrees_of(qs), out.cutoff_degree())) {
    Expr e = compose_level(ps, qs, d, p.dim());
    if (!e.is_structural_zero()) out.add(e, d);
  }
  return out;
}

ClassicalSymbol adjoint(const ClassicalSymbol& p) { return expand_mixed(p, true, 1.0); }

ClassicalSymbol convert_left_right(const ClassicalSymbol& p, SymbolSide direction) {
  return expand_mixed(p, false, direction == SymbolSide::LeftToRight ? -1.0 : 1.0);
}

ClassicalSymbol commutator(const ClassicalSymbol& p, const ClassicalSymbol& q) {
  require_same_dim(p, q);
  ClassicalSymbol out = compose(p, q) - compose(q, p);
  out.prune_structural_zeros();
  return out;
}

HomogeneousTerm poisson_bracket(const HomogeneousTerm& p, const HomogeneousTerm& q) {
  if (p.dim != q.dim) throw DimensionMismatch("terms have different dimensions");
  std::vector<Expr> parts;
  for (int j = 0; j < p.dim; ++j) {
    parts.push_back(p.expr.derivative({VarKind::Xi, j}) * q.expr.derivative({VarKind::X, j}));
    parts.push_back(-(p.expr.derivative({VarKind::X, j}) * q.expr.derivative({VarKind::Xi, j})));
  }
  return {sum(parts), p.degree + q.degree - 1.0, p.dim};
}

EllipticityReport is_elliptic(const ClassicalSymbol& p, const EllipticityOptions& options) {
  const HomogeneousTerm top = principal(p);
  Tape tape(top.expr);
  const int n = p.dim();
  const auto dirs = sphere_directions(n, options.directions);
  const int m = options.x_points_per_axis;
  std::size_t total = 1;
  for (int j = 0; j < n; ++j) total *= static_cast<std::size_t>(m);

  EllipticityReport report;
  report.min_modulus = std::numeric_limits<double>::infinity();
  std::vector<double> x(n);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rest = flat;
    for (int j = n - 1; j >= 0; --j) {
      x[j] = 2.0 * std::numbers::pi * static_cast<double>(rest % m) / m;
      rest /= m;
    }
    for (const auto& xi : dirs) {
      const double mod = std::abs(tape.run(x, xi)[0]);
      if (mod < report.min_modulus) {
        report.min_modulus = mod;
        report.argmin_x = x;
        report.argmin_xi = xi;
      }
    }
  }
  report.elliptic = report.min_modulus >= options.threshold;
  return report;
}

bool micro_elliptic_at(const ClassicalSymbol& p, const std::vector<double>& x0, const std::vector<double>& xi0) {
  double norm = 0.0;
  for (double c : xi0) norm += c * c;
  norm = std::sqrt(norm);
  if (norm == 0.0) throw ZeroCovector("micro-ellipticity needs a nonzero covector");
  std::vector<double> dir(xi0);
  for (auto& c : dir) c /= norm;
  return std::abs(principal(p).expr.evaluate(x0, dir)) >= 1e-8;
}

ClassicalSymbol parametrix(const ClassicalSymbol& p, int truncation, const EllipticityOptions& options) {
  const auto report = is_elliptic(p, options);
  if (!report.elliptic)
    throw NotElliptic("principal symbol modulus drops to " + format_number(report.min_modulus));
  const int n = p.dim();
  const HomogeneousTerm top = principal(p);
  const double m = p.order();

  TermList ps = make_list(p);
  TermList qs;
  qs.emplace_back(HomogeneousTerm{Expr(1.0) / top.expr, -m, n});

  // Kill the residual of PQ - 1 one degree at a time, top down; the new term
  // only touches degrees at or below the one it corrects.
  const double cutoff = -static_cast<double>(truncation);
  double processed = 0.0;
  for (;;) {
    double next = -std::numeric_limits<double>::infinity();
    for (double d : candidate_degrees(degrees_of(ps), degrees_of(qs), cutoff))
      if (d < processed - kDegreeTol) {
        next = d;
        break;
      }
    if (!std::isfinite(next)) break;
    Expr residual = compose_level(ps, qs, next, n);
    if (!semantically_zero(residual, n)) qs.emplace_back(HomogeneousTerm{-residual / top.expr, next - m, n});
    processed = next;
  }

  ClassicalSymbol q(n, -m, truncation);
  for (const auto& t : qs) q.add(t.term());
  return q;
}

ClassicalSymbol sqrt_approx(const ClassicalSymbol& p, int truncation) {
  const int n = p.dim();
  const HomogeneousTerm top = principal(p);
  {
    Tape tape(top.expr);
    const auto& samples = phase_samples(n);
    for (std::size_t k = 0; k < samples.size(); ++k) {
      const Complex v = tape.run(samples.x[k], samples.xi[k])[0];
      if (std::abs(v.imag()) > 1e-12 * std::max(1.0, std::abs(v)) || v.real() <= 1e-8)
        throw NotPositive("principal symbol is not real and positive on the sample set");
    }
  }
  const double m = p.order();
  const Expr root = sqrt(top.expr);
  TermList qs;
  qs.emplace_back(HomogeneousTerm{root, m / 2.0, n});

  const double cutoff = m - truncation;
  double processed = m;
  for (;;) {
    std::vector<double> cands = candidate_degrees(degrees_of(qs), degrees_of(qs), cutoff);
    for (const auto& t : p.terms())
      if (t.degree > cutoff + kDegreeTol) cands.push_back(t.degree);
    double next = -std::numeric_limits<double>::infinity();
    for (double d : cands)
      if (d < processed - kDegreeTol) next = std::max(next, d);
    if (!std::isfinite(next)) break;
    Expr residual = p.term_at(next).expr - compose_level(qs, qs, next, n);
    if (!semantically_zero(residual, n))
      qs.emplace_back(HomogeneousTerm{residual / (Expr(2.0) * root), next - m / 2.0, n});
    processed = next;
  }

  ClassicalSymbol q(n, m / 2.0, truncation);
  for (const auto& t : qs) q.add(t.term());
  return q;
}

namespace {

Expr determinant(const std::vector<std::vector<Expr>>& a) {
  const std::size_t n = a.size();
  if (n == 1) return a[0][0];
  std::vector<Expr> parts;
  for (std::size_t c = 0; c < n; ++c) {
    std::vector<std::vector<Expr>> minor;
    for (std::size_t r = 1; r < n; ++r) {
      std::vector<Expr> row;
      for (std::size_t k = 0; k < n; ++k)
        if (k != c) row.push_back(a[r][k]);
      minor.push_back(std::move(row));
    }
    Expr term = a[0][c] * determinant(minor);
    parts.push_back(c % 2 == 0 ? term : -term);
  }
  return sum(parts);
}

Expr cofactor(const std::vector<std::vector<Expr>>& a, std::size_t i, std::size_t j) {
  const std::size_t n = a.size();
  if (n == 1) return Expr(1.0);
  std::vector<std::vector<Expr>> minor;
  for (std::size_t r = 0; r < n; ++r) {
    if (r == i) continue;
    std::vector<Expr> row;
    for (std::size_t k = 0; k < n; ++k)
      if (k != j) row.push_back(a[r][k]);
    minor.push_back(std::move(row));
  }
  Expr d = determinant(minor);
  return (i + j) % 2 == 0 ? d : -d;
}

}  // namespace

Diffeo::Diffeo(std::vector<Expr> forward, std::vector<Expr> inverse)
    : forward_(std::move(forward)), inverse_(std::move(inverse)) {
  const int n = dim();
  if (n < 1 || static_cast<int>(inverse_.size()) != n)
    throw DimensionMismatch("forward and inverse maps need the same number of components");
  jacobian_.assign(n, std::vector<Expr>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) jacobian_[i][j] = forward_[i].derivative({VarKind::X, j});

  const Expr det = determinant(jacobian_);
  std::vector<Expr> round_trip;
  for (int i = 0; i < n; ++i) round_trip.push_back(forward_[i].substitute(inverse_, {}) - Expr::x(i));
  const auto& samples = phase_samples(n);
  for (std::size_t k = 0; k < samples.size(); ++k) {
    for (const auto& r : round_trip)
      if (std::abs(r.evaluate(samples.x[k], samples.xi[k])) > 1e-9)
        throw DomainError("forward o inverse is not the identity on the sample set");
    if (std::abs(det.evaluate(samples.x[k], samples.xi[k])) < 1e-12)
      throw DomainError("Jacobian determinant vanishes on the sample set");
  }
}

HomogeneousTerm pullback_principal(const HomogeneousTerm& p, const Diffeo& chi) {
  const int n = chi.dim();
  if (p.dim != n) throw DimensionMismatch("map dimension differs from term dimension");
  const auto& jac = chi.jacobian();
  const Expr det = determinant(jac);
  // (J^{-T})_{ij} = C_{ij} / det J with C the cofactor matrix.
  std::vector<Expr> covector;
  for (int i = 0; i < n; ++i) {
    std::vector<Expr> parts;
    for (int j = 0; j < n; ++j) parts.push_back(cofactor(jac, i, j) * Expr::xi(j));
    covector.push_back(sum(parts) / det);
  }
  return {p.expr.substitute(chi.forward(), covector), p.degree, n};
}

}  // namespace pdo
