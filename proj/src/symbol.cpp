#include "pdo/symbol.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <random>
#include <set>

#include "pdo/error.hpp"

namespace pdo {

namespace {

bool same_degree(double a, double b) { return std::abs(a - b) <= kDegreeTol; }

Complex minus_i_power(int k) {
  static const Complex table[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
  return table[k % 4];
}

}  // namespace

ClassicalSymbol::ClassicalSymbol(int dim, double order, int truncation)
    : dim_(dim), order_(order), truncation_(truncation) {
  if (dim < 1 || dim > kMaxDim) throw DimensionMismatch("symbol dimension out of range");
  if (truncation < 1) throw std::invalid_argument("truncation order must be positive");
}

void ClassicalSymbol::add(const HomogeneousTerm& term) {
  if (term.dim != dim_) throw DimensionMismatch("term dimension differs from symbol dimension");
  if (term.degree <= cutoff_degree() + kDegreeTol) return;
  for (auto& t : terms_) {
    if (same_degree(t.degree, term.degree)) {
      t.expr = t.expr + term.expr;
      return;
    }
  }
  auto pos = std::find_if(terms_.begin(), terms_.end(),
                          [&](const HomogeneousTerm& t) { return t.degree < term.degree; });
  terms_.insert(pos, term);
}

HomogeneousTerm ClassicalSymbol::term_at(double degree) const {
  for (const auto& t : terms_)
    if (same_degree(t.degree, degree)) return t;
  return {Expr(), degree, dim_};
}

bool ClassicalSymbol::has_degree(double degree) const {
  return std::any_of(terms_.begin(), terms_.end(),
                     [&](const HomogeneousTerm& t) { return same_degree(t.degree, degree); });
}

void ClassicalSymbol::prune_structural_zeros() {
  std::erase_if(terms_, [](const HomogeneousTerm& t) { return t.expr.is_structural_zero(); });
}

ClassicalSymbol ClassicalSymbol::identity(int dim, int truncation) {
  ClassicalSymbol one(dim, 0.0, truncation);
  one.add(Expr(1.0), 0.0);
  return one;
}

namespace {

ClassicalSymbol combine(const ClassicalSymbol& a, const ClassicalSymbol& b, double sign) {
  if (a.dim() != b.dim()) throw DimensionMismatch("symbols have different dimensions");
  const double order = std::max(a.order(), b.order());
  const double cutoff = std::max(a.cutoff_degree(), b.cutoff_degree());
  const int truncation = std::max(1, static_cast<int>(std::floor(order - cutoff + kDegreeTol)));
  ClassicalSymbol out(a.dim(), order, truncation);
  for (const auto& t : a.terms()) out.add(t);
  for (const auto& t : b.terms()) out.add({sign > 0 ? t.expr : -t.expr, t.degree, t.dim});
  return out;
}

}  // namespace

ClassicalSymbol operator-(const ClassicalSymbol& a, const ClassicalSymbol& b) { return combine(a, b, -1.0); }
ClassicalSymbol operator+(const ClassicalSymbol& a, const ClassicalSymbol& b) { return combine(a, b, 1.0); }

std::vector<std::vector<double>> sphere_directions(int dim, std::size_t count) {
  std::vector<std::vector<double>> dirs;
  dirs.reserve(count);
  const double pi = std::numbers::pi;
  if (dim == 1) {
    for (std::size_t k = 0; k < count; ++k) dirs.push_back({k % 2 == 0 ? 1.0 : -1.0});
  } else if (dim == 2) {
    for (std::size_t k = 0; k < count; ++k) {
      const double a = 2.0 * pi * static_cast<double>(k) / static_cast<double>(count);
      dirs.push_back({std::cos(a), std::sin(a)});
    }
  } else if (dim == 3) {
    // Fibonacci lattice.
    const double golden = pi * (3.0 - std::sqrt(5.0));
    for (std::size_t k = 0; k < count; ++k) {
      const double z = 1.0 - (2.0 * static_cast<double>(k) + 1.0) / static_cast<double>(count);
      const double r = std::sqrt(1.0 - z * z);
      const double a = golden * static_cast<double>(k);
      dirs.push_back({r * std::cos(a), r * std::sin(a), z});
    }
  } else {
    std::mt19937_64 rng(0x5EEDu + static_cast<unsigned>(dim));
    std::normal_distribution<double> gauss;
    for (std::size_t k = 0; k < count; ++k) {
      std::vector<double> v(dim);
      double norm = 0.0;
      for (auto& c : v) {
        c = gauss(rng);
        norm += c * c;
      }
      norm = std::sqrt(norm);
      for (auto& c : v) c /= norm;
      dirs.push_back(std::move(v));
    }
  }
  return dirs;
}

const SampleSet& phase_samples(int dim) {
  static std::mutex mutex;
  static std::map<int, SampleSet> cache;
  std::lock_guard lock(mutex);
  if (auto it = cache.find(dim); it != cache.end()) return it->second;
  SampleSet s;
  std::mt19937_64 rng(20240917u + static_cast<unsigned>(dim));
  std::uniform_real_distribution<double> box(0.0, 2.0 * std::numbers::pi);
  // A half-step rotation keeps the circle samples off the coordinate axes.
  auto dirs = sphere_directions(dim, kSampleCount);
  if (dim == 2) {
    const double shift = std::numbers::pi / static_cast<double>(kSampleCount) * 0.618;
    for (auto& d : dirs) {
      const double a = std::atan2(d[1], d[0]) + shift;
      d = {std::cos(a), std::sin(a)};
    }
  }
  for (std::size_t k = 0; k < kSampleCount; ++k) {
    std::vector<double> x(dim);
    for (auto& c : x) c = box(rng);
    s.x.push_back(std::move(x));
    s.xi.push_back(dirs[k]);
  }
  return cache.emplace(dim, std::move(s)).first->second;
}

HomogeneousTerm differentiate(const HomogeneousTerm& term, VarKind kind, const MultiIndex& alpha,
                              DerivConvention convention) {
  if (alpha.dim() != term.dim) throw DimensionMismatch("multi-index dimension differs from term dimension");
  Expr e = term.expr;
  for (int j = 0; j < alpha.dim(); ++j)
    for (int r = 0; r < alpha[j]; ++r) e = e.derivative({kind, j});
  const int order = alpha.order();
  if (convention == DerivConvention::D) e = Expr(minus_i_power(order)) * e;
  const double degree = kind == VarKind::Xi ? term.degree - order : term.degree;
  return {e, degree, term.dim};
}

HomogeneityReport check_homogeneity(const HomogeneousTerm& term) {
  std::vector<Expr> roots{term.expr};
  for (int j = 0; j < term.dim; ++j) roots.push_back(Expr::xi(j) * term.expr.derivative({VarKind::Xi, j}));
  Tape tape(roots);
  const auto& samples = phase_samples(term.dim);
  HomogeneityReport report;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    auto v = tape.run(samples.x[k], samples.xi[k]);
    Complex euler = -term.degree * v[0];
    double scale = std::max(1.0, std::abs(term.degree * v[0]));
    double pieces = 0.0;
    for (int j = 0; j < term.dim; ++j) {
      euler += v[j + 1];
      pieces += std::abs(v[j + 1]);
    }
    scale = std::max(scale, pieces);
    report.residual = std::max(report.residual, std::abs(euler) / scale);
  }
  report.accepted = report.residual <= kZeroTol;
  return report;
}

bool is_zero(const Expr& expr, int dim) {
  if (expr.is_structural_zero()) return true;
  Tape tape(expr);
  const auto& samples = phase_samples(dim);
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const Complex v = tape.run(samples.x[k], samples.xi[k])[0];
    const double scale = std::max(1.0, tape.max_magnitude());
    if (std::abs(v) > kZeroTol * scale) return false;
  }
  return true;
}

bool is_zero(const HomogeneousTerm& term) { return is_zero(term.expr, term.dim); }

bool agree_termwise(const ClassicalSymbol& a, const ClassicalSymbol& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("symbols have different dimensions");
  const double cutoff = std::max(a.cutoff_degree(), b.cutoff_degree());
  std::vector<double> degrees;
  for (const auto* s : {&a, &b})
    for (const auto& t : s->terms())
      if (t.degree > cutoff + kDegreeTol) degrees.push_back(t.degree);
  for (double d : degrees)
    if (!is_zero(a.term_at(d).expr - b.term_at(d).expr, a.dim())) return false;
  return true;
}

double binomial(double a, int k) {
  double c = 1.0;
  for (int j = 0; j < k; ++j) c *= (a - j) / (j + 1);
  return c;
}

ClassicalSymbol make_lambda_s(double s, int dim, int truncation) {
  ClassicalSymbol out(dim, s, truncation);
  std::vector<Expr> squares;
  for (int j = 0; j < dim; ++j) squares.push_back(pow(Expr::xi(j), 2.0));
  const Expr sum_sq = sum(squares);
  const Expr norm = sqrt(sum_sq);
  for (int k = 0; 2 * k < truncation; ++k) {
    const double c = binomial(s / 2.0, k);
    if (c == 0.0) continue;
    const double p = s - 2.0 * k;
    const double half = p / 2.0;
    const Expr power = (half == std::nearbyint(half)) ? pow(sum_sq, half) : pow(norm, p);
    out.add(Expr(c) * power, p);
  }
  return out;
}

HomogeneousTerm conjugate(const HomogeneousTerm& term) { return {term.expr.conjugate(), term.degree, term.dim}; }

}  // namespace pdo
