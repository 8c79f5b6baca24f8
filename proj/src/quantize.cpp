#include "pdo/quantize.hpp"

#include <cmath>
#include <map>
#include <optional>

#include "pdo/error.hpp"

namespace pdo {

namespace {

// c(x) h(xi).
struct Pair {
  Expr c;
  Expr h;
};
using Pairs = std::vector<Pair>;

constexpr std::size_t kMaxPairs = 4096;

// Values of h at a few fixed covectors; pairs whose xi-factors agree there
// are merged so repeated products do not multiply the pair count.
std::vector<Complex> fingerprint(const Expr& h) {
  static const double probes[3][3] = {{0.8, -0.6, 0.3}, {-0.28, 0.96, -0.7}, {0.53, 0.85, 0.41}};
  std::vector<Complex> v;
  for (const auto& xi : probes) {
    try {
      v.push_back(h.evaluate({}, xi));
    } catch (const DomainError&) {
      v.push_back(Complex(std::nan(""), 0.0));
    }
  }
  return v;
}

Pairs merge(Pairs pairs) {
  Pairs out;
  std::vector<std::vector<Complex>> prints;
  for (auto& p : pairs) {
    auto fp = fingerprint(p.h);
    std::size_t k = 0;
    for (; k < prints.size(); ++k) {
      bool same = true;
      for (std::size_t j = 0; j < fp.size() && same; ++j)
        same = std::abs(fp[j] - prints[k][j]) <= 1e-13 * std::max(1.0, std::abs(fp[j]));
      if (same) break;
    }
    if (k < prints.size()) {
      out[k].c = out[k].c + p.c;
    } else {
      prints.push_back(std::move(fp));
      out.push_back(std::move(p));
    }
  }
  return out;
}

std::optional<Pairs> split(const Expr& e) {
  if (!e.depends_on_xi()) return Pairs{{e, Expr(1.0)}};
  if (!e.depends_on_x()) return Pairs{{Expr(1.0), e}};
  switch (e.op()) {
    case Op::Add: {
      auto a = split(e.child(0));
      auto b = split(e.child(1));
      if (!a || !b || a->size() + b->size() > kMaxPairs) return std::nullopt;
      a->insert(a->end(), b->begin(), b->end());
      return merge(std::move(*a));
    }
    case Op::Neg: {
      auto a = split(e.child(0));
      if (!a) return std::nullopt;
      for (auto& p : *a) p.c = -p.c;
      return a;
    }
    case Op::Mul: {
      auto a = split(e.child(0));
      auto b = split(e.child(1));
      if (!a || !b || a->size() * b->size() > kMaxPairs) return std::nullopt;
      Pairs out;
      for (const auto& p : *a)
        for (const auto& q : *b) out.push_back({p.c * q.c, p.h * q.h});
      return merge(std::move(out));
    }
    case Op::Div: {
      auto a = split(e.child(0));
      auto b = split(e.child(1));
      if (!a || !b || b->size() != 1) return std::nullopt;
      for (auto& p : *a) p = {p.c / (*b)[0].c, p.h / (*b)[0].h};
      return a;
    }
    case Op::Pow: {
      auto a = split(e.child(0));
      const double r = e.exponent();
      if (!a || a->size() != 1 || r != std::nearbyint(r)) return std::nullopt;
      return Pairs{{pow((*a)[0].c, r), pow((*a)[0].h, r)}};
    }
    default: return std::nullopt;
  }
}

// The split is an algebraic rewrite; confirm it numerically before trusting it.
bool split_matches(const Expr& e, const Pairs& pairs, int dim) {
  std::vector<Expr> parts;
  for (const auto& p : pairs) parts.push_back(p.c * p.h);
  try {
    return is_zero(e - sum(parts), dim);
  } catch (const DomainError&) {
    return false;
  }
}

void dense_apply(const Expr& e, const GridSpectrum& s, GridFunction& out) {
  Tape tape(e);
  for (std::size_t f = 0; f < out.size(); ++f) {
    const auto x = out.point(f);
    Complex acc = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
      if (s[k] == Complex(0.0, 0.0)) continue;
      const auto kv = s.mode_real(k);
      bool zero = true;
      double phase = 0.0;
      for (int j = 0; j < s.dim(); ++j) {
        zero = zero && kv[j] == 0.0;
        phase += kv[j] * x[j];
      }
      if (zero) continue;
      acc += std::polar(1.0, phase) * tape.run(x, kv)[0] * s[k];
    }
    out[f] += acc;
  }
}

}  // namespace

Expr zero_mode_symbol(const ClassicalSymbol& p) {
  std::vector<Expr> e1(p.dim(), Expr(0.0));
  e1[0] = Expr(1.0);
  std::vector<Expr> parts;
  for (const auto& t : p.terms())
    if (std::abs(t.degree) <= kDegreeTol) parts.push_back(t.expr.substitute({}, e1));
  return sum(parts);
}

GridFunction op_apply(const ClassicalSymbol& p, const GridFunction& u) {
  if (p.dim() != u.dim()) throw DimensionMismatch("symbol and grid dimensions differ");
  const GridSpectrum s = u.spectrum();
  const int n = u.dim();
  const int m = u.points();
  GridFunction out(n, m);

  // Group separable pieces by their xi factor so each multiplier needs one
  // inverse transform.
  std::map<const void*, std::pair<Expr, std::vector<Expr>>> groups;
  std::vector<const void*> order;
  for (const auto& t : p.terms()) {
    auto pairs = split(t.expr);
    if (!pairs || !split_matches(t.expr, *pairs, n)) {
      dense_apply(t.expr, s, out);
      continue;
    }
    for (auto& pr : *pairs) {
      const void* key = pr.h.node();
      auto [it, inserted] = groups.try_emplace(key, pr.h, std::vector<Expr>{});
      if (inserted) order.push_back(key);
      it->second.second.push_back(pr.c);
    }
  }

  for (const void* key : order) {
    const auto& [h, cs] = groups.at(key);
    GridSpectrum weighted(n, m);
    Tape tape(h);
    for (std::size_t k = 1; k < s.size(); ++k) {
      if (s[k] == Complex(0.0, 0.0)) continue;
      weighted[k] = tape.run({}, s.mode_real(k))[0] * s[k];
    }
    const GridFunction w = weighted.inverse();
    const GridFunction c = GridFunction::sample(sum(cs), n, m);
    for (std::size_t f = 0; f < out.size(); ++f) out[f] += c[f] * w[f];
  }

  if (s[0] != Complex(0.0, 0.0)) {
    const Expr c0 = zero_mode_symbol(p);
    if (!c0.is_structural_zero()) {
      const GridFunction c = GridFunction::sample(c0, n, m);
      for (std::size_t f = 0; f < out.size(); ++f) out[f] += c[f] * s[0];
    }
  }
  return out;
}

double sobolev_norm(const GridFunction& u, double s) {
  const GridSpectrum hat = u.spectrum();
  double acc = 0.0;
  for (std::size_t k = 0; k < hat.size(); ++k)
    acc += std::pow(1.0 + hat.k_squared(k), s) * std::norm(hat[k]);
  return std::sqrt(acc);
}

Complex duality_pair(const GridFunction& u, const GridFunction& v) {
  if (!u.same_grid(v)) throw GridMismatch("pairing needs functions on the same lattice");
  const GridSpectrum a = u.spectrum();
  const GridSpectrum b = v.spectrum();
  Complex acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) acc += a[k] * std::conj(b[k]);
  return acc;
}

SobolevTrend sobolev_trend(const Expr& coefficient, double s, const std::vector<int>& points) {
  if (points.size() < 3) throw DomainError("a growth trend needs at least three grid sizes");
  if (coefficient.depends_on_x()) throw DomainError("coefficient must depend on xi1 only");
  SobolevTrend out;
  out.points = points;
  Tape tape(coefficient);
  for (int m : points) {
    GridSpectrum hat(1, m);
    for (std::size_t j = 1; j < hat.size(); ++j) {
      const double k[1] = {static_cast<double>(GridSpectrum::wavenumber(static_cast<int>(j), m))};
      hat[j] = tape.run({}, k)[0];
    }
    out.norms.push_back(sobolev_norm(hat.inverse(), s));
  }
  const std::size_t n = out.norms.size();
  auto sq = [&](std::size_t i) { return out.norms[i] * out.norms[i]; };
  out.increment_ratio = (sq(n - 1) - sq(n - 2)) / (sq(n - 2) - sq(n - 3));
  // A logarithmically divergent tail keeps constant increments per doubling.
  out.bounded = out.increment_ratio < 0.99;
  return out;
}

}  // namespace pdo
