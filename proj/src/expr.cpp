#include "pdo/expr.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <functional>
#include <numeric>
#include <unordered_map>

#include "pdo/error.hpp"

namespace pdo {

namespace detail {

struct Node {
  Op op = Op::Const;
  Complex value{};
  Var var{};
  double exponent = 0.0;
  std::vector<Expr> children;
  std::uint32_t x_mask = 0;
  std::uint32_t xi_mask = 0;
};

}  // namespace detail

namespace {

using detail::Node;

constexpr double kSingularTol = 1e-14;

bool is_integer(double r) { return std::isfinite(r) && r == std::nearbyint(r); }

Complex checked_div(Complex num, Complex den) {
  if (std::abs(den) < kSingularTol) throw DomainError("quotient denominator vanishes");
  return num / den;
}

Complex int_pow(Complex base, long long n) {
  bool invert = n < 0;
  unsigned long long e = invert ? static_cast<unsigned long long>(-n) : static_cast<unsigned long long>(n);
  Complex result(1.0, 0.0);
  Complex b = base;
  while (e != 0) {
    if (e & 1ULL) result *= b;
    b *= b;
    e >>= 1;
  }
  return invert ? checked_div(Complex(1.0, 0.0), result) : result;
}

bool negative_real(Complex z) { return z.real() < 0.0 && std::abs(z.imag()) <= kSingularTol * std::abs(z.real()); }

Complex checked_pow(Complex base, double r) {
  if (is_integer(r) && std::abs(r) <= 64.0) return int_pow(base, static_cast<long long>(r));
  if (negative_real(base)) throw DomainError("fractional power of a negative base");
  if (std::abs(base) < kSingularTol) {
    if (r < 0.0) throw DomainError("negative power of zero");
    return Complex(0.0, 0.0);
  }
  if (base.imag() == 0.0) return Complex(std::pow(base.real(), r), 0.0);
  return std::pow(base, r);
}

Complex checked_sqrt(Complex z) {
  if (negative_real(z)) throw DomainError("square root of a negative base");
  if (z.imag() == 0.0) return Complex(std::sqrt(z.real()), 0.0);
  return std::sqrt(z);
}

Complex apply_unary(Op op, Complex a) {
  const bool real = a.imag() == 0.0;
  switch (op) {
    case Op::Sin: return real ? Complex(std::sin(a.real()), 0.0) : std::sin(a);
    case Op::Cos: return real ? Complex(std::cos(a.real()), 0.0) : std::cos(a);
    case Op::Exp: return real ? Complex(std::exp(a.real()), 0.0) : std::exp(a);
    case Op::Sqrt: return checked_sqrt(a);
    case Op::Neg: return -a;
    default: break;
  }
  throw std::logic_error("apply_unary: not a unary op");
}

std::uint32_t bit(int index) { return std::uint32_t{1} << index; }

}  // namespace

Expr make_node(Op op, std::vector<Expr> children, Complex value, Var var, double exponent) {
  auto node = std::make_shared<Node>();
  node->op = op;
  node->value = value;
  node->var = var;
  node->exponent = exponent;
  for (const Expr& c : children) {
    node->x_mask |= c.node()->x_mask;
    node->xi_mask |= c.node()->xi_mask;
  }
  node->children = std::move(children);
  if (op == Op::Var) {
    if (var.index < 0 || var.index >= kMaxDim) throw DimensionMismatch("variable index out of range");
    (var.kind == VarKind::X ? node->x_mask : node->xi_mask) = bit(var.index);
  }
  return Expr(std::shared_ptr<const Node>(std::move(node)));
}

Expr::Expr() : Expr(Complex(0.0, 0.0)) {}
Expr::Expr(double value) : Expr(Complex(value, 0.0)) {}
Expr::Expr(Complex value) {
  // Normalise signed zeros so printing and folding stay canonical.
  if (value.real() == 0.0) value.real(0.0);
  if (value.imag() == 0.0) value.imag(0.0);
  *this = make_node(Op::Const, {}, value, {}, 0.0);
}

Expr Expr::var(Var v) { return make_node(Op::Var, {}, {}, v, 0.0); }

Expr Expr::norm_xi(int dim) {
  std::vector<Expr> squares;
  for (int j = 0; j < dim; ++j) squares.push_back(pdo::pow(xi(j), 2.0));
  return pdo::sqrt(sum(squares));
}

Op Expr::op() const { return node_->op; }

int Expr::arity() const {
  switch (node_->op) {
    case Op::Const:
    case Op::Var: return 0;
    case Op::Add:
    case Op::Mul:
    case Op::Div: return 2;
    default: return 1;
  }
}

Expr Expr::child(int k) const { return node_->children.at(k); }
Complex Expr::value() const { return node_->value; }
Var Expr::variable() const { return node_->var; }
double Expr::exponent() const { return node_->exponent; }

bool Expr::depends_on(Var v) const {
  return ((v.kind == VarKind::X ? node_->x_mask : node_->xi_mask) & bit(v.index)) != 0;
}
bool Expr::depends_on_x() const { return node_->x_mask != 0; }
bool Expr::depends_on_xi() const { return node_->xi_mask != 0; }

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_structural_zero()) return b;
  if (b.is_structural_zero()) return a;
  if (a.is_constant() && b.is_constant()) return Expr(a.value() + b.value());
  return make_node(Op::Add, {a, b}, {}, {}, 0.0);
}

Expr operator-(const Expr& a) {
  if (a.is_constant()) return Expr(-a.value());
  if (a.op() == Op::Neg) return a.child(0);
  return make_node(Op::Neg, {a}, {}, {}, 0.0);
}

Expr operator-(const Expr& a, const Expr& b) {
  if (b.is_structural_zero()) return a;
  if (a.is_structural_zero()) return -b;
  if (a.is_constant() && b.is_constant()) return Expr(a.value() - b.value());
  return a + (-b);
}

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_structural_zero() || b.is_structural_zero()) return Expr();
  if (a.is_constant(1.0)) return b;
  if (b.is_constant(1.0)) return a;
  if (a.is_constant(-1.0)) return -b;
  if (b.is_constant(-1.0)) return -a;
  if (a.is_constant() && b.is_constant()) return Expr(a.value() * b.value());
  return make_node(Op::Mul, {a, b}, {}, {}, 0.0);
}

Expr operator/(const Expr& a, const Expr& b) {
  if (b.is_constant()) {
    if (std::abs(b.value()) < kSingularTol) throw DomainError("division by constant zero");
    if (b.is_constant(1.0)) return a;
    if (a.is_constant()) return Expr(a.value() / b.value());
  }
  if (a.is_structural_zero()) return Expr();
  return make_node(Op::Div, {a, b}, {}, {}, 0.0);
}

Expr pow(const Expr& base, double exponent) {
  if (exponent == 0.0) return Expr(1.0);
  if (exponent == 1.0) return base;
  if (base.is_constant()) return Expr(checked_pow(base.value(), exponent));
  if (base.op() == Op::Pow && is_integer(base.exponent()) && is_integer(exponent))
    return pow(base.child(0), base.exponent() * exponent);
  return make_node(Op::Pow, {base}, {}, {}, exponent);
}

namespace {
Expr unary(Op op, const Expr& a) {
  if (a.is_constant()) return Expr(apply_unary(op, a.value()));
  return make_node(op, {a}, {}, {}, 0.0);
}
}  // namespace

Expr sin(const Expr& a) { return unary(Op::Sin, a); }
Expr cos(const Expr& a) { return unary(Op::Cos, a); }
Expr exp(const Expr& a) { return unary(Op::Exp, a); }
Expr sqrt(const Expr& a) { return unary(Op::Sqrt, a); }

Expr sum(std::span<const Expr> terms) {
  Expr total;
  for (const Expr& t : terms) total = total + t;
  return total;
}

Expr Expr::derivative(Var v) const {
  std::unordered_map<const Node*, Expr> memo;
  std::function<Expr(const Expr&)> diff = [&](const Expr& e) -> Expr {
    if (!e.depends_on(v)) return Expr();
    if (auto it = memo.find(e.node()); it != memo.end()) return it->second;
    Expr result;
    switch (e.op()) {
      case Op::Const: result = Expr(); break;
      case Op::Var: result = Expr(e.variable() == v ? 1.0 : 0.0); break;
      case Op::Add: result = diff(e.child(0)) + diff(e.child(1)); break;
      case Op::Neg: result = -diff(e.child(0)); break;
      case Op::Mul: result = diff(e.child(0)) * e.child(1) + e.child(0) * diff(e.child(1)); break;
      case Op::Div: {
        // d(a/b) = (da - (a/b) db) / b
        Expr db = diff(e.child(1));
        result = (diff(e.child(0)) - e * db) / e.child(1);
        break;
      }
      case Op::Pow: {
        const double r = e.exponent();
        result = Expr(r) * pow(e.child(0), r - 1.0) * diff(e.child(0));
        break;
      }
      case Op::Sin: result = cos(e.child(0)) * diff(e.child(0)); break;
      case Op::Cos: result = -(sin(e.child(0)) * diff(e.child(0))); break;
      case Op::Exp: result = e * diff(e.child(0)); break;
      case Op::Sqrt: result = diff(e.child(0)) / (Expr(2.0) * e); break;
    }
    memo.emplace(e.node(), result);
    return result;
  };
  return diff(*this);
}

namespace {

Expr rebuild(const Expr& e, std::vector<Expr> kids) {
  bool unchanged = true;
  for (int k = 0; k < e.arity(); ++k) unchanged = unchanged && kids[k].node() == e.child(k).node();
  if (unchanged) return e;
  switch (e.op()) {
    case Op::Add: return kids[0] + kids[1];
    case Op::Mul: return kids[0] * kids[1];
    case Op::Div: return kids[0] / kids[1];
    case Op::Neg: return -kids[0];
    case Op::Pow: return pow(kids[0], e.exponent());
    case Op::Sin: return sin(kids[0]);
    case Op::Cos: return cos(kids[0]);
    case Op::Exp: return exp(kids[0]);
    case Op::Sqrt: return sqrt(kids[0]);
    default: return e;
  }
}

template <typename Leaf>
Expr transform(const Expr& root, Leaf&& leaf) {
  std::unordered_map<const Node*, Expr> memo;
  std::function<Expr(const Expr&)> go = [&](const Expr& e) -> Expr {
    if (auto it = memo.find(e.node()); it != memo.end()) return it->second;
    Expr result;
    if (e.arity() == 0) {
      result = leaf(e);
    } else {
      std::vector<Expr> kids;
      for (int k = 0; k < e.arity(); ++k) kids.push_back(go(e.child(k)));
      result = rebuild(e, std::move(kids));
    }
    memo.emplace(e.node(), result);
    return result;
  };
  return go(root);
}

}  // namespace

Expr Expr::conjugate() const {
  return transform(*this, [](const Expr& leaf) {
    return leaf.is_constant() && leaf.value().imag() != 0.0 ? Expr(std::conj(leaf.value())) : leaf;
  });
}

Expr Expr::substitute(std::span<const Expr> x_replacement, std::span<const Expr> xi_replacement) const {
  return transform(*this, [&](const Expr& leaf) -> Expr {
    if (leaf.op() != Op::Var) return leaf;
    const Var v = leaf.variable();
    auto table = v.kind == VarKind::X ? x_replacement : xi_replacement;
    if (v.index < static_cast<int>(table.size())) return table[v.index];
    return leaf;
  });
}

Complex Expr::evaluate(std::span<const double> x, std::span<const double> xi) const {
  Tape tape(*this);
  return tape.run(x, xi)[0];
}

std::size_t Expr::node_count() const {
  std::unordered_map<const Node*, bool> seen;
  std::function<void(const Expr&)> walk = [&](const Expr& e) {
    if (!seen.emplace(e.node(), true).second) return;
    for (int k = 0; k < e.arity(); ++k) walk(e.child(k));
  };
  walk(*this);
  return seen.size();
}

// ---------------------------------------------------------------------------
// Printing

std::string format_number(double value) {
  if (value == 0.0) return "0";
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), end);
}

namespace {

// Precedence: 1 additive, 2 multiplicative, 3 unary minus, 4 power, 5 atom.
struct Printed {
  std::string text;
  int prec;
};

Printed print_constant(Complex c) {
  const double re = c.real();
  const double im = c.imag();
  if (im == 0.0) {
    if (re < 0.0) return {"(" + format_number(re) + ")", 5};
    return {format_number(re), 5};
  }
  std::string imag_part = (im == 1.0) ? "i" : (im == -1.0 ? "-i" : format_number(im) + "*i");
  if (re == 0.0) return {im == 1.0 ? imag_part : "(" + imag_part + ")", 5};
  std::string sep = im < 0.0 ? "" : "+";
  return {"(" + format_number(re) + sep + imag_part + ")", 5};
}

Printed print(const Expr& e, std::unordered_map<const Node*, Printed>& memo) {
  if (auto it = memo.find(e.node()); it != memo.end()) return it->second;
  auto wrap = [](const Printed& p, int min_prec) {
    return p.prec >= min_prec ? p.text : "(" + p.text + ")";
  };
  Printed out;
  switch (e.op()) {
    case Op::Const: out = print_constant(e.value()); break;
    case Op::Var: {
      const Var v = e.variable();
      out = {(v.kind == VarKind::X ? "x" : "xi") + std::to_string(v.index + 1), 5};
      break;
    }
    case Op::Add: {
      Printed a = print(e.child(0), memo);
      const Expr& rhs = e.child(1);
      if (rhs.op() == Op::Neg) {
        Printed b = print(rhs.child(0), memo);
        const bool lead_minus = !b.text.empty() && b.text[0] == '-';
        out = {a.text + "-" + (lead_minus ? "(" + b.text + ")" : wrap(b, 2)), 1};
      } else {
        Printed b = print(rhs, memo);
        out = {a.text + "+" + b.text, 1};
      }
      break;
    }
    case Op::Mul: out = {wrap(print(e.child(0), memo), 2) + "*" + wrap(print(e.child(1), memo), 4), 2}; break;
    case Op::Div: out = {wrap(print(e.child(0), memo), 2) + "/" + wrap(print(e.child(1), memo), 4), 2}; break;
    case Op::Neg: out = {"-" + wrap(print(e.child(0), memo), 3), 3}; break;
    case Op::Pow: {
      const double r = e.exponent();
      std::string exponent = format_number(r);
      if (r < 0.0 || !is_integer(r)) exponent = "(" + exponent + ")";
      out = {wrap(print(e.child(0), memo), 5) + "^" + exponent, 4};
      break;
    }
    case Op::Sin: out = {"sin(" + print(e.child(0), memo).text + ")", 5}; break;
    case Op::Cos: out = {"cos(" + print(e.child(0), memo).text + ")", 5}; break;
    case Op::Exp: out = {"exp(" + print(e.child(0), memo).text + ")", 5}; break;
    case Op::Sqrt: out = {"sqrt(" + print(e.child(0), memo).text + ")", 5}; break;
  }
  memo.emplace(e.node(), out);
  return out;
}

}  // namespace

std::string Expr::to_string() const {
  std::unordered_map<const Node*, Printed> memo;
  return print(*this, memo).text;
}

// ---------------------------------------------------------------------------
// Tape

Tape::Tape(const Expr& root) : Tape(std::span<const Expr>(&root, 1)) {}

Tape::Tape(std::span<const Expr> roots) {
  std::unordered_map<const Node*, std::uint32_t> slot;
  std::function<std::uint32_t(const Expr&)> emit = [&](const Expr& e) -> std::uint32_t {
    if (auto it = slot.find(e.node()); it != slot.end()) return it->second;
    Instr ins{e.op()};
    if (e.arity() >= 1) ins.a = emit(e.child(0));
    if (e.arity() == 2) ins.b = emit(e.child(1));
    if (e.op() == Op::Const) ins.value = e.value();
    if (e.op() == Op::Var) ins.var = e.variable();
    if (e.op() == Op::Pow) ins.exponent = e.exponent();
    const auto id = static_cast<std::uint32_t>(code_.size());
    code_.push_back(ins);
    slot.emplace(e.node(), id);
    return id;
  };
  for (const Expr& r : roots) roots_.push_back(emit(r));
  regs_.resize(code_.size());
  out_.resize(roots_.size());
}

std::span<const Complex> Tape::run(std::span<const double> x, std::span<const double> xi) {
  double peak = 0.0;
  for (std::size_t k = 0; k < code_.size(); ++k) {
    const Instr& ins = code_[k];
    Complex v;
    switch (ins.op) {
      case Op::Const: v = ins.value; break;
      case Op::Var: {
        auto src = ins.var.kind == VarKind::X ? x : xi;
        if (ins.var.index >= static_cast<int>(src.size()))
          throw DimensionMismatch("evaluation point has too few coordinates");
        v = Complex(src[ins.var.index], 0.0);
        break;
      }
      case Op::Add: v = regs_[ins.a] + regs_[ins.b]; break;
      case Op::Mul: v = regs_[ins.a] * regs_[ins.b]; break;
      case Op::Div: v = checked_div(regs_[ins.a], regs_[ins.b]); break;
      case Op::Neg: v = -regs_[ins.a]; break;
      case Op::Pow: v = checked_pow(regs_[ins.a], ins.exponent); break;
      default: v = apply_unary(ins.op, regs_[ins.a]); break;
    }
    regs_[k] = v;
    peak = std::max(peak, std::abs(v));
  }
  max_magnitude_ = peak;
  for (std::size_t r = 0; r < roots_.size(); ++r) out_[r] = regs_[roots_[r]];
  return out_;
}

// ---------------------------------------------------------------------------
// MultiIndex

MultiIndex::MultiIndex(std::vector<int> entries) : entries_(std::move(entries)) {
  for (int e : entries_)
    if (e < 0) throw std::invalid_argument("multi-index entries must be non-negative");
}

int MultiIndex::order() const { return std::accumulate(entries_.begin(), entries_.end(), 0); }

std::uint64_t MultiIndex::factorial() const {
  std::uint64_t f = 1;
  for (int e : entries_)
    for (int k = 2; k <= e; ++k) f *= static_cast<std::uint64_t>(k);
  return f;
}

std::vector<MultiIndex> MultiIndex::of_order(int dim, int order) {
  std::vector<MultiIndex> out;
  std::vector<int> cur(dim, 0);
  std::function<void(int, int)> fill = [&](int pos, int left) {
    if (pos == dim - 1) {
      cur[pos] = left;
      out.emplace_back(cur);
      return;
    }
    for (int v = left; v >= 0; --v) {
      cur[pos] = v;
      fill(pos + 1, left - v);
    }
  };
  if (dim == 0) {
    if (order == 0) out.emplace_back(std::vector<int>{});
    return out;
  }
  fill(0, order);
  return out;
}

}  // namespace pdo
