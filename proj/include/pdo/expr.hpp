#pragma once

// Expression trees over phase-space variables (x_1..x_n, xi_1..xi_n).
//
// An Expr is an immutable handle to a node in a shared DAG. Construction
// performs constant folding and neutral-element elimination only; semantic
// equality is decided numerically (see symbol.hpp, is_zero).

#include <complex>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace pdo {

using Complex = std::complex<double>;

inline constexpr int kMaxDim = 16;

enum class VarKind : std::uint8_t { X, Xi };

struct Var {
  VarKind kind = VarKind::X;
  int index = 0;  // zero-based

  friend bool operator==(const Var&, const Var&) = default;
};

enum class Op : std::uint8_t { Const, Var, Add, Mul, Neg, Div, Pow, Sin, Cos, Exp, Sqrt };

namespace detail {
struct Node;
}

class Expr {
 public:
  /// The constant zero.
  Expr();
  Expr(double value);   // NOLINT(google-explicit-constructor)
  Expr(Complex value);  // NOLINT(google-explicit-constructor)

  static Expr constant(Complex value) { return Expr(value); }
  static Expr var(Var v);
  static Expr x(int index) { return var({VarKind::X, index}); }
  static Expr xi(int index) { return var({VarKind::Xi, index}); }
  static Expr imag_unit() { return Expr(Complex(0.0, 1.0)); }
  /// |xi| = sqrt(xi_1^2 + ... + xi_n^2).
  static Expr norm_xi(int dim);

  Op op() const;
  int arity() const;
  Expr child(int k) const;
  Complex value() const;    // Const only
  Var variable() const;     // Var only
  double exponent() const;  // Pow only

  bool is_constant() const { return op() == Op::Const; }
  bool is_constant(Complex c) const { return is_constant() && value() == c; }
  bool is_structural_zero() const { return is_constant(Complex(0.0, 0.0)); }

  bool depends_on(Var v) const;
  bool depends_on_x() const;
  bool depends_on_xi() const;

  /// Plain partial derivative d/dv (no 1/i factor).
  Expr derivative(Var v) const;
  /// Complex conjugate of every constant; variables are real.
  Expr conjugate() const;
  /// Replaces each variable v with replacement(v) when provided.
  Expr substitute(std::span<const Expr> x_replacement, std::span<const Expr> xi_replacement) const;

  /// Exact tree evaluation. Throws DomainError at singular points.
  Complex evaluate(std::span<const double> x, std::span<const double> xi) const;

  std::size_t node_count() const;
  std::string to_string() const;

  const detail::Node* node() const { return node_.get(); }

 private:
  explicit Expr(std::shared_ptr<const detail::Node> node) : node_(std::move(node)) {}
  friend Expr make_node(Op, std::vector<Expr>, Complex, Var, double);

  std::shared_ptr<const detail::Node> node_;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);

Expr pow(const Expr& base, double exponent);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr exp(const Expr& a);
Expr sqrt(const Expr& a);

/// Sum of a list of expressions (zero when empty).
Expr sum(std::span<const Expr> terms);

/// Shortest decimal text that round-trips the double.
std::string format_number(double value);

/// Flat, compiled form of one or more expressions sharing subterms.
///
/// A Tape owns scratch registers, so one instance must not be run from
/// several threads at once; compile one per thread instead.
class Tape {
 public:
  Tape() = default;
  explicit Tape(std::span<const Expr> roots);
  explicit Tape(const Expr& root);

  /// Evaluates all roots at (x, xi); the returned view stays valid until the
  /// next call.
  std::span<const Complex> run(std::span<const double> x, std::span<const double> xi);
  /// Largest node magnitude seen in the most recent run.
  double max_magnitude() const { return max_magnitude_; }
  std::size_t size() const { return code_.size(); }
  std::size_t root_count() const { return roots_.size(); }

 private:
  struct Instr {
    Op op;
    std::uint32_t a = 0;
    std::uint32_t b = 0;
    Complex value{};
    Var var{};
    double exponent = 0.0;
  };
  std::vector<Instr> code_;
  std::vector<std::uint32_t> roots_;
  std::vector<Complex> regs_;
  std::vector<Complex> out_;
  double max_magnitude_ = 0.0;
};

/// Multi-index alpha = (alpha_1, ..., alpha_n), all entries >= 0.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> entries);
  static MultiIndex zero(int dim) { return MultiIndex(std::vector<int>(dim, 0)); }

  int dim() const { return static_cast<int>(entries_.size()); }
  int operator[](int k) const { return entries_[k]; }
  const std::vector<int>& entries() const { return entries_; }
  /// |alpha| = alpha_1 + ... + alpha_n.
  int order() const;
  /// alpha! = alpha_1! ... alpha_n!, exact for |alpha| <= 20.
  std::uint64_t factorial() const;

  /// All multi-indices of the given dimension with |alpha| == order, in a
  /// fixed deterministic order.
  static std::vector<MultiIndex> of_order(int dim, int order);

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;

 private:
  std::vector<int> entries_;
};

}  // namespace pdo
