#include <cmath>
#include <numbers>

#include "doctest.h"
#include "pdo/error.hpp"
#include "pdo/expr.hpp"

using namespace pdo;

namespace {
const Expr x1 = Expr::x(0), x2 = Expr::x(1);
const Expr xi1 = Expr::xi(0), xi2 = Expr::xi(1);
const Expr I = Expr::imag_unit();

Complex at(const Expr& e, std::vector<double> x, std::vector<double> xi) { return e.evaluate(x, xi); }
}  // namespace

TEST_CASE("evaluate arithmetic and complex constants") {
  CHECK(at(pow(xi1, 2) + pow(xi2, 2), {0, 0}, {3, 4}) == Complex(25, 0));
  CHECK(at(I * xi1, {0}, {2}) == Complex(0, 2));
  CHECK(at(sin(x1) * xi2 - cos(x2), {1.0, 2.0}, {0, 3}).real() ==
        doctest::Approx(3 * std::sin(1.0) - std::cos(2.0)).epsilon(1e-15));
}

TEST_CASE("singular points raise DomainError") {
  const Expr inv = Expr(1.0) / (pow(xi1, 2) + pow(xi2, 2));
  CHECK_THROWS_AS(at(inv, {0, 0}, {0, 0}), DomainError);
  CHECK_THROWS_AS(at(pow(x1, 0.5), {-1.0}, {1.0}), DomainError);
  CHECK_THROWS_AS(at(sqrt(x1), {-4.0}, {1.0}), DomainError);
  CHECK_THROWS_AS(at(pow(xi1, -1.5), {0.0}, {0.0}), DomainError);
  CHECK(at(pow(x1, 2.0), {-3.0}, {0.0}) == Complex(9, 0));
  CHECK(at(pow(x1, -1.0), {-2.0}, {0.0}) == Complex(-0.5, 0));
}

TEST_CASE("constant folding and neutral elements") {
  CHECK((Expr(2.0) + Expr(3.0)).is_constant(Complex(5, 0)));
  CHECK((xi1 * Expr(0.0)).is_structural_zero());
  CHECK((xi1 * Expr(1.0)).node() == xi1.node());
  CHECK((xi1 + Expr()).node() == xi1.node());
  CHECK((Expr(0.0) / xi1).is_structural_zero());
  CHECK(pow(xi1, 1.0).node() == xi1.node());
  CHECK(pow(xi1, 0.0).is_constant(Complex(1, 0)));
  CHECK((-(-xi1)).node() == xi1.node());
}

TEST_CASE("dependency tracking short-circuits derivatives") {
  const Expr e = sin(x1) * pow(xi2, 2);
  CHECK(e.depends_on({VarKind::X, 0}));
  CHECK_FALSE(e.depends_on({VarKind::X, 1}));
  CHECK(e.depends_on_xi());
  CHECK(e.derivative({VarKind::Xi, 0}).is_structural_zero());
  CHECK(e.derivative({VarKind::X, 1}).is_structural_zero());
}

TEST_CASE("derivatives of every node kind against central differences") {
  const Expr e = sin(x1 * xi1) + cos(x2) * exp(xi2 / (Expr(2.0) + x1)) + sqrt(Expr(1.0) + pow(xi1, 2)) -
                 pow(Expr(3.0) + sin(x2), -1.5) * (I * xi2);
  const std::vector<double> x{0.7, 1.3}, xi{0.4, -0.9};
  const double h = 1e-6;
  for (VarKind kind : {VarKind::X, VarKind::Xi}) {
    for (int j = 0; j < 2; ++j) {
      auto xp = x, xm = x, sp = xi, sm = xi;
      if (kind == VarKind::X) {
        xp[j] += h;
        xm[j] -= h;
      } else {
        sp[j] += h;
        sm[j] -= h;
      }
      const Complex fd = (e.evaluate(xp, sp) - e.evaluate(xm, sm)) / (2 * h);
      const Complex exact = e.derivative({kind, j}).evaluate(x, xi);
      CHECK(std::abs(fd - exact) < 1e-8);
    }
  }
}

TEST_CASE("mixed partials commute") {
  const Expr e = pow(xi1 * xi1 + xi2 * xi2, 0.5) * sin(x1) * exp(x2 * xi1);
  const Expr a = e.derivative({VarKind::X, 0}).derivative({VarKind::Xi, 0});
  const Expr b = e.derivative({VarKind::Xi, 0}).derivative({VarKind::X, 0});
  for (double t : {0.1, 0.9, 2.3}) {
    const std::vector<double> x{t, 1 - t}, xi{std::cos(t), std::sin(t)};
    CHECK(std::abs(a.evaluate(x, xi) - b.evaluate(x, xi)) < 1e-12);
  }
}

TEST_CASE("conjugate flips complex constants only") {
  const Expr e = Expr(Complex(2, 3)) * x1 * Expr::norm_xi(2);
  const Expr c = e.conjugate();
  CHECK(std::abs(c.evaluate(std::vector<double>{1.5, 0}, std::vector<double>{3, 4}) - Complex(15, -22.5)) < 1e-12);
  const Expr r = pow(xi1, 2);
  CHECK(r.conjugate().node() == r.node());
}

TEST_CASE("substitute replaces variables simultaneously") {
  std::vector<Expr> xs{x2, x1};
  const Expr e = x1 - Expr(2.0) * x2;
  const Expr s = e.substitute(xs, {});
  CHECK(s.evaluate(std::vector<double>{1.0, 5.0}, std::vector<double>{0, 0}) == Complex(3, 0));
  std::vector<Expr> xis{Expr(2.0) * xi1};
  CHECK(pow(xi1, 2).substitute({}, xis).evaluate(std::vector<double>{0.0}, std::vector<double>{3.0}) ==
        Complex(36, 0));
}

TEST_CASE("evaluate is bit-identical on repetition and matches the tape") {
  const Expr e = sqrt(pow(xi1, 2) + pow(xi2, 2)) * (Expr(1.0) + Expr(0.5) * sin(x1));
  const std::vector<double> x{0.3, 0.1}, xi{0.6, 0.8};
  const Complex a = e.evaluate(x, xi);
  CHECK(a == e.evaluate(x, xi));
  Tape tape(e);
  CHECK(std::abs(tape.run(x, xi)[0] - a) <= 1e-15);
  CHECK(tape.max_magnitude() >= std::abs(a));
}

TEST_CASE("tape with shared subterms evaluates all roots") {
  const Expr s = sin(x1);
  std::vector<Expr> roots{s * s, s + xi1, Expr(7.0)};
  Tape tape(roots);
  CHECK(tape.root_count() == 3);
  auto v = tape.run(std::vector<double>{1.0}, std::vector<double>{2.0});
  CHECK(v[0].real() == doctest::Approx(std::sin(1.0) * std::sin(1.0)));
  CHECK(v[1].real() == doctest::Approx(std::sin(1.0) + 2.0));
  CHECK(v[2] == Complex(7, 0));
}

TEST_CASE("printing") {
  CHECK(Expr(0.0).to_string() == "0");
  CHECK((x1 - xi1).to_string() == "x1-xi1");
  CHECK(pow(xi1, 2).to_string() == "xi1^2");
  CHECK(I.to_string() == "i");
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(-2.0) == "-2");
}

TEST_CASE("multi-index arithmetic") {
  MultiIndex a({2, 0, 3});
  CHECK(a.order() == 5);
  CHECK(a.factorial() == 12);
  CHECK(MultiIndex({20}).factorial() == 2432902008176640000ULL);
  CHECK(MultiIndex::of_order(2, 3).size() == 4);
  CHECK(MultiIndex::of_order(3, 2).size() == 6);
  CHECK(MultiIndex::of_order(3, 0).size() == 1);
  for (const auto& m : MultiIndex::of_order(3, 4)) CHECK(m.order() == 4);
  CHECK_THROWS(MultiIndex({1, -1}));
}
