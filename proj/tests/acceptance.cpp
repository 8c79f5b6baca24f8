// One PASS/FAIL line per acceptance criterion; `--only K` runs criterion K.

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pdo/calculus.hpp"
#include "pdo/circle_index.hpp"
#include "pdo/error.hpp"
#include "pdo/hamilton.hpp"
#include "pdo/hodge.hpp"
#include "pdo/oscint.hpp"
#include "pdo/quantize.hpp"

using namespace pdo;

namespace {

const Expr x1 = Expr::x(0), x2 = Expr::x(1);
const Expr xi1 = Expr::xi(0), xi2 = Expr::xi(1), xi3 = Expr::xi(2);
const Expr I = Expr::imag_unit();

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

ClassicalSymbol variable_laplacian(int trunc) {
  ClassicalSymbol p(2, 2.0, trunc);
  p.add((Expr(1.0) + Expr(0.5) * sin(x1)) * (xi1 * xi1 + xi2 * xi2), 2.0);
  return p;
}

// Every term above `above` equals the identity symbol.
bool identity_above(const ClassicalSymbol& s, double above) {
  const ClassicalSymbol diff = s - ClassicalSymbol::identity(s.dim(), s.truncation());
  for (const auto& t : diff.terms())
    if (t.degree > above + kDegreeTol && !is_zero(t)) return false;
  return true;
}

GridFunction band_limited(std::mt19937_64& rng, int dim, int points, int band) {
  std::normal_distribution<double> g;
  GridSpectrum s(dim, points);
  for (std::size_t k = 0; k < s.size(); ++k) {
    bool inside = true;
    for (int c : s.mode(k)) inside = inside && std::abs(c) <= band;
    if (inside) s[k] = Complex(g(rng), g(rng));
  }
  return s.inverse();
}

ClassicalSymbol random_differential(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  auto coef = [&] {
    return Expr(u(rng)) + Expr(u(rng)) * sin(x1) + Expr(u(rng)) * cos(x2) + Expr(u(rng)) * sin(x1 + x2);
  };
  ClassicalSymbol p(2, 2.0, 5);
  p.add(coef() * xi1 * xi1 + coef() * xi1 * xi2 + coef() * xi2 * xi2, 2.0);
  p.add(coef() * xi1 + I * coef() * xi2, 1.0);
  p.add(coef(), 0.0);
  return p;
}

Outcome parametrix_termwise() {
  const ClassicalSymbol p = variable_laplacian(4);
  const ClassicalSymbol q = parametrix(p, 4);
  const bool right = identity_above(compose(p, q), -4.0);
  const bool left = identity_above(compose(q, p), -4.0);
  return {right && left, "PQ-1 " + std::string(right ? "ok" : "nonzero") + ", QP-1 " + (left ? "ok" : "nonzero") +
                             " above degree -4"};
}

Outcome composition_oracle() {
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (int trial = 0; trial < 30; ++trial) {
    const ClassicalSymbol p = random_differential(rng), q = random_differential(rng);
    const GridFunction u = band_limited(rng, 2, 32, 8);
    const GridFunction lhs = op_apply(compose(p, q), u);
    const GridFunction rhs = op_apply(p, op_apply(q, u));
    worst = std::max(worst, (lhs - rhs).max_abs() / rhs.max_abs());
  }
  return {worst <= 1e-10, "max relative difference " + fmt(worst) + " over 30 pairs"};
}

Outcome residual_decay() {
  const ClassicalSymbol p = variable_laplacian(6);
  const std::vector<int> ks{4, 8, 16, 32};
  std::vector<double> bound;
  std::vector<bool> bounded;
  std::ostringstream detail;
  for (int n : {1, 4}) {
    const ClassicalSymbol q = parametrix(p, n);
    std::vector<double> ratio;
    for (int k : ks) {
      const GridFunction u = GridFunction::plane_wave({k, 0}, 128);
      const double res = sobolev_norm(op_apply(q, op_apply(p, u)) - u, 0.0);
      ratio.push_back(res / std::pow(1.0 + k * k, (1.0 - n) / 2.0));
    }
    const double head = *std::max_element(ratio.begin(), ratio.end() - 1);
    bound.push_back(*std::max_element(ratio.begin(), ratio.end()));
    bounded.push_back(std::isfinite(bound.back()) && ratio.back() <= head);
    detail << "N=" << n << " ratios";
    for (double r : ratio) detail << " " << fmt(r);
    detail << "; ";
  }
  detail << "bound N=1 " << fmt(bound[0]) << ", N=4 " << fmt(bound[1]);
  return {bounded[0] && bounded[1] && bound[1] < bound[0], detail.str()};
}

Outcome square_root() {
  const int n_orders = 4;
  ClassicalSymbol lap(2, 2.0, n_orders);
  lap.add(xi1 * xi1 + xi2 * xi2, 2.0);
  const ClassicalSymbol q = sqrt_approx(lap, n_orders);
  bool lap_ok = true;
  const ClassicalSymbol lap_gap = compose(q, q) - lap;
  for (const auto& t : lap_gap.terms())
    if (t.degree > 2.0 - n_orders + kDegreeTol) lap_ok = lap_ok && is_zero(t);

  const ClassicalSymbol l2 = make_lambda_s(2.0, 2, n_orders);
  const ClassicalSymbol r = sqrt_approx(l2, n_orders);
  bool l2_ok = true;
  const ClassicalSymbol l2_gap = compose(r, r) - l2;
  for (const auto& t : l2_gap.terms())
    if (t.degree > 2.0 - n_orders + kDegreeTol) l2_ok = l2_ok && is_zero(t);
  const bool matches = agree_termwise(r, make_lambda_s(1.0, 2, n_orders));
  return {lap_ok && l2_ok && matches, std::string("Laplacian ") + (lap_ok ? "exact" : "residual") + ", <xi>^2 " +
                                          (l2_ok ? "exact" : "residual") + ", matches <xi>^1 " + (matches ? "yes" : "no")};
}

Outcome hamiltonian_conservation() {
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> u(-1, 1);
  double drift = 0.0, group = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
    HomogeneousTerm p;
    if (trial % 2 == 0) {
      p = {(Expr(2.0) + Expr(a) * sin(x1)) * xi1 + (Expr(b) + Expr(0.5 * c) * cos(x2)) * xi2 +
               Expr(0.5 + 0.3 * d) * Expr::norm_xi(2),
           1.0, 2};
    } else {
      p = {(Expr(2.0) + Expr(a) * sin(x2)) * xi1 * xi1 + Expr(b) * cos(x1) * xi1 * xi2 +
               (Expr(1.5) + Expr(c) * cos(x1 + x2)) * xi2 * xi2 - Expr(0.5 * d) * xi2 * xi2,
           2.0, 2};
    }
    const PhasePoint z{{u(rng), u(rng)}, {std::cos(3.0 * a), std::sin(3.0 * a)}};
    const Bicharacteristic g = flow(p, z, 10.0, 1e-10);
    const double p0 = g.samples.front().p_value;
    drift = std::max(drift, g.max_drift() / std::max(1.0, std::abs(p0)));
    const double s = 1.0 + u(rng) * 0.5, t = 2.0 + u(rng) * 0.5;
    const PhasePoint two = flow(p, flow(p, z, t, 1e-10).end(), s, 1e-10).end();
    const PhasePoint one = flow(p, z, s + t, 1e-10).end();
    for (int k = 0; k < 2; ++k)
      group = std::max({group, std::abs(one.x[k] - two.x[k]), std::abs(one.xi[k] - two.xi[k])});
  }
  return {drift <= 1e-6 && group <= 1e-6, "max relative drift " + fmt(drift) + ", group-law error " + fmt(group)};
}

Outcome wavefront_geometry() {
  const HomogeneousTerm p{xi1 * xi1 - xi2 * xi2 - xi3 * xi3, 2.0, 3};
  std::vector<PhasePoint> init;
  for (int k = 0; k < 64; ++k) {
    const double a = 2 * std::numbers::pi * k / 64;
    init.push_back({{0, 0, 0}, {1, std::cos(a), std::sin(a)}});
  }
  // dx1/ds = 2 xi1 = 2, so flow parameter 1/2 reaches time x1 = 1.
  const auto out = propagate_wavefront(p, init, 0.5);
  double dev = 0.0, time_err = 0.0;
  for (const auto& z : out) {
    dev = std::max(dev, std::abs(std::hypot(z.x[1], z.x[2]) - 1.0));
    time_err = std::max(time_err, std::abs(z.x[0] - 1.0));
  }
  return {dev <= 1e-6 && time_err <= 1e-6, "max radial deviation " + fmt(dev) + " at time 1 (time error " +
                                                fmt(time_err) + ")"};
}

Outcome oscillatory_integral() {
  const Amplitude abs_theta{sqrt(xi1 * xi1), true};
  double worst = 0.0;
  for (const TestFunction& psi : {bump(0.3, 0.5), bump(-0.2, 0.7), bump(0.1, 0.9)}) {
    const Complex e = oscint_eval(abs_theta, psi, OscMethod::EpsilonCutoff).value;
    const Complex p = oscint_eval(abs_theta, psi, OscMethod::Parts).value;
    worst = std::max(worst, std::abs(e - p) / std::abs(p));
  }
  const TestFunction psi = bump(0.0, 0.8);
  const double delta = 2 * std::numbers::pi * psi.at(0.0);
  const Amplitude one{Expr(1.0), false};
  const double e1 = std::abs(oscint_eval(one, psi, OscMethod::EpsilonCutoff).value - delta) / delta;
  const double p1 = std::abs(oscint_eval(one, psi, OscMethod::Parts).value - delta) / delta;
  return {worst <= 1e-6 && e1 <= 1e-6 && p1 <= 1e-6, "|theta| methods differ by " + fmt(worst) +
                                                        " relative; a = 1 errors " + fmt(e1) + " / " + fmt(p1)};
}

Outcome sobolev_machinery() {
  std::mt19937_64 rng(88);
  std::uniform_real_distribution<double> us(-3, 3);
  double single = 0.0;
  for (double s : {-2.5, -1.0, 0.0, 0.5, 1.5, 3.0})
    for (const std::vector<int>& k : {std::vector<int>{3, -1}, {0, 0}, {7, 5}}) {
      const double expected = std::pow(1.0 + k[0] * k[0] + k[1] * k[1], s / 2);
      single = std::max(single, std::abs(sobolev_norm(GridFunction::plane_wave(k, 32), s) - expected) / expected);
    }
  ClassicalSymbol d1(2, 1.0, 3);
  d1.add(xi1, 1.0);
  bool derivative = true;
  for (int trial = 0; trial < 50; ++trial) {
    const GridFunction u = band_limited(rng, 2, 32, 12);
    const double s = us(rng);
    derivative = derivative && sobolev_norm(op_apply(d1, u), s - 1) <= sobolev_norm(u, s) * (1 + 1e-12);
  }
  bool duality = true;
  for (int trial = 0; trial < 100; ++trial) {
    const GridFunction u = band_limited(rng, 2, 16, 7), v = band_limited(rng, 2, 16, 7);
    const double s = us(rng);
    duality = duality && std::abs(duality_pair(u, v)) <= sobolev_norm(u, s) * sobolev_norm(v, -s) * (1 + 1e-12);
  }
  double adjoint_gap = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const ClassicalSymbol p = random_differential(rng);
    const GridFunction u = band_limited(rng, 2, 32, 8), v = band_limited(rng, 2, 32, 8);
    const Complex lhs = duality_pair(op_apply(p, u), v);
    const Complex rhs = duality_pair(u, op_apply(adjoint(p), v));
    adjoint_gap = std::max(adjoint_gap, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
  }
  const Expr coeff = Expr(1.0) / sqrt(xi1 * xi1);
  const std::vector<int> sizes{64, 128, 256};
  const auto low = sobolev_trend(coeff, 0.4, sizes);
  const auto high = sobolev_trend(coeff, 0.6, sizes);
  const auto edge = sobolev_trend(coeff, 0.5, sizes);
  const bool classify = low.bounded && !high.bounded && !edge.bounded;
  const bool pass = single <= 1e-13 && derivative && duality && adjoint_gap <= 1e-8 && classify;
  return {pass, "single-mode error " + fmt(single) + ", derivative bound " + (derivative ? "ok" : "violated") +
                    ", duality " + (duality ? "ok" : "violated") + ", adjoint gap " + fmt(adjoint_gap) +
                    ", increment ratios s=0.4 " + fmt(low.increment_ratio) + " s=0.5 " + fmt(edge.increment_ratio) +
                    " s=0.6 " + fmt(high.increment_ratio)};
}

Outcome hodge_suite() {
  double dd = 0.0, adj = 0.0, decomp = 0.0, param = 0.0;
  bool star = true, betti_ok = true;
  std::uint64_t seed = 1;
  for (int n = 1; n <= 3; ++n)
    for (int j = 0; j <= n; ++j) {
      const FormField w = random_form(n, j, 16, 4, seed++);
      if (j + 2 <= n) dd = std::max(dd, ext_d(ext_d(w)).max_abs());
      if (j >= 2) dd = std::max(dd, codifferential(codifferential(w)).max_abs());
      const double sign = (j * (n - j)) % 2 ? -1.0 : 1.0;
      star = star && (hodge_star(hodge_star(w)) - Complex(sign) * w).max_abs() == 0.0;
      if (j < n) {
        const FormField b = random_form(n, j + 1, 16, 4, seed++);
        adj = std::max(adj, std::abs(inner(ext_d(w), b) - inner(w, codifferential(b))));
      }
      const HodgeParts p = hodge_decompose(w);
      decomp = std::max({decomp, (p.harmonic + p.exact + p.coexact - w).max_abs(), std::abs(inner(p.harmonic, p.exact)),
                         std::abs(inner(p.harmonic, p.coexact)), std::abs(inner(p.exact, p.coexact))});
      int binom = 1;
      for (int i = 1; i <= j; ++i) binom = binom * (n - j + i) / i;
      betti_ok = betti_ok && betti(n, j) == binom && betti(n, j) == betti(n, n - j);
      param = std::max(param, complex_parametrix_check(n, j, 50, 8, seed++).max_residual);
    }
  const bool pass = dd <= 1e-12 && star && adj <= 1e-10 && decomp <= 1e-10 && betti_ok && param <= 1e-10;
  return {pass, "d^2/delta^2 " + fmt(dd) + ", ** " + (star ? "exact" : "wrong") + ", adjointness " + fmt(adj) +
                    ", decomposition " + fmt(decomp) + ", betti " + (betti_ok ? "C(n,j)" : "wrong") +
                    ", parametrix residual " + fmt(param)};
}

Outcome circle_index_fit() {
  auto turns = [](int w) {
    const Expr a = Expr(static_cast<double>(w)) * x1;
    return cos(a) + I * sin(a);
  };
  Eigen::MatrixXd design(25, 3);
  Eigen::VectorXd index(25);
  int row = 0;
  for (int wp = -2; wp <= 2; ++wp)
    for (int wm = -2; wm <= 2; ++wm) {
      IndexReport r;
      try {
        r = circle_index((Expr(2.0) + cos(x1)) * turns(wp), (Expr(2.0) + sin(Expr(2.0) * x1)) * turns(wm), 32);
      } catch (const Unstable& e) {
        return {false, e.what()};
      }
      if (r.winding_plus != wp || r.winding_minus != wm) return {false, "winding number mismatch"};
      design.row(row) << 1.0, wp, wm;
      index(row++) = r.index;
    }
  const Eigen::Vector3d c = design.colPivHouseholderQr().solve(index);
  const double residual = (design * c - index).cwiseAbs().maxCoeff();
  auto signed_term = [](double v) { return (v < 0 ? " - " : " + ") + fmt(std::abs(v)); };
  return {residual <= 1e-9, "index = " + fmt(c(0)) + signed_term(c(1)) + " wind(a+)" + signed_term(c(2)) +
                                " wind(a-), fit residual " + fmt(residual) + ", stable K=32..40"};
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int a = 1; a + 1 < argc; ++a)
    if (std::strcmp(argv[a], "--only") == 0) only = std::atoi(argv[a + 1]);

  const std::vector<Criterion> criteria{
      {1, "parametrix termwise correctness", 10, parametrix_termwise},
      {2, "composition exactness oracle", 20, composition_oracle},
      {3, "parametrix residual decay", 30, residual_decay},
      {4, "square root", 10, square_root},
      {5, "Hamiltonian conservation", 10, hamiltonian_conservation},
      {6, "wavefront geometry", 5, wavefront_geometry},
      {7, "oscillatory-integral regularization", 15, oscillatory_integral},
      {8, "Sobolev machinery", 20, sobolev_machinery},
      {9, "Hodge suite", 20, hodge_suite},
      {10, "circle index", 30, circle_index_fit},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    if (only && c.id != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.budget_s;
    const bool pass = o.pass && in_time;
    failures += !pass;
    std::printf("%s [%d] %s (%.2f s of %.0f s): %s\n", pass ? "PASS" : "FAIL", c.id, c.name, secs, c.budget_s,
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failures ? 1 : 0;
}
