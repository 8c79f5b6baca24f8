#include "pdo/oscint.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <tuple>

#include "pdo/error.hpp"
#include "pdo/grid.hpp"

namespace pdo {

namespace {

constexpr double kPi = std::numbers::pi;
// Theta window of the trapezoid sums; covers 2/eps for the smallest eps.
constexpr double kThetaMax = 2560.0;
constexpr int kTransformSize = 1 << 19;
constexpr int kFirstEpsExponent = 4;
constexpr int kLastEpsExponent = 10;

// Trapezoid sums in x with step h = pi/kThetaMax, zero-padded to one
// transform: F(theta_j) = h sum_m f(x_m) e^{i x_m theta_j} on the grid
// theta_j = j * dtheta, dtheta = 2pi/(L h).
struct ThetaGrid {
  double h = kPi / kThetaMax;
  double dtheta = 2.0 * kPi / (kTransformSize * (kPi / kThetaMax));
  std::vector<double> theta;

  ThetaGrid() : theta(kTransformSize) {
    for (int j = 0; j < kTransformSize; ++j) theta[j] = GridSpectrum::wavenumber(j, kTransformSize) * dtheta;
  }

  std::vector<Complex> fourier(const std::function<Complex(double)>& f, double lo, double hi) const {
    GridSpectrum buffer(1, kTransformSize);
    const auto count = static_cast<std::size_t>(std::ceil((hi - lo) / h));
    if (count >= static_cast<std::size_t>(kTransformSize)) throw DomainError("test function support is too wide");
    for (std::size_t m = 1; m < count; ++m) {
      const double x = lo + static_cast<double>(m) * h;
      if (x < hi) buffer[m] = f(x);
    }
    const GridFunction sums = buffer.inverse();
    std::vector<Complex> out(kTransformSize);
    for (int j = 0; j < kTransformSize; ++j) out[j] = h * std::polar(1.0, lo * theta[j]) * sums[j];
    return out;
  }
};

const ThetaGrid& theta_grid() {
  static const ThetaGrid grid;
  return grid;
}

// 1 on |theta| <= inner, 0 on |theta| >= outer.
double plateau(double theta, double inner, double outer, CutoffProfile profile) {
  const double r = std::abs(theta);
  if (r <= inner) return 1.0;
  if (r >= outer) return 0.0;
  return smooth_step((outer - r) / (outer - inner), profile);
}

class AmplitudeEval {
 public:
  explicit AmplitudeEval(const Amplitude& a) : tape_(a.a), excise_(a.excise) {
    if (a.a.depends_on_x()) throw DomainError("amplitude must depend on theta (xi1) only");
  }

  Complex excised(double theta) {
    const double keep = excise_ ? 1.0 - plateau(theta, 0.5, 1.0, CutoffProfile::Exponential) : 1.0;
    if (keep == 0.0) return 0.0;
    return keep * raw(theta);
  }

  Complex raw(double theta) {
    const double xi[1] = {theta};
    return tape_.run({}, xi)[0];
  }

 private:
  Tape tape_;
  bool excise_;
};

std::vector<double> poly_derivative(const std::vector<double>& p) {
  if (p.size() <= 1) return {0.0};
  std::vector<double> d(p.size() - 1);
  for (std::size_t k = 1; k < p.size(); ++k) d[k - 1] = static_cast<double>(k) * p[k];
  return d;
}

std::vector<double> poly_add(std::vector<double> a, const std::vector<double>& b, double scale = 1.0) {
  if (a.size() < b.size()) a.resize(b.size(), 0.0);
  for (std::size_t k = 0; k < b.size(); ++k) a[k] += scale * b[k];
  return a;
}

std::vector<double> poly_shift(const std::vector<double>& p, int by) {
  std::vector<double> out(by, 0.0);
  out.insert(out.end(), p.begin(), p.end());
  return out;
}

double poly_eval(const std::vector<double>& p, double x) {
  double acc = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
  return acc;
}

// N(x) (1+x^2)^{-k} psi^{(q)}(x) theta^{-e} A_p(theta); the common factor
// i^r is applied at the end.
using TermKey = std::tuple<int, int, int, int>;  // k, q, e, p

std::map<TermKey, std::vector<double>> apply_transpose(int r) {
  std::map<TermKey, std::vector<double>> terms{{{0, 0, 0, 0}, {1.0}}};
  for (int step = 0; step < r; ++step) {
    std::map<TermKey, std::vector<double>> next;
    auto add = [&](TermKey key, const std::vector<double>& poly) { next[key] = poly_add(next[key], poly); };
    for (const auto& [key, n] : terms) {
      const auto [k, q, e, p] = key;
      // (1/theta) d/dx (f / (1+x^2))
      const auto t1 = poly_add(poly_add(poly_derivative(n), poly_shift(poly_derivative(n), 2)), poly_shift(n, 1),
                               -2.0 * (k + 1));
      add({k + 2, q, e + 1, p}, t1);
      add({k + 1, q + 1, e + 1, p}, n);
      // (x/(1+x^2)) d/dtheta f
      std::vector<double> t3 = poly_shift(n, 1);
      for (auto& c : t3) c *= -static_cast<double>(e);
      if (e != 0) add({k + 1, q, e + 1, p}, t3);
      add({k + 1, q, e, p + 1}, poly_shift(n, 1));
    }
    terms = std::move(next);
  }
  return terms;
}

OscResult epsilon_method(const Amplitude& amplitude, const TestFunction& psi, const OscOptions& options) {
  const ThetaGrid& grid = theta_grid();
  const auto big_psi = grid.fourier([&](double x) { return Complex(psi.at(x), 0.0); }, psi.lo, psi.hi);
  AmplitudeEval a(amplitude);
  const double reach = 2.0 * std::ldexp(1.0, kLastEpsExponent);
  std::vector<Complex> weighted(kTransformSize, 0.0);
  for (int j = 0; j < kTransformSize; ++j)
    if (std::abs(grid.theta[j]) < reach) weighted[j] = a.excised(grid.theta[j]) * big_psi[j];

  OscResult out;
  out.method = OscMethod::EpsilonCutoff;
  for (int e = kFirstEpsExponent; e <= kLastEpsExponent; ++e) {
    const double eps = std::ldexp(1.0, -e);
    Complex acc = 0.0;
    for (int j = 0; j < kTransformSize; ++j) {
      if (weighted[j] == Complex(0.0, 0.0)) continue;
      const double chi = plateau(eps * grid.theta[j], 1.0, 2.0, options.profile);
      if (chi != 0.0) acc += chi * weighted[j];
    }
    out.sequence.push_back(acc * grid.dtheta);
  }

  // Richardson extrapolation in eps with ratio 2.
  const std::size_t n = out.sequence.size();
  std::vector<std::vector<Complex>> table(n);
  for (std::size_t j = 0; j < n; ++j) {
    table[j].push_back(out.sequence[j]);
    for (std::size_t l = 1; l <= j; ++l) {
      const double factor = std::ldexp(1.0, static_cast<int>(l)) - 1.0;
      table[j].push_back(table[j][l - 1] + (table[j][l - 1] - table[j - 1][l - 1]) / factor);
    }
  }
  // Use the column whose last two entries agree best; extrapolating a
  // super-polynomially small error only amplifies the coarse terms.
  std::size_t best = 0;
  for (std::size_t l = 1; l + 1 < n; ++l)
    if (std::abs(table[n - 1][l] - table[n - 2][l]) < std::abs(table[n - 1][best] - table[n - 2][best])) best = l;
  out.value = table[n - 1][best];
  out.cauchy_gap = std::abs(table[n - 1][best] - table[n - 2][best]);
  if (!(out.cauchy_gap <= options.tol * std::max(1.0, std::abs(out.value))))
    throw NonConvergent("epsilon sequence fails its Cauchy test (gap " + format_number(out.cauchy_gap) + ")");
  return out;
}

OscResult parts_method(const Amplitude& amplitude, const TestFunction& psi, const OscOptions& options) {
  const ThetaGrid& grid = theta_grid();
  const double m = std::isnan(options.order) ? estimate_order(amplitude.a) : options.order;
  const int r = std::max(0, static_cast<int>(std::floor(m + 1e-6)) + 2);

  // phi0 a part, integrated directly over |theta| < 2.
  AmplitudeEval a(amplitude);
  const auto big_psi = grid.fourier([&](double x) { return Complex(psi.at(x), 0.0); }, psi.lo, psi.hi);
  Complex inner = 0.0;
  for (int j = 0; j < kTransformSize; ++j) {
    const double t = grid.theta[j];
    const double phi0 = plateau(t, 1.0, 2.0, CutoffProfile::Exponential);
    if (phi0 != 0.0) inner += phi0 * a.excised(t) * big_psi[j];
  }
  inner *= grid.dtheta;

  const auto terms = apply_transpose(r);
  int max_p = 0, max_q = 0;
  for (const auto& [key, poly] : terms) {
    max_q = std::max(max_q, std::get<1>(key));
    max_p = std::max(max_p, std::get<3>(key));
  }

  // A_p = d^p/dtheta^p [(1 - phi0) a] on each side of the origin; the
  // excision cutoff is identically 0 for |theta| >= 1.
  const Expr theta = Expr::xi(0);
  std::vector<Tape> far, rise_pos, rise_neg;
  Expr f_far = amplitude.a;
  Expr f_pos = (Expr(1.0) - smooth_step_expr(Expr(2.0) - theta)) * amplitude.a;
  Expr f_neg = (Expr(1.0) - smooth_step_expr(Expr(2.0) + theta)) * amplitude.a;
  for (int p = 0; p <= max_p; ++p) {
    far.emplace_back(f_far);
    rise_pos.emplace_back(f_pos);
    rise_neg.emplace_back(f_neg);
    f_far = f_far.derivative({VarKind::Xi, 0});
    f_pos = f_pos.derivative({VarKind::Xi, 0});
    f_neg = f_neg.derivative({VarKind::Xi, 0});
  }
  auto a_p = [&](int p, double t) -> Complex {
    const double xi[1] = {t};
    const double r_abs = std::abs(t);
    if (r_abs <= 1.0) return 0.0;
    if (r_abs >= 2.0) return far[p].run({}, xi)[0];
    return (t > 0 ? rise_pos[p] : rise_neg[p]).run({}, xi)[0];
  };

  std::vector<Tape> psi_derivs;
  Expr d = psi.profile;
  for (int q = 0; q <= max_q; ++q) {
    psi_derivs.emplace_back(d);
    d = d.derivative({VarKind::X, 0});
  }

  Complex outer = 0.0;
  for (const auto& [key, poly] : terms) {
    const auto [k, q, e, p] = key;
    bool zero = true;
    for (double c : poly) zero = zero && c == 0.0;
    if (zero) continue;
    const auto g = grid.fourier(
        [&](double x) {
          const double xs[1] = {x};
          return poly_eval(poly, x) * std::pow(1.0 + x * x, -k) * psi_derivs[q].run(xs, {})[0];
        },
        psi.lo, psi.hi);
    Complex acc = 0.0;
    for (int j = 0; j < kTransformSize; ++j) {
      const double t = grid.theta[j];
      if (std::abs(t) <= 1.0) continue;
      acc += std::pow(t, -e) * a_p(p, t) * g[j];
    }
    outer += acc * grid.dtheta;
  }
  Complex i_power(1.0, 0.0);
  for (int s = 0; s < r; ++s) i_power *= Complex(0.0, 1.0);

  OscResult out;
  out.method = OscMethod::Parts;
  out.value = inner + i_power * outer;
  out.applications = r;
  out.order = m;
  return out;
}

}  // namespace

double TestFunction::at(double x) const {
  if (x <= lo || x >= hi) return 0.0;
  const double xs[1] = {x};
  return profile.evaluate(xs, {}).real();
}

TestFunction bump(double center, double radius) {
  const Expr u = (Expr::x(0) - Expr(center)) / Expr(radius);
  return {exp(Expr(-1.0) / (Expr(1.0) - u * u)), center - radius, center + radius};
}

double smooth_step(double t, CutoffProfile profile) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = profile == CutoffProfile::Exponential ? std::exp(-1.0 / t) : std::exp(-1.0 / (t * t));
  const double s = 1.0 - t;
  const double b = profile == CutoffProfile::Exponential ? std::exp(-1.0 / s) : std::exp(-1.0 / (s * s));
  return a / (a + b);
}

Expr smooth_step_expr(const Expr& t, CutoffProfile profile) {
  const Expr s = Expr(1.0) - t;
  const Expr a = profile == CutoffProfile::Exponential ? exp(Expr(-1.0) / t) : exp(Expr(-1.0) / (t * t));
  const Expr b = profile == CutoffProfile::Exponential ? exp(Expr(-1.0) / s) : exp(Expr(-1.0) / (s * s));
  return a / (a + b);
}

double estimate_order(const Expr& a) {
  const double t1[1] = {std::ldexp(1.0, 20)};
  const double t2[1] = {std::ldexp(1.0, 21)};
  const double v1 = std::abs(a.evaluate({}, t1));
  const double v2 = std::abs(a.evaluate({}, t2));
  if (v1 == 0.0 || v2 == 0.0) return 0.0;
  return std::log2(v2 / v1);
}

OscResult oscint_eval(const Amplitude& amplitude, const TestFunction& psi, OscMethod method,
                      const OscOptions& options) {
  if (!(psi.hi > psi.lo)) throw DomainError("test function support is empty");
  if (psi.profile.depends_on_xi()) throw DomainError("test function must depend on x1 only");
  if (amplitude.a.depends_on_x()) throw DomainError("amplitude must depend on theta (xi1) only");
  return method == OscMethod::EpsilonCutoff ? epsilon_method(amplitude, psi, options)
                                            : parts_method(amplitude, psi, options);
}

}  // namespace pdo
