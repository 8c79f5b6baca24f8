#include "pdo/hodge.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <random>

#include "pdo/error.hpp"
#include "pdo/quantize.hpp"

namespace pdo {

namespace {

void build_basis(int n, int j, int start, FormIndex& current, std::vector<FormIndex>& out) {
  if (static_cast<int>(current.size()) == j) {
    out.push_back(current);
    return;
  }
  for (int l = start; l < n; ++l) {
    current.push_back(l);
    build_basis(n, j, l + 1, current, out);
    current.pop_back();
  }
}

void check_shape(int n, int j) {
  if (n < 1 || n > 3) throw DimensionMismatch("form dimension must be 1, 2 or 3");
  if (j < 0 || j > n) throw DimensionMismatch("form degree must lie in [0, n]");
}

GridFunction partial(const GridFunction& f, int axis) {
  GridSpectrum s = f.spectrum();
  for (std::size_t m = 0; m < s.size(); ++m) {
    const int k = s.mode(m)[axis];
    // The Nyquist mode has no odd real derivative.
    s[m] *= k == -f.points() / 2 ? Complex(0.0, 0.0) : Complex(0.0, static_cast<double>(k));
  }
  return s.inverse();
}

// Sign of the permutation taking (alpha, complement) to (0, 1, ..., n-1).
int permutation_sign(const FormIndex& alpha, const FormIndex& complement) {
  FormIndex p = alpha;
  p.insert(p.end(), complement.begin(), complement.end());
  int inversions = 0;
  for (std::size_t a = 0; a < p.size(); ++a)
    for (std::size_t b = a + 1; b < p.size(); ++b)
      if (p[a] > p[b]) ++inversions;
  return inversions % 2 ? -1 : 1;
}

FormIndex complement_of(int n, const FormIndex& alpha) {
  FormIndex c;
  for (int l = 0; l < n; ++l)
    if (std::find(alpha.begin(), alpha.end(), l) == alpha.end()) c.push_back(l);
  return c;
}

template <class F>
FormField map_spectra(const FormField& w, F f) {
  FormField out(w.dim(), w.degree(), w.points());
  for (std::size_t s = 0; s < w.slots(); ++s) {
    GridSpectrum hat = w[s].spectrum();
    for (std::size_t m = 0; m < hat.size(); ++m) hat[m] *= f(hat, m);
    out[s] = hat.inverse();
  }
  return out;
}

int binomial(int n, int k) {
  int r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

std::vector<FormIndex> form_basis(int n, int j) {
  check_shape(n, j);
  std::vector<FormIndex> out;
  FormIndex current;
  build_basis(n, j, 0, current, out);
  return out;
}

WedgeResult wedge_front(int l, const FormIndex& alpha) {
  if (std::find(alpha.begin(), alpha.end(), l) != alpha.end()) return {};
  WedgeResult r;
  const auto below = std::count_if(alpha.begin(), alpha.end(), [l](int a) { return a < l; });
  r.sign = below % 2 ? -1 : 1;
  r.target = alpha;
  r.target.insert(r.target.begin() + below, l);
  return r;
}

FormField::FormField(int n, int j, int points) : n_(n), j_(j), points_(points), basis_(form_basis(n, j)) {
  coeffs_.assign(basis_.size(), GridFunction(n, points));
}

FormField::FormField(int n, int j, std::vector<GridFunction> coefficients)
    : n_(n), j_(j), basis_(form_basis(n, j)), coeffs_(std::move(coefficients)) {
  if (coeffs_.size() != basis_.size())
    throw DimensionMismatch("a degree-" + std::to_string(j) + " form on T^" + std::to_string(n) + " needs " +
                            std::to_string(basis_.size()) + " coefficient fields");
  points_ = coeffs_.front().points();
  for (const auto& c : coeffs_)
    if (c.dim() != n || c.points() != points_) throw GridMismatch("coefficient fields must share one grid");
}

FormField FormField::sample(int n, int j, int points, const std::vector<Expr>& coefficients) {
  std::vector<GridFunction> fields;
  for (const auto& e : coefficients) fields.push_back(GridFunction::sample(e, n, points));
  return FormField(n, j, std::move(fields));
}

int FormField::slot_of(const FormIndex& alpha) const {
  const auto it = std::find(basis_.begin(), basis_.end(), alpha);
  return it == basis_.end() ? -1 : static_cast<int>(it - basis_.begin());
}

double FormField::max_abs() const {
  double m = 0.0;
  for (const auto& c : coeffs_) m = std::max(m, c.max_abs());
  return m;
}

bool FormField::same_shape(const FormField& other) const {
  return n_ == other.n_ && j_ == other.j_ && points_ == other.points_;
}

FormField& FormField::operator+=(const FormField& other) {
  if (!same_shape(other)) throw GridMismatch("forms differ in dimension, degree or grid");
  for (std::size_t s = 0; s < coeffs_.size(); ++s) coeffs_[s] += other.coeffs_[s];
  return *this;
}

FormField& FormField::operator-=(const FormField& other) {
  if (!same_shape(other)) throw GridMismatch("forms differ in dimension, degree or grid");
  for (std::size_t s = 0; s < coeffs_.size(); ++s) coeffs_[s] -= other.coeffs_[s];
  return *this;
}

FormField& FormField::operator*=(Complex c) {
  for (auto& f : coeffs_) f *= c;
  return *this;
}

FormField operator+(FormField a, const FormField& b) { return a += b; }
FormField operator-(FormField a, const FormField& b) { return a -= b; }
FormField operator*(Complex c, FormField a) { return a *= c; }

Complex inner(const FormField& a, const FormField& b) {
  if (!a.same_shape(b)) throw GridMismatch("forms differ in dimension, degree or grid");
  Complex acc = 0.0;
  for (std::size_t s = 0; s < a.slots(); ++s) acc += duality_pair(a[s], b[s]);
  return acc;
}

FormField random_form(int n, int j, int points, int band, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  FormField w(n, j, points);
  for (std::size_t s = 0; s < w.slots(); ++s) {
    GridSpectrum hat(n, points);
    for (std::size_t m = 0; m < hat.size(); ++m) {
      const auto k = hat.mode(m);
      if (std::all_of(k.begin(), k.end(), [&](int v) { return std::abs(v) <= band; })) hat[m] = Complex(u(rng), u(rng));
    }
    w[s] = hat.inverse();
  }
  return w;
}

FormField ext_d(const FormField& w) {
  const int n = w.dim();
  if (w.degree() == n) throw TopDegree("d of a top-degree form");
  FormField out(n, w.degree() + 1, w.points());
  for (std::size_t s = 0; s < w.slots(); ++s)
    for (int l = 0; l < n; ++l) {
      const WedgeResult r = wedge_front(l, w.basis()[s]);
      if (r.sign == 0) continue;
      GridFunction d = partial(w[s], l);
      d *= static_cast<double>(r.sign);
      out[out.slot_of(r.target)] += d;
    }
  return out;
}

FormField hodge_star(const FormField& w) {
  const int n = w.dim();
  FormField out(n, n - w.degree(), w.points());
  for (std::size_t s = 0; s < w.slots(); ++s) {
    const FormIndex& alpha = w.basis()[s];
    const FormIndex beta = complement_of(n, alpha);
    GridFunction f = w[s];
    f *= static_cast<double>(permutation_sign(alpha, beta));
    out[out.slot_of(beta)] = std::move(f);
  }
  return out;
}

FormField codifferential(const FormField& w) {
  if (w.degree() == 0) throw BottomDegree("codifferential of a 0-form");
  const int n = w.dim();
  const int j = w.degree() - 1;
  FormField out = hodge_star(ext_d(hodge_star(w)));
  if ((j + 1 + j * (n - j)) % 2) out *= -1.0;
  return out;
}

FormField laplacian(const FormField& w) {
  FormField out(w.dim(), w.degree(), w.points());
  if (w.degree() > 0) out += ext_d(codifferential(w));
  if (w.degree() < w.dim()) out += codifferential(ext_d(w));
  return out;
}

FormField green(const FormField& w) {
  return map_spectra(w, [](const GridSpectrum& s, std::size_t m) {
    const double k2 = s.k_squared(m);
    return k2 == 0.0 ? 0.0 : 1.0 / k2;
  });
}

FormField harmonic_part(const FormField& w) {
  return map_spectra(w, [](const GridSpectrum& s, std::size_t m) { return s.k_squared(m) == 0.0 ? 1.0 : 0.0; });
}

HodgeParts hodge_decompose(const FormField& w) {
  const FormField g = green(w);
  HodgeParts p{harmonic_part(w), FormField(w.dim(), w.degree(), w.points()),
               FormField(w.dim(), w.degree(), w.points())};
  if (w.degree() > 0) p.exact = ext_d(codifferential(g));
  if (w.degree() < w.dim()) p.coexact = codifferential(ext_d(g));
  return p;
}

int betti(int n, int j, int probes, int points, std::uint64_t seed) {
  check_shape(n, j);
  if (probes <= 0) probes = binomial(n, j) + 2;
  FormField shape(n, j, points);
  const auto rows = static_cast<Eigen::Index>(shape.slots() * shape[0].size());
  Eigen::MatrixXcd m(rows, probes);
  for (int p = 0; p < probes; ++p) {
    const FormField h = harmonic_part(random_form(n, j, points, points / 4, seed + static_cast<std::uint64_t>(p)));
    Eigen::Index r = 0;
    for (std::size_t s = 0; s < h.slots(); ++s)
      for (const Complex& v : h[s].values()) m(r++, p) = v;
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > 1e-10 * sv(0)) ++rank;
  return rank;
}

ParametrixReport complex_parametrix_check(int n, int j, int trials, int points, std::uint64_t seed) {
  check_shape(n, j);
  ParametrixReport r{n, j, trials, 0.0};
  for (int t = 0; t < trials; ++t) {
    const FormField w = random_form(n, j, points, points / 4, seed + static_cast<std::uint64_t>(t));
    FormField res = harmonic_part(w) - w;
    if (j > 0) res += ext_d(green(codifferential(w)));
    if (j < n) res += green(codifferential(ext_d(w)));
    r.max_residual = std::max(r.max_residual, res.max_abs());
  }
  return r;
}

}  // namespace pdo
