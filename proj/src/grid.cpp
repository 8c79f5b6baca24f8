#include "pdo/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include "pdo/error.hpp"

namespace pdo {

namespace {

struct PlanCache {
  std::mutex mutex;
  std::map<std::tuple<int, int, int>, fftw_plan> plans;
  ~PlanCache() {
    for (auto& [key, plan] : plans) fftw_destroy_plan(plan);
    fftw_cleanup();
  }
};

// Plans are created once per (dim, M, sign) and reused through the new-array
// execute interface; planning itself is not thread-safe.
fftw_plan plan_for(int dim, int points, int sign) {
  static PlanCache cache;
  std::lock_guard lock(cache.mutex);
  auto& plans = cache.plans;
  auto key = std::make_tuple(dim, points, sign);
  if (auto it = plans.find(key); it != plans.end()) return it->second;
  std::vector<int> dims(dim, points);
  std::size_t total = 1;
  for (int j = 0; j < dim; ++j) total *= static_cast<std::size_t>(points);
  fftw_complex* in = fftw_alloc_complex(total);
  fftw_complex* out = fftw_alloc_complex(total);
  fftw_plan plan = fftw_plan_dft(dim, dims.data(), in, out, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(in);
  fftw_free(out);
  plans.emplace(key, plan);
  return plan;
}

void transform(const std::vector<Complex>& in, std::vector<Complex>& out, int dim, int points, int sign) {
  out.resize(in.size());
  // fftw_execute_dft may not modify a const input for out-of-place complex
  // transforms, but its signature is non-const.
  auto* src = reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in.data()));
  fftw_execute_dft(plan_for(dim, points, sign), src, reinterpret_cast<fftw_complex*>(out.data()));
}

std::size_t lattice_size(int dim, int points) {
  if (dim < 1 || dim > 3) throw DimensionMismatch("grid dimension must be 1, 2 or 3");
  if (points < 2 || (points & (points - 1)) != 0) throw GridMismatch("points per axis must be a power of two");
  std::size_t total = 1;
  for (int j = 0; j < dim; ++j) total *= static_cast<std::size_t>(points);
  return total;
}

void require_same(const GridFunction& a, const GridFunction& b) {
  if (!a.same_grid(b)) throw GridMismatch("grid functions live on different lattices");
}

}  // namespace

GridFunction::GridFunction(int dim, int points)
    : dim_(dim), points_(points), values_(lattice_size(dim, points)) {}

GridFunction GridFunction::sample(const Expr& f, int dim, int points) {
  if (f.depends_on_xi()) throw DomainError("grid samples need an x-only expression");
  GridFunction g(dim, points);
  Tape tape(f);
  for (std::size_t k = 0; k < g.size(); ++k) g[k] = tape.run(g.point(k), {})[0];
  return g;
}

GridFunction GridFunction::plane_wave(const std::vector<int>& k, int points) {
  GridFunction g(static_cast<int>(k.size()), points);
  for (std::size_t f = 0; f < g.size(); ++f) {
    // Exact phase from integer arithmetic: k.x = 2pi (k.j mod M) / M.
    std::size_t rest = f;
    long long phase = 0;
    for (int j = g.dim() - 1; j >= 0; --j) {
      phase += static_cast<long long>(k[j]) * static_cast<long long>(rest % points);
      rest /= points;
    }
    phase %= points;
    const double a = 2.0 * std::numbers::pi * static_cast<double>(phase) / points;
    g[f] = Complex(std::cos(a), std::sin(a));
  }
  return g;
}

std::vector<double> GridFunction::point(std::size_t flat) const {
  std::vector<double> x(dim_);
  for (int j = dim_ - 1; j >= 0; --j) {
    x[j] = 2.0 * std::numbers::pi * static_cast<double>(flat % points_) / points_;
    flat /= points_;
  }
  return x;
}

double GridFunction::max_abs() const {
  double m = 0.0;
  for (const Complex& v : values_) m = std::max(m, std::abs(v));
  return m;
}

GridSpectrum GridFunction::spectrum() const {
  GridSpectrum s(dim_, points_);
  std::vector<Complex> out;
  transform(values_, out, dim_, points_, FFTW_FORWARD);
  const double scale = 1.0 / static_cast<double>(size());
  for (std::size_t k = 0; k < out.size(); ++k) s[k] = out[k] * scale;
  return s;
}

GridFunction& GridFunction::operator+=(const GridFunction& other) {
  require_same(*this, other);
  for (std::size_t k = 0; k < size(); ++k) values_[k] += other.values_[k];
  return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& other) {
  require_same(*this, other);
  for (std::size_t k = 0; k < size(); ++k) values_[k] -= other.values_[k];
  return *this;
}

GridFunction& GridFunction::operator*=(Complex c) {
  for (auto& v : values_) v *= c;
  return *this;
}

GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
GridFunction operator*(Complex c, GridFunction a) { return a *= c; }

GridFunction pointwise(const GridFunction& a, const GridFunction& b) {
  require_same(a, b);
  GridFunction out(a.dim(), a.points());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] * b[k];
  return out;
}

GridSpectrum::GridSpectrum(int dim, int points)
    : dim_(dim), points_(points), coeffs_(lattice_size(dim, points)) {}

std::vector<int> GridSpectrum::mode(std::size_t flat) const {
  std::vector<int> k(dim_);
  for (int j = dim_ - 1; j >= 0; --j) {
    k[j] = wavenumber(static_cast<int>(flat % points_), points_);
    flat /= points_;
  }
  return k;
}

std::vector<double> GridSpectrum::mode_real(std::size_t flat) const {
  auto k = mode(flat);
  return {k.begin(), k.end()};
}

std::size_t GridSpectrum::flat_index(const std::vector<int>& k) const {
  if (static_cast<int>(k.size()) != dim_) throw DimensionMismatch("wavenumber has the wrong dimension");
  std::size_t flat = 0;
  for (int j = 0; j < dim_; ++j) {
    const int r = ((k[j] % points_) + points_) % points_;
    flat = flat * points_ + static_cast<std::size_t>(r);
  }
  return flat;
}

double GridSpectrum::k_squared(std::size_t flat) const {
  double s = 0.0;
  for (int k : mode(flat)) s += static_cast<double>(k) * k;
  return s;
}

GridFunction GridSpectrum::inverse() const {
  GridFunction g(dim_, points_);
  std::vector<Complex> out;
  transform(coeffs_, out, dim_, points_, FFTW_BACKWARD);
  std::copy(out.begin(), out.end(), g.values().begin());
  return g;
}

}  // namespace pdo
