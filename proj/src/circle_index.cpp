#include "pdo/circle_index.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "pdo/error.hpp"
#include "pdo/grid.hpp"

namespace pdo {

namespace {

constexpr int kSamples = 256;
constexpr double kVanish = 1e-8;
constexpr double kRankTol = 1e-8;
constexpr double kBandTol = 1e-15;

GridFunction checked_samples(const Expr& a, const char* name) {
  if (a.depends_on_xi()) throw DomainError(std::string(name) + " must depend on x1 only");
  GridFunction g = GridFunction::sample(a, 1, kSamples);
  for (std::size_t m = 0; m < g.size(); ++m)
    if (std::abs(g[m]) < kVanish)
      throw SymbolVanishes(std::string(name) + " vanishes near x = " + format_number(g.point(m)[0]));
  return g;
}

int winding_of(const GridFunction& g) {
  double total = 0.0;
  const std::size_t n = g.size();
  for (std::size_t m = 0; m < n; ++m) total += std::arg(g[(m + 1) % n] / g[m]);
  return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
}

struct Coefficients {
  GridSpectrum spectrum;
  Complex operator()(int k) const {
    if (k < -kSamples / 2 || k >= kSamples / 2) return 0.0;
    return spectrum[spectrum.flat_index({k})];
  }
};

int bandwidth_of(const GridSpectrum& s) {
  double peak = 0.0;
  for (std::size_t j = 0; j < s.size(); ++j) peak = std::max(peak, std::abs(s[j]));
  int band = 0;
  for (std::size_t j = 0; j < s.size(); ++j)
    if (std::abs(s[j]) > kBandTol * peak) band = std::max(band, std::abs(GridSpectrum::wavenumber(static_cast<int>(j), kSamples)));
  return band;
}

struct Count {
  int ker = 0;
  int coker = 0;
  std::vector<double> small;
  double smallest_kept = 0.0;
};

// Entry (k, j) of the operator on Fourier modes.
Eigen::MatrixXcd block(const Coefficients& plus, const Coefficients& minus, int row_lo, int row_hi, int col_lo,
                       int col_hi) {
  Eigen::MatrixXcd m(row_hi - row_lo + 1, col_hi - col_lo + 1);
  for (int k = row_lo; k <= row_hi; ++k)
    for (int j = col_lo; j <= col_hi; ++j) m(k - row_lo, j - col_lo) = (j >= 0 ? plus : minus)(k - j);
  return m;
}

// Null space dimension of m (columns minus rank) with the rank threshold
// relative to the largest singular value.
int nullity(const Eigen::MatrixXcd& m, int dimension, Count& count) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  const auto& sv = svd.singularValues();
  const double cut = kRankTol * sv(0);
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cut) {
      ++rank;
      count.smallest_kept = count.smallest_kept == 0.0 ? sv(i) : std::min(count.smallest_kept, sv(i));
    } else {
      count.small.push_back(sv(i));
    }
  }
  return dimension - rank;
}

Count count_at(const Coefficients& plus, const Coefficients& minus, int K, int band) {
  Count c;
  // Columns [-K, K] with every row they reach: kernel vectors supported in
  // the window appear exactly.
  c.ker = nullity(block(plus, minus, -K - band, K + band, -K, K), 2 * K + 1, c);
  // Rows [-K, K] with every column reaching them: the cokernel is the null
  // space of the adjoint of this block.
  c.coker = nullity(block(plus, minus, -K, K, -K - band, K + band).adjoint(), 2 * K + 1, c);
  return c;
}

}  // namespace

int winding_number(const Expr& a, int samples) {
  if (a.depends_on_xi()) throw DomainError("winding number needs an x1-only expression");
  GridFunction g = GridFunction::sample(a, 1, samples);
  for (std::size_t m = 0; m < g.size(); ++m)
    if (std::abs(g[m]) < kVanish) throw SymbolVanishes("expression vanishes on the circle");
  return winding_of(g);
}

IndexReport circle_index(const Expr& a_plus, const Expr& a_minus, int K) {
  if (K < 1) throw DomainError("truncation K must be positive");
  const GridFunction gp = checked_samples(a_plus, "a+");
  const GridFunction gm = checked_samples(a_minus, "a-");
  const Coefficients plus{gp.spectrum()};
  const Coefficients minus{gm.spectrum()};

  IndexReport r;
  r.winding_plus = winding_of(gp);
  r.winding_minus = winding_of(gm);
  r.K = K;
  r.bandwidth = std::max(bandwidth_of(plus.spectrum), bandwidth_of(minus.spectrum));

  const Count c = count_at(plus, minus, K, r.bandwidth);
  r.dim_ker = c.ker;
  r.dim_coker = c.coker;
  r.index = c.ker - c.coker;
  r.small_singular_values = c.small;
  r.smallest_kept = c.smallest_kept;
  const Count check = count_at(plus, minus, K + 8, r.bandwidth);
  r.index_check = check.ker - check.coker;
  if (r.index_check != r.index)
    throw Unstable("index changes from " + std::to_string(r.index) + " at K = " + std::to_string(K) + " to " +
                   std::to_string(r.index_check) + " at K = " + std::to_string(K + 8));
  return r;
}

}  // namespace pdo
