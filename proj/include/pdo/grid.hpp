#pragma once

#include <span>
#include <vector>

#include "pdo/expr.hpp"

namespace pdo {

class GridSpectrum;

/// Complex samples on the lattice (2pi/M){0..M-1}^n of the torus, row-major
/// with x_1 the slowest axis.
class GridFunction {
 public:
  GridFunction() = default;
  /// Zero field. M must be a power of two, 1 <= n <= 3.
  GridFunction(int dim, int points);

  /// Samples an x-only expression on the lattice.
  static GridFunction sample(const Expr& f, int dim, int points);
  /// e^{i k.x}.
  static GridFunction plane_wave(const std::vector<int>& k, int points);

  int dim() const { return dim_; }
  int points() const { return points_; }
  std::size_t size() const { return values_.size(); }
  std::span<Complex> values() { return values_; }
  std::span<const Complex> values() const { return values_; }
  Complex& operator[](std::size_t flat) { return values_[flat]; }
  const Complex& operator[](std::size_t flat) const { return values_[flat]; }

  /// Lattice coordinates of a flat index.
  std::vector<double> point(std::size_t flat) const;
  double max_abs() const;
  bool same_grid(const GridFunction& other) const { return dim_ == other.dim_ && points_ == other.points_; }

  GridSpectrum spectrum() const;

  GridFunction& operator+=(const GridFunction& other);
  GridFunction& operator-=(const GridFunction& other);
  GridFunction& operator*=(Complex c);

 private:
  int dim_ = 1;
  int points_ = 0;
  std::vector<Complex> values_;
};

GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator-(GridFunction a, const GridFunction& b);
GridFunction operator*(Complex c, GridFunction a);
/// Pointwise product.
GridFunction pointwise(const GridFunction& a, const GridFunction& b);

/// Coefficients u^(k) = M^{-n} sum_x u(x) e^{-i k.x}, k in {-M/2..M/2-1}^n,
/// stored in transform order (index j holds wavenumber j for j < M/2 and
/// j - M otherwise).
class GridSpectrum {
 public:
  GridSpectrum() = default;
  GridSpectrum(int dim, int points);

  int dim() const { return dim_; }
  int points() const { return points_; }
  std::size_t size() const { return coeffs_.size(); }
  std::span<Complex> coefficients() { return coeffs_; }
  std::span<const Complex> coefficients() const { return coeffs_; }
  Complex& operator[](std::size_t flat) { return coeffs_[flat]; }
  const Complex& operator[](std::size_t flat) const { return coeffs_[flat]; }

  static int wavenumber(int index, int points) { return index < points / 2 ? index : index - points; }
  /// Wavenumber vector of a flat index.
  std::vector<int> mode(std::size_t flat) const;
  std::vector<double> mode_real(std::size_t flat) const;
  /// Flat index of a wavenumber vector (entries reduced modulo M).
  std::size_t flat_index(const std::vector<int>& k) const;
  double k_squared(std::size_t flat) const;

  GridFunction inverse() const;

 private:
  int dim_ = 1;
  int points_ = 0;
  std::vector<Complex> coeffs_;
};

}  // namespace pdo
