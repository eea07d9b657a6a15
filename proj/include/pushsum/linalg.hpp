#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace pushsum {

/// Upper bound on the bytes a single dense or sparse object may occupy.
inline constexpr std::size_t kDefaultMemoryCapBytes = std::size_t{2} << 30;

/// Dense real matrix, row-major. Value type; all operations are pure.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> d);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  Matrix transpose() const;
  bool all_finite() const;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double s);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(Matrix a, double s);
Matrix operator*(double s, Matrix a);
Matrix operator*(const Matrix& a, const Matrix& b);
std::vector<double> operator*(const Matrix& a, std::span<const double> x);

/// Largest absolute entrywise difference; sizes must agree.
double max_abs_diff(const Matrix& a, const Matrix& b);

/// Kronecker product; block (i, j) of the result is a(i, j) * b.
/// Throws CapacityError when the result would not fit in `cap_bytes`.
Matrix kron(const Matrix& a, const Matrix& b, std::size_t cap_bytes = kDefaultMemoryCapBytes);

/// k-fold Kronecker power; kron_power(a, 0) is the 1x1 identity.
Matrix kron_power(const Matrix& a, unsigned k, std::size_t cap_bytes = kDefaultMemoryCapBytes);

double frobenius_norm(const Matrix& m);

/// I - 11^T/p.
Matrix centering_projection(std::size_t p);

struct SpectralRadius {
  double value = 0.0;
  bool converged = false;
  int doublings = 0;
};

/// Spectral radius by Gelfand's formula, rho = lim ||M^(2^j)||_F^(1/2^j).
///
/// Each squaring is renormalised to unit Frobenius norm and the log of the
/// scale is carried separately, so the iteration neither overflows nor
/// underflows. Iteration stops once two successive estimates agree to
/// `rel_tol`. The log-estimates converge like c / 2^j, so the returned value
/// is the Richardson-extrapolated estimate 2 log e_{j+1} - log e_j, whose
/// distance from the raw estimate is bounded by the stopping difference.
SpectralRadius spectral_radius(const Matrix& m, double rel_tol = 1e-9, int max_doublings = 60);

/// Column-stochastic, entrywise non-negative square matrix.
class ColumnStochasticMatrix {
 public:
  /// Validates non-negativity and unit column sums (absolute tolerance `tol`).
  explicit ColumnStochasticMatrix(Matrix m, double tol = 1e-12);

  const Matrix& matrix() const noexcept { return m_; }
  std::size_t size() const noexcept { return m_.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }

  static bool satisfies(const Matrix& m, double tol = 1e-12);

 private:
  Matrix m_;
};

}  // namespace pushsum
