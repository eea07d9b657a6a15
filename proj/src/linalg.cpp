#include "pushsum/linalg.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>

#include "pushsum/error.hpp"

namespace pushsum {

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<RowMajor> as_eigen(Matrix& m) {
  return {m.data().data(), static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols())};
}

Eigen::Map<const RowMajor> as_eigen(const Matrix& m) {
  return {m.data().data(), static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols())};
}

std::size_t checked_entries(std::size_t rows, std::size_t cols, std::size_t cap_bytes) {
  constexpr std::size_t max = std::numeric_limits<std::size_t>::max();
  if (rows != 0 && cols > max / rows) {
    throw CapacityError("matrix dimension overflow", max);
  }
  const std::size_t entries = rows * cols;
  if (entries > cap_bytes / sizeof(double)) {
    throw CapacityError("dense " + std::to_string(rows) + "x" + std::to_string(cols) +
                            " matrix exceeds memory cap",
                        entries > max / sizeof(double) ? max : entries * sizeof(double));
  }
  return entries;
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw InvalidInput(std::string(op) + ": shape mismatch");
  }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(checked_entries(rows, cols, std::numeric_limits<std::size_t>::max()), fill) {}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) {
      throw InvalidInput("Matrix: ragged initializer");
    }
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    m(i, i) = 1.0;
  }
  return m;
}

Matrix Matrix::diagonal(std::span<const double> d) {
  Matrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    m(i, i) = d[i];
  }
  return m;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) {
      t(j, i) = (*this)(i, j);
    }
  }
  return t;
}

bool Matrix::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

Matrix& Matrix::operator+=(const Matrix& other) {
  require_same_shape(*this, other, "operator+=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
  require_same_shape(*this, other, "operator-=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(Matrix a, double s) { return a *= s; }
Matrix operator*(double s, Matrix a) { return a *= s; }

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw InvalidInput("matrix product: inner dimensions differ");
  }
  Matrix c(a.rows(), b.cols());
  as_eigen(c).noalias() = as_eigen(a) * as_eigen(b);
  return c;
}

std::vector<double> operator*(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) {
    throw InvalidInput("matrix-vector product: dimension mismatch");
  }
  std::vector<double> y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    const auto r = a.row(i);
    for (std::size_t j = 0; j < x.size(); ++j) s += r[j] * x[j];
    y[i] = s;
  }
  return y;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "max_abs_diff");
  double d = 0.0;
  const auto x = a.data();
  const auto y = b.data();
  for (std::size_t i = 0; i < x.size(); ++i) d = std::max(d, std::abs(x[i] - y[i]));
  return d;
}

Matrix kron(const Matrix& a, const Matrix& b, std::size_t cap_bytes) {
  constexpr std::size_t max = std::numeric_limits<std::size_t>::max();
  if ((a.rows() != 0 && b.rows() > max / a.rows()) || (a.cols() != 0 && b.cols() > max / a.cols())) {
    throw CapacityError("kron: dimension overflow", max);
  }
  const std::size_t rows = a.rows() * b.rows();
  const std::size_t cols = a.cols() * b.cols();
  checked_entries(rows, cols, cap_bytes);
  Matrix c(rows, cols);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const double s = a(i, j);
      if (s == 0.0) continue;
      for (std::size_t k = 0; k < b.rows(); ++k) {
        for (std::size_t l = 0; l < b.cols(); ++l) {
          c(i * b.rows() + k, j * b.cols() + l) = s * b(k, l);
        }
      }
    }
  }
  return c;
}

Matrix kron_power(const Matrix& a, unsigned k, std::size_t cap_bytes) {
  Matrix r = Matrix::identity(1);
  for (unsigned i = 0; i < k; ++i) r = kron(r, a, cap_bytes);
  return r;
}

double frobenius_norm(const Matrix& m) {
  // Scaled accumulation keeps tiny and huge entries representable.
  double scale = 0.0;
  for (double v : m.data()) scale = std::max(scale, std::abs(v));
  if (scale == 0.0 || !std::isfinite(scale)) return scale;
  double s = 0.0;
  for (double v : m.data()) {
    const double r = v / scale;
    s += r * r;
  }
  return scale * std::sqrt(s);
}

Matrix centering_projection(std::size_t p) {
  if (p == 0) throw InvalidInput("centering_projection: p must be positive");
  Matrix m(p, p, -1.0 / static_cast<double>(p));
  for (std::size_t i = 0; i < p; ++i) m(i, i) += 1.0;
  return m;
}

SpectralRadius spectral_radius(const Matrix& m, double rel_tol, int max_doublings) {
  if (!m.square() || m.empty()) throw InvalidInput("spectral_radius: matrix must be square and non-empty");
  if (!m.all_finite()) throw InvalidInput("spectral_radius: non-finite entry");

  const double f0 = frobenius_norm(m);
  if (f0 == 0.0) return {0.0, true, 0};

  // M^(2^j) = exp(log_scale) * x with ||x||_F = 1.
  RowMajor x = as_eigen(m) / f0;
  double log_scale = std::log(f0);
  double prev = log_scale;
  RowMajor sq(x.rows(), x.cols());
  for (int j = 1; j <= max_doublings; ++j) {
    sq.noalias() = x * x;
    const double f = sq.norm();
    if (f == 0.0) return {0.0, true, j};  // nilpotent
    x = sq / f;
    log_scale = 2.0 * log_scale + std::log(f);
    const double cur = std::ldexp(log_scale, -j);
    if (std::abs(cur - prev) <= rel_tol) {
      return {std::exp(2.0 * cur - prev), true, j};
    }
    prev = cur;
  }
  return {std::exp(prev), false, max_doublings};
}

ColumnStochasticMatrix::ColumnStochasticMatrix(Matrix m, double tol) : m_(std::move(m)) {
  if (!satisfies(m_, tol)) {
    throw InvalidInput("matrix is not non-negative column-stochastic");
  }
}

bool ColumnStochasticMatrix::satisfies(const Matrix& m, double tol) {
  if (!m.square() || m.empty() || !m.all_finite()) return false;
  for (std::size_t j = 0; j < m.cols(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (m(i, j) < 0.0) return false;
      s += m(i, j);
    }
    if (std::abs(s - 1.0) > tol) return false;
  }
  return true;
}

}  // namespace pushsum
