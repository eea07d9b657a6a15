#include <cmath>
#include <random>

#include "doctest.h"
#include "pushsum/error.hpp"
#include "pushsum/linalg.hpp"
#include "support.hpp"

using namespace pushsum;

TEST_SUITE("linalg") {
  TEST_CASE("kron of identities is the identity") {
    CHECK(kron(Matrix::identity(2), Matrix::identity(2)) == Matrix::identity(4));
  }

  TEST_CASE("kron of the signed 2x2 difference matrix, expanded by hand") {
    const Matrix d{{1, -1}, {-1, 1}};
    const Matrix expected{{1, -1, -1, 1}, {-1, 1, 1, -1}, {-1, 1, 1, -1}, {1, -1, -1, 1}};
    CHECK(kron(d, d) == expected);
  }

  TEST_CASE("kron with an all-ones factor tiles the second factor") {
    const Matrix ones(2, 2, 1.0);
    const Matrix swap{{0, 1}, {1, 0}};
    const Matrix k = kron(ones, swap);
    for (std::size_t bi = 0; bi < 2; ++bi)
      for (std::size_t bj = 0; bj < 2; ++bj)
        for (std::size_t i = 0; i < 2; ++i)
          for (std::size_t j = 0; j < 2; ++j) CHECK(k(2 * bi + i, 2 * bj + j) == swap(i, j));
  }

  TEST_CASE("kron agrees with the textbook definition on rectangular operands") {
    std::mt19937_64 rng(11);
    const Matrix a = test::random_matrix(2, 3, rng);
    const Matrix b = test::random_matrix(3, 2, rng);
    CHECK(max_abs_diff(kron(a, b), test::naive_kron(a, b)) == 0.0);
  }

  TEST_CASE("mixed-product property") {
    std::mt19937_64 rng(5);
    for (int rep = 0; rep < 10; ++rep) {
      const Matrix a = test::random_matrix(3, 2, rng), c = test::random_matrix(2, 4, rng);
      const Matrix b = test::random_matrix(2, 3, rng), d = test::random_matrix(3, 2, rng);
      const Matrix lhs = kron(a, b) * kron(c, d);
      const Matrix rhs = kron(a * c, b * d);
      CHECK(frobenius_norm(lhs - rhs) <= 1e-10 * (1.0 + frobenius_norm(rhs)));
    }
  }

  TEST_CASE("kron refuses results beyond the memory cap") {
    const Matrix a(100, 100, 1.0);
    CHECK_THROWS_AS(kron(a, a, 1000), CapacityError);
    CHECK_THROWS_AS(kron_power(a, 3, std::size_t{1} << 20), CapacityError);
  }

  TEST_CASE("kron_power") {
    const Matrix a{{1, 2}, {3, 4}};
    CHECK(kron_power(a, 0) == Matrix::identity(1));
    CHECK(kron_power(a, 1) == a);
    CHECK(kron_power(a, 3) == test::naive_kron(test::naive_kron(a, a), a));
  }

  TEST_CASE("matrix product matches a triple loop") {
    std::mt19937_64 rng(3);
    const Matrix a = test::random_matrix(4, 5, rng), b = test::random_matrix(5, 3, rng);
    CHECK(max_abs_diff(a * b, test::naive_mul(a, b)) <= 1e-14);
    const std::vector<double> x{1, -2, 0.5, 3, 0};
    const auto y = a * std::span<const double>(x);
    for (std::size_t i = 0; i < 4; ++i) {
      double s = 0;
      for (std::size_t j = 0; j < 5; ++j) s += a(i, j) * x[j];
      CHECK(y[i] == doctest::Approx(s).epsilon(1e-14));
    }
  }

  TEST_CASE("size mismatches are rejected") {
    CHECK_THROWS_AS(Matrix(2, 3) * Matrix(2, 3), InvalidInput);
    CHECK_THROWS_AS(Matrix(2, 2) + Matrix(3, 3), InvalidInput);
    CHECK_THROWS_AS(spectral_radius(Matrix(2, 3)), InvalidInput);
  }

  TEST_CASE("spectral radius examples") {
    CHECK(spectral_radius(Matrix::identity(3)).value == doctest::Approx(1.0).epsilon(1e-12));
    const double d[] = {3.0, -5.0};
    CHECK(spectral_radius(Matrix::diagonal(d)).value == doctest::Approx(5.0).epsilon(1e-9));
    // Characteristic polynomial of [[1,-1],[-1,1]] is l^2 - 2l, roots 0 and 2.
    const Matrix m{{1, -1}, {-1, 1}};
    const double tr = 2.0, det = 0.0;
    const double oracle = std::max(std::abs(tr / 2 + std::sqrt(tr * tr / 4 - det)),
                                   std::abs(tr / 2 - std::sqrt(tr * tr / 4 - det)));
    const SpectralRadius r = spectral_radius(m);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(oracle).epsilon(1e-9));
    CHECK(spectral_radius(Matrix(3, 3)).value == 0.0);
  }

  TEST_CASE("spectral radius of a rotation-scaled block (complex pair)") {
    const double s = 0.8, c = std::cos(1.0), n = std::sin(1.0);
    const Matrix m{{s * c, -s * n, 0}, {s * n, s * c, 0}, {0, 0, 0.3}};
    CHECK(spectral_radius(m).value == doctest::Approx(0.8).epsilon(1e-8));
  }

  TEST_CASE("spectral radius of a Jordan-like block") {
    const Matrix m{{0.5, 1.0}, {0.0, 0.5}};
    CHECK(spectral_radius(m, 1e-9, 60).value == doctest::Approx(0.5).epsilon(1e-6));
  }

  TEST_CASE("spectral radius is multiplicative under kron for random 4x4") {
    std::mt19937_64 rng(17);
    for (int rep = 0; rep < 5; ++rep) {
      const Matrix a = test::random_matrix(4, 4, rng, 0.0, 1.0);
      const double ra = spectral_radius(a).value;
      CHECK(spectral_radius(kron(a, a)).value == doctest::Approx(ra * ra).epsilon(1e-8));
      CHECK(ra == doctest::Approx(test::power_radius(a)).epsilon(1e-8));
    }
  }

  TEST_CASE("frobenius norm") {
    CHECK(frobenius_norm(Matrix(3, 3)) == 0.0);
    CHECK(frobenius_norm(Matrix::identity(2)) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    std::mt19937_64 rng(2);
    for (int rep = 0; rep < 10; ++rep) {
      const Matrix s = test::random_matrix(2, 2, rng);
      const double f = frobenius_norm(s);
      CHECK(frobenius_norm(kron(s, s)) == doctest::Approx(f * f).epsilon(1e-14));
      CHECK(frobenius_norm(kron_power(s, 3)) == doctest::Approx(f * f * f).epsilon(1e-14));
    }
  }

  TEST_CASE("centering projection") {
    CHECK(centering_projection(1) == Matrix{{0.0}});
    CHECK(centering_projection(2) == Matrix{{0.5, -0.5}, {-0.5, 0.5}});
    for (std::size_t p : {1u, 2u, 3u, 7u, 20u}) {
      const Matrix c = centering_projection(p);
      CHECK(max_abs_diff(c, c.transpose()) == 0.0);
      CHECK(max_abs_diff(c * c, c) <= 1e-12);
      for (std::size_t i = 0; i < p; ++i) {
        double row = 0, col = 0;
        for (std::size_t j = 0; j < p; ++j) row += c(i, j), col += c(j, i);
        CHECK(std::abs(row) <= 1e-12);
        CHECK(std::abs(col) <= 1e-12);
      }
    }
    CHECK_THROWS_AS(centering_projection(0), InvalidInput);
  }

  TEST_CASE("(I-J) A (I-J) = A (I-J) for column-stochastic A") {
    std::mt19937_64 rng(9);
    for (std::size_t p : {2u, 4u, 6u}) {
      Matrix a = test::random_matrix(p, p, rng, 0.0, 1.0);
      for (std::size_t j = 0; j < p; ++j) {
        double s = 0;
        for (std::size_t i = 0; i < p; ++i) s += a(i, j);
        for (std::size_t i = 0; i < p; ++i) a(i, j) /= s;
      }
      const ColumnStochasticMatrix csm(a, 1e-12);
      const Matrix c = centering_projection(p);
      CHECK(max_abs_diff(c * csm.matrix() * c, csm.matrix() * c) <= 1e-12);
    }
  }

  TEST_CASE("column-stochastic validation") {
    CHECK(ColumnStochasticMatrix::satisfies(Matrix{{0.5, 0}, {0.5, 1}}));
    CHECK_FALSE(ColumnStochasticMatrix::satisfies(Matrix{{0.5, 0}, {0.6, 1}}));
    CHECK_FALSE(ColumnStochasticMatrix::satisfies(Matrix{{1.5, 0}, {-0.5, 1}}));
    CHECK_FALSE(ColumnStochasticMatrix::satisfies(Matrix(2, 3)));
    CHECK_THROWS_AS(ColumnStochasticMatrix(Matrix{{0.5, 0}, {0.4, 1}}), InvalidInput);
  }

  TEST_CASE("non-finite entries are detected") {
    Matrix m(2, 2);
    CHECK(m.all_finite());
    m(1, 0) = NAN;
    CHECK_FALSE(m.all_finite());
  }
}
