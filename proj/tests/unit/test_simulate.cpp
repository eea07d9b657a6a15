#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "pushsum/error.hpp"
#include "pushsum/simulate.hpp"
#include "pushsum/spectral.hpp"
#include "support.hpp"

using namespace pushsum;

namespace {

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

}  // namespace

TEST_SUITE("simulate") {
  TEST_CASE("step with the identity leaves the state unchanged") {
    PushSumState s = PushSumState::start({1.0, -2.0, 3.5});
    step(s, ColumnStochasticMatrix(Matrix::identity(3)));
    CHECK(s.x == std::vector<double>{1.0, -2.0, 3.5});
    CHECK(s.w == std::vector<double>{1.0, 1.0, 1.0});
  }

  TEST_CASE("step on the 2-path by hand") {
    PushSumState s = PushSumState::start({2.0, 0.0});
    step(s, ColumnStochasticMatrix(Matrix{{0.5, 0}, {0.5, 1}}));
    CHECK(s.x == std::vector<double>{1.0, 1.0});
    CHECK(s.w == std::vector<double>{0.5, 1.5});
    const auto r = s.readout();
    CHECK(r[0] == 2.0);
    CHECK(r[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK_THROWS_AS(step(s, ColumnStochasticMatrix(Matrix::identity(3))), InvalidInput);
  }

  TEST_CASE("structured and dense steps agree") {
    const GossipModel m = GossipModel::two_way(test::random_connected(7, 0.3, 2));
    Rng rng(5);
    PushSumState a = PushSumState::start({1, 2, 3, 4, 5, 6, 7}), b = a;
    TrackedProduct ta(7), tb(7);
    for (int i = 0; i < 200; ++i) {
      const ColumnUpdate u = sample_update(m, rng);
      const ColumnStochasticMatrix dense(u.to_matrix(7));
      step(a, u);
      step(b, dense);
      track_step(ta, u);
      track_step(tb, dense);
    }
    for (std::size_t i = 0; i < 7; ++i) {
      CHECK(a.x[i] == doctest::Approx(b.x[i]).epsilon(1e-13));
      CHECK(a.w[i] == doctest::Approx(b.w[i]).epsilon(1e-13));
    }
    CHECK(ta.log_scale() == tb.log_scale());
    CHECK(max_abs_diff(ta.scaled(), tb.scaled()) <= 1e-13);
  }

  TEST_CASE("tracked product, one 2-path step") {
    TrackedProduct tp(2);
    tp.apply(ColumnStochasticMatrix(Matrix{{0.5, 0}, {0.5, 1}}));
    CHECK(max_abs_diff(tp.value(), Matrix{{0.25, -0.25}, {-0.25, 0.25}}) <= 1e-15);
    CHECK(tp.steps() == 1);
  }

  TEST_CASE("permutations are isometries") {
    TrackedProduct tp(3);
    const double before = tp.frobenius();
    tp.apply(ColumnStochasticMatrix(Matrix{{0, 0, 1}, {1, 0, 0}, {0, 1, 0}}));
    CHECK(tp.frobenius() == doctest::Approx(before).epsilon(1e-15));
    CHECK(tp.log_scale() == 0.0);
  }

  TEST_CASE("log rescaling keeps the 2-path decay exact") {
    // Every 2-path update gives A(I-J) = (1/2)(I-J) and ||I-J||_F = 1, so ||N_n||_F = 2^-n.
    const GossipModel m = GossipModel::reference(test::path(2));
    Rng rng(1);
    TrackedProduct tp(2);
    for (int n = 1; n <= 5000; ++n) {
      tp.apply(sample_update(m, rng));
      const double f = tp.frobenius();
      CHECK((f >= TrackedProduct::kLowerBand && f <= TrackedProduct::kUpperBand));
      if (n % 1000 == 0) {
        CHECK(tp.log_scale() + std::log(f) == doctest::Approx(-n * std::log(2.0)).epsilon(1e-10));
      }
    }
  }

  TEST_CASE("true column sums of N stay zero") {
    const GossipModel m = GossipModel::reference(test::random_connected(6, 0.3, 4));
    Rng rng(2);
    TrackedProduct tp(6);
    for (int n = 0; n < 3000; ++n) {
      tp.apply(sample_update(m, rng));
      if (n % 100 == 0) {
        for (std::size_t j = 0; j < 6; ++j) {
          double s = 0;
          for (std::size_t i = 0; i < 6; ++i) s += tp.scaled()(i, j);
          CHECK(std::abs(s) <= 1e-10 * std::max(1.0, tp.frobenius()));
        }
      }
    }
  }

  TEST_CASE("factorisation: products of A from I-J equal products of A(I-J)") {
    const std::size_t p = 5;
    const GossipModel m = GossipModel::slowed(test::random_connected(p, 0.4, 1));
    Rng rng(8);
    TrackedProduct tp(p);
    const Matrix c = centering_projection(p);
    Matrix direct = c;
    for (int n = 0; n < 100; ++n) {
      const Matrix a = sample(m, rng).matrix();
      tp.apply(ColumnStochasticMatrix(a));
      direct = (a * c) * direct;
    }
    CHECK(max_abs_diff(tp.value(), direct) <= 1e-12 * std::max(1e-300, frobenius_norm(direct)) + 1e-300);
    CHECK(std::log(frobenius_norm(direct)) ==
          doctest::Approx(tp.log_scale() + std::log(tp.frobenius())).epsilon(1e-10));
  }

  TEST_CASE("readout identity against the tracked product") {
    const std::size_t p = 8;
    const GossipModel m = GossipModel::two_way(test::random_connected(p, 0.25, 6));
    Rng rng(3);
    std::mt19937_64 gen(4);
    std::vector<double> x0(p);
    for (auto& v : x0) v = std::uniform_real_distribution<double>(-1, 1)(gen);
    const double mean = sum(x0) / p;
    PushSumState s = PushSumState::start(x0);
    TrackedProduct tp(p);
    for (int n = 1; n <= 600; ++n) {
      const ColumnUpdate u = sample_update(m, rng);
      step(s, u);
      tp.apply(u);
      if (n % 50 == 0) {
        const Matrix nn = tp.value();
        for (std::size_t i = 0; i < p; ++i) {
          double e = 0;
          for (std::size_t j = 0; j < p; ++j) e += nn(i, j) * x0[j];
          const double lhs = s.x[i] / s.w[i] - mean;
          const double rhs = e / s.w[i];
          CHECK(std::abs(lhs - rhs) <= 1e-8 * std::max(std::abs(rhs), 1e-6));
        }
      }
    }
  }

  TEST_CASE("empirical rate formula") {
    TrackedProduct tp(4);
    tp.apply(ColumnStochasticMatrix(Matrix::identity(4)));
    const std::vector<double> w(4, 1.0);
    CHECK(empirical_rate(tp, w) == doctest::Approx(0.5 * std::log(3.0 / 4.0)).epsilon(1e-14));
    TrackedProduct zero(1);
    zero.apply(ColumnStochasticMatrix(Matrix::identity(1)));
    CHECK(zero.vanished());
    CHECK(empirical_rate(zero, std::vector<double>{1.0}) == -INFINITY);
  }

  TEST_CASE("weight diagnostic") {
    CHECK(weight_diagnostic(std::vector<double>{1, 1, 1}, 10) == 0.0);
    CHECK(weight_diagnostic(std::vector<double>{0.5, 1.5}, 1) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  }

  TEST_CASE("2-path trial reproduces -log 2") {
    const GossipModel m = GossipModel::reference(test::path(2));
    const TrialResult r = run_trial(m, 10000, 7);
    CHECK(std::abs(r.empirical_rate + std::log(2.0)) <= 0.01);
    CHECK(std::abs(r.bound_minus_empirical) <= 0.01);
    CHECK(r.bound_minus_empirical == r.bound_eta2_half - r.empirical_rate);
    CHECK(r.n == 10000);
    CHECK(r.p == 2);
    CHECK(r.seed == 7);
    CHECK(r.warnings.empty());
  }

  TEST_CASE("trial with x0 = 1 has zero readout error") {
    const GossipModel m = GossipModel::reference(test::random_connected(6, 0.3, 3));
    TrialOptions opts;
    opts.x0 = std::vector<double>(6, 1.0);
    const TrialResult r = run_trial(m, 2000, 1, opts);
    CHECK(r.readout_error <= 1e-12);
  }

  TEST_CASE("trials are deterministic and seed dependent") {
    const GossipModel m = GossipModel::two_way(test::random_connected(10, 0.2, 9));
    const TrialResult a = run_trial(m, 3000, 11), b = run_trial(m, 3000, 11), c = run_trial(m, 3000, 12);
    CHECK(a.empirical_rate == b.empirical_rate);
    CHECK(a.weight_diag == b.weight_diag);
    CHECK(a.empirical_rate != c.empirical_rate);
  }

  TEST_CASE("slowed trials count time units") {
    const GossipModel m = GossipModel::slowed(test::path(2));
    const TrialResult r = run_trial(m, 5000, 3);
    // two multiplications of factor 3/4 per time unit: rate 2 log(3/4)
    CHECK(r.empirical_rate == doctest::Approx(2.0 * std::log(0.75)).epsilon(1e-2));
    CHECK(r.bound_eta2_half == doctest::Approx(2.0 * std::log(0.75)).epsilon(1e-9));
  }

  TEST_CASE("assumption failures become warnings") {
    const GossipModel m = GossipModel::reference(UndirectedGraph(4, {{0, 1}, {2, 3}}));
    const TrialResult r = run_trial(m, 100, 1);
    CHECK_FALSE(r.warnings.empty());
  }

  TEST_CASE("trace records the requested stride") {
    TrialOptions opts;
    opts.trace_stride = 100;
    const TrialResult r = run_trial(GossipModel::reference(test::path(3)), 1000, 2, opts);
    REQUIRE(r.trace.size() == 10);
    CHECK(r.trace.back().n == 1000);
    CHECK(r.trace.back().empirical_rate == r.empirical_rate);
  }

  TEST_CASE("empirical rate stabilises between n and 2n") {
    const GossipModel m = GossipModel::reference(test::random_connected(12, 0.2, 1));
    const double eta2 = eta(m, 1).value;
    const TrialResult a = run_trial(m, 20000, 5), b = run_trial(m, 40000, 5);
    CHECK(std::abs(a.empirical_rate - b.empirical_rate) < 0.5 * std::abs(eta2));
  }
}
