#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "pushsum/graphs.hpp"
#include "pushsum/linalg.hpp"

namespace test {

inline pushsum::UndirectedGraph path(std::size_t p) {
  std::vector<pushsum::Edge> e;
  for (std::size_t i = 0; i + 1 < p; ++i) e.emplace_back(i, i + 1);
  return pushsum::UndirectedGraph(p, e);
}

inline pushsum::UndirectedGraph cycle(std::size_t p) {
  std::vector<pushsum::Edge> e;
  for (std::size_t i = 0; i < p; ++i) e.emplace_back(std::min(i, (i + 1) % p), std::max(i, (i + 1) % p));
  return pushsum::UndirectedGraph(p, e);
}

inline pushsum::UndirectedGraph complete(std::size_t p) {
  std::vector<pushsum::Edge> e;
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i + 1; j < p; ++j) e.emplace_back(i, j);
  return pushsum::UndirectedGraph(p, e);
}

/// Connected graph: a random spanning tree plus each remaining pair with probability q.
inline pushsum::UndirectedGraph random_connected(std::size_t p, double q, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  pushsum::UndirectedGraph g(p);
  for (std::size_t i = 1; i < p; ++i) g.add_edge(i, static_cast<std::size_t>(u(rng) * i));
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i + 1; j < p; ++j)
      if (u(rng) < q) g.add_edge(i, j);
  return g;
}

inline pushsum::Matrix random_matrix(std::size_t r, std::size_t c, std::mt19937_64& rng, double lo = -1.0,
                                     double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  pushsum::Matrix m(r, c);
  for (auto& v : m.data()) v = u(rng);
  return m;
}

/// Textbook Kronecker product, written independently of the library.
inline pushsum::Matrix naive_kron(const pushsum::Matrix& a, const pushsum::Matrix& b) {
  pushsum::Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

inline pushsum::Matrix naive_mul(const pushsum::Matrix& a, const pushsum::Matrix& b) {
  pushsum::Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k)
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += a(i, k) * b(k, j);
  return out;
}

/// Spectral radius by plain power iteration on M^T M-free data: repeated
/// multiplication with normalisation, averaged over a period to cope with
/// complex dominant pairs. Only for small matrices with a clear gap.
inline double power_radius(const pushsum::Matrix& m, int iters = 4000) {
  std::vector<double> v(m.rows());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.0 + 0.37 * static_cast<double>(i % 7);
  double log_growth = 0.0;
  const int burn = iters / 2;
  for (int it = 0; it < iters; ++it) {
    std::vector<double> next(v.size(), 0.0);
    for (std::size_t i = 0; i < v.size(); ++i)
      for (std::size_t j = 0; j < v.size(); ++j) next[i] += m(i, j) * v[j];
    double n = 0.0;
    for (double x : next) n += x * x;
    n = std::sqrt(n);
    if (n == 0.0) return 0.0;
    for (auto& x : next) x /= n;
    if (it >= burn) log_growth += std::log(n);
    v = std::move(next);
  }
  return std::exp(log_growth / (iters - burn));
}

}  // namespace test
