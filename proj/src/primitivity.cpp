#include "pushsum/primitivity.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <limits>
#include <unordered_set>

#include "pushsum/error.hpp"
#include "pushsum/gossip.hpp"

namespace pushsum {

SupportPattern::SupportPattern(std::size_t size)
    : size_(size), stride_((size + 63) / 64), words_(size * ((size + 63) / 64), 0) {}

SupportPattern SupportPattern::identity(std::size_t size) {
  SupportPattern p(size);
  for (std::size_t i = 0; i < size; ++i) p.set(i, i);
  return p;
}

SupportPattern SupportPattern::all_ones(std::size_t size) {
  SupportPattern p(size);
  for (std::size_t i = 0; i < size; ++i) {
    for (std::size_t j = 0; j < size; ++j) p.set(i, j);
  }
  return p;
}

SupportPattern SupportPattern::from_rows(std::initializer_list<std::initializer_list<int>> rows) {
  SupportPattern p(rows.size());
  std::size_t i = 0;
  for (const auto& r : rows) {
    if (r.size() != rows.size()) throw InvalidInput("support pattern rows must form a square");
    std::size_t j = 0;
    for (int v : r) p.set(i, j++, v != 0);
    ++i;
  }
  return p;
}

void SupportPattern::set(std::size_t i, std::size_t j, bool value) {
  auto& w = words_[i * stride_ + j / 64];
  const std::uint64_t bit = std::uint64_t{1} << (j % 64);
  w = value ? (w | bit) : (w & ~bit);
}

std::size_t SupportPattern::count() const {
  std::size_t n = 0;
  for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

bool SupportPattern::is_all_ones() const { return count() == size_ * size_; }

SupportPattern operator*(const SupportPattern& a, const SupportPattern& b) {
  if (a.size_ != b.size_) throw InvalidInput("support pattern sizes differ");
  SupportPattern out(a.size_);
  const std::size_t s = a.stride_;
  for (std::size_t i = 0; i < a.size_; ++i) {
    std::uint64_t* dst = out.words_.data() + i * s;
    for (std::size_t k = 0; k < a.size_; ++k) {
      if (!a.test(i, k)) continue;
      const std::uint64_t* src = b.words_.data() + k * s;
      for (std::size_t w = 0; w < s; ++w) dst[w] |= src[w];
    }
  }
  return out;
}

SupportPattern operator|(const SupportPattern& a, const SupportPattern& b) {
  if (a.size_ != b.size_) throw InvalidInput("support pattern sizes differ");
  SupportPattern out = a;
  for (std::size_t w = 0; w < out.words_.size(); ++w) out.words_[w] |= b.words_[w];
  return out;
}

std::size_t SupportPattern::hash() const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ size_;
  for (auto w : words_) {
    h ^= w + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h);
}

SupportPattern kron(const SupportPattern& a, const SupportPattern& b) {
  const std::size_t n = b.size();
  SupportPattern out(a.size() * n);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < a.size(); ++j) {
      if (!a.test(i, j)) continue;
      for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t l = 0; l < n; ++l) {
          if (b.test(k, l)) out.set(i * n + k, j * n + l);
        }
      }
    }
  }
  return out;
}

SupportPattern support_pattern(const Matrix& a, double eps) {
  if (!a.square()) throw InvalidInput("support_pattern: matrix must be square");
  SupportPattern p(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const double v = a(i, j);
      if (v < -eps) throw InvalidInput("support_pattern: negative entry");
      if (v > eps) p.set(i, j);
    }
  }
  return p;
}

bool is_allowable(const SupportPattern& p) {
  const std::size_t n = p.size();
  std::vector<char> col(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    bool row = false;
    for (std::size_t j = 0; j < n; ++j) {
      if (p.test(i, j)) {
        row = true;
        col[j] = 1;
      }
    }
    if (!row) return false;
  }
  return std::all_of(col.begin(), col.end(), [](char c) { return c != 0; });
}

bool has_positive_diagonal(const SupportPattern& p) {
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!p.test(i, i)) return false;
  }
  return true;
}

namespace {

std::size_t reached_from_zero(const SupportPattern& p, bool reverse) {
  const std::size_t n = p.size();
  std::vector<char> seen(n, 0);
  std::vector<std::size_t> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    for (std::size_t w = 0; w < n; ++w) {
      const bool arc = reverse ? p.test(w, v) : p.test(v, w);
      if (arc && !seen[w]) {
        seen[w] = 1;
        ++reached;
        stack.push_back(w);
      }
    }
  }
  return reached;
}

struct PatternHash {
  std::size_t operator()(const SupportPattern& p) const noexcept { return p.hash(); }
};

// Multiplies the generators in a fixed cyclic order. For positive-diagonal
// generators the support only grows, so a full pass without change ends the
// search. Finding all-ones this way is a certificate, never a refutation.
bool cyclic_product_positive(const std::vector<SupportPattern>& gens) {
  const std::size_t n = gens.front().size();
  const std::size_t max_passes = n * n + 1;
  SupportPattern x = SupportPattern::identity(n);
  for (std::size_t pass = 0; pass < max_passes; ++pass) {
    const SupportPattern before = x;
    for (const auto& g : gens) {
      x = x * g;
      if (x.is_all_ones()) return true;
    }
    if (x == before) return false;
  }
  return false;
}

}  // namespace

bool is_irreducible(const SupportPattern& p) {
  if (p.size() == 0) return false;
  return reached_from_zero(p, false) == p.size() && reached_from_zero(p, true) == p.size();
}

bool is_irreducible(const Matrix& m) {
  if (!m.square()) throw InvalidInput("is_irreducible: matrix must be square");
  SupportPattern p(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (m(i, j) != 0.0) p.set(i, j);
    }
  }
  return is_irreducible(p);
}

std::string_view to_string(Primitivity p) {
  switch (p) {
    case Primitivity::Primitive:
      return "primitive";
    case Primitivity::NotPrimitive:
      return "not-primitive";
    case Primitivity::Undetermined:
      return "undetermined";
  }
  return "unknown";
}

Primitivity is_primitive_set(const std::vector<SupportPattern>& patterns, std::size_t cap) {
  if (patterns.empty()) return Primitivity::NotPrimitive;
  const std::size_t n = patterns.front().size();
  for (const auto& g : patterns) {
    if (g.size() != n) throw InvalidInput("is_primitive_set: patterns differ in size");
  }

  // Products of matrices sharing an invariant block structure keep it.
  SupportPattern joined = patterns.front();
  for (const auto& g : patterns) joined = joined | g;
  if (!is_irreducible(joined)) return Primitivity::NotPrimitive;
  if (cyclic_product_positive(patterns)) return Primitivity::Primitive;

  std::unordered_set<SupportPattern, PatternHash> seen;
  std::deque<SupportPattern> queue;
  for (const auto& g : patterns) {
    if (g.is_all_ones()) return Primitivity::Primitive;
    if (seen.insert(g).second) queue.push_back(g);
  }
  while (!queue.empty()) {
    const SupportPattern x = std::move(queue.front());
    queue.pop_front();
    for (const auto& g : patterns) {
      SupportPattern y = x * g;
      if (y.is_all_ones()) return Primitivity::Primitive;
      if (seen.insert(y).second) {
        if (seen.size() > cap) return Primitivity::Undetermined;
        queue.push_back(std::move(y));
      }
    }
  }
  return Primitivity::NotPrimitive;
}

namespace {

struct Line {
  double a, b;  // a + b t
  double at(double t) const { return a + b * t; }
};

// Exact integral over [t0, t1] of log(a + b t), with a + b t >= 0 there.
double integrate_log(const Line& l, double t0, double t1) {
  if (l.b == 0.0) return (t1 - t0) * std::log(l.a);
  auto prim = [](double u) { return u > 0.0 ? u * std::log(u) - u : 0.0; };
  return (prim(l.at(t1)) - prim(l.at(t0))) / l.b;
}

// E log alpha(t) over t ~ U[0,1], alpha(t) the minimum of the lines that are
// positive on the open interval. The minimum is piecewise linear, so the
// integral is exact piece by piece.
double expected_log_min(const std::vector<Line>& lines) {
  std::vector<double> cuts{0.0, 1.0};
  for (std::size_t x = 0; x < lines.size(); ++x) {
    for (std::size_t y = x + 1; y < lines.size(); ++y) {
      const double db = lines[x].b - lines[y].b;
      if (db == 0.0) continue;
      const double t = (lines[y].a - lines[x].a) / db;
      if (t > 0.0 && t < 1.0) cuts.push_back(t);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    const double t0 = cuts[c];
    const double t1 = cuts[c + 1];
    if (t1 <= t0) continue;
    const double mid = 0.5 * (t0 + t1);
    const Line* best = &lines.front();
    for (const auto& l : lines) {
      if (l.at(mid) < best->at(mid)) best = &l;
    }
    total += integrate_log(*best, t0, t1);
  }
  return total;
}

}  // namespace

AssumptionReport check_assumption(const GossipModel& model, std::size_t cap) {
  AssumptionReport r;
  const auto patterns = support_patterns(model);
  r.all_allowable = std::all_of(patterns.begin(), patterns.end(), [](const auto& p) { return is_allowable(p); });
  r.support_primitive = is_primitive_set(patterns, cap);
  r.mean_irreducible = is_irreducible(mean_matrix(model));

  const auto extremes = model.extreme_realizations();
  r.positive_diagonal_as = std::all_of(extremes.begin(), extremes.end(), [](const Matrix& m) {
    return has_positive_diagonal(support_pattern(m));
  });

  double inf_entry = std::numeric_limits<double>::infinity();
  double e_log = 0.0;
  const std::size_t p = model.size();
  for (const auto& e : model.column_events()) {
    // Column entries as lines in t, merged by row; off-column entries are 0 or 1.
    std::vector<Line> column;
    std::vector<std::size_t> rows;
    auto line_for = [&](std::size_t row) -> Line& {
      const auto it = std::find(rows.begin(), rows.end(), row);
      if (it != rows.end()) return column[static_cast<std::size_t>(it - rows.begin())];
      rows.push_back(row);
      return column.emplace_back(Line{0.0, 0.0});
    };
    for (const auto& en : e.base) line_for(en.row).a += en.value;
    for (const auto& en : e.slope) line_for(en.row).b += en.value;

    std::vector<Line> positive;
    if (p > 1) positive.push_back({1.0, 0.0});
    for (const auto& l : column) {
      if (std::max(l.at(0.0), l.at(1.0)) <= 0.0 && l.at(0.5) <= 0.0) continue;
      positive.push_back(l);
      inf_entry = std::min(inf_entry, std::min(l.at(0.0), l.at(1.0)));
    }
    e_log += e.probability * expected_log_min(positive);
  }
  for (const auto& a : model.atoms()) {
    double alpha = std::numeric_limits<double>::infinity();
    for (double v : a.matrix.data()) {
      if (v > 0.0) alpha = std::min(alpha, v);
    }
    inf_entry = std::min(inf_entry, alpha);
    e_log += a.probability * std::log(alpha);
  }
  r.min_positive_entry = std::max(inf_entry, 0.0);
  r.expected_log_alpha = e_log;
  r.log_moment_finite = std::isfinite(e_log);
  return r;
}

}  // namespace pushsum
