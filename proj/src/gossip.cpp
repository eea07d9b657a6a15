#include "pushsum/gossip.hpp"

#include <algorithm>
#include <bit>
#include <climits>
#include <cmath>
#include <numeric>
#include <string>

#include "pushsum/error.hpp"

namespace pushsum {

std::string_view to_string(GossipKind kind) {
  switch (kind) {
    case GossipKind::Reference:
      return "reference";
    case GossipKind::TwoWay:
      return "two-way";
    case GossipKind::Slowed:
      return "slowed";
    case GossipKind::Averaging:
      return "averaging";
    case GossipKind::Custom:
      return "custom";
  }
  return "unknown";
}

GossipKind parse_gossip_kind(std::string_view name) {
  if (name == "reference") return GossipKind::Reference;
  if (name == "two-way" || name == "twoway") return GossipKind::TwoWay;
  if (name == "slowed") return GossipKind::Slowed;
  if (name == "averaging") return GossipKind::Averaging;
  throw InvalidInput("unknown gossip model '" + std::string(name) + "'");
}

Matrix ColumnEvent::realize(std::size_t p, double t) const {
  Matrix a = Matrix::identity(p);
  a(sender, sender) = 0.0;
  for (const auto& e : base) a(e.row, sender) += e.value;
  for (const auto& e : slope) a(e.row, sender) += t * e.value;
  return a;
}

Matrix ColumnUpdate::to_matrix(std::size_t p) const {
  Matrix a = Matrix::identity(p);
  a(sender, sender) = 0.0;
  for (std::size_t k = 0; k < count; ++k) a(column[k].row, sender) += column[k].value;
  return a;
}

GossipModel GossipModel::from_graph(GossipKind kind, const UndirectedGraph& g) {
  const std::size_t p = g.node_count();
  if (p == 0) throw InvalidInput("gossip model on an empty graph");
  if (p >= 2) {
    for (std::size_t i = 0; i < p; ++i) {
      if (g.degree(i) == 0) throw InvalidInput("node " + std::to_string(i) + " is isolated");
    }
  }
  GossipModel m;
  m.kind_ = kind;
  m.p_ = p;
  m.graph_ = g;
  m.graph_valid_ = true;
  m.steps_per_time_unit_ = kind == GossipKind::Slowed ? 2 : 1;
  m.send_fraction_ = kind == GossipKind::Slowed ? 0.25 : 0.5;
  if (p == 1) {
    m.events_.push_back({1.0, 0, {{0, 1.0}}, {}});
    return m;
  }
  const double pd = static_cast<double>(p);
  for (std::size_t i = 0; i < p; ++i) {
    const auto& nb = g.neighbors(i);
    const double d = static_cast<double>(nb.size());
    if (kind == GossipKind::TwoWay && nb.size() >= 2) {
      // Unordered pairs: (j1, j2) and (j2, j1) coincide under t -> 1 - t.
      const double prob = 2.0 / (pd * d * (d - 1.0));
      for (std::size_t a = 0; a < nb.size(); ++a) {
        for (std::size_t b = a + 1; b < nb.size(); ++b) {
          m.events_.push_back({prob, i, {{i, 0.5}, {nb[b], 0.5}}, {{nb[a], 0.5}, {nb[b], -0.5}}});
        }
      }
      continue;
    }
    const double f = m.send_fraction_;
    for (std::size_t j : nb) {
      m.events_.push_back({1.0 / (pd * d), i, {{i, 1.0 - f}, {j, f}}, {}});
    }
  }
  return m;
}

GossipModel GossipModel::reference(const UndirectedGraph& g) { return from_graph(GossipKind::Reference, g); }
GossipModel GossipModel::two_way(const UndirectedGraph& g) { return from_graph(GossipKind::TwoWay, g); }
GossipModel GossipModel::slowed(const UndirectedGraph& g) { return from_graph(GossipKind::Slowed, g); }

GossipModel GossipModel::pairwise_averaging(const UndirectedGraph& g) {
  const std::size_t p = g.node_count();
  const auto edges = g.edges();
  if (edges.empty()) throw InvalidInput("pairwise averaging needs at least one edge");
  std::vector<Atom> atoms;
  atoms.reserve(edges.size());
  for (const auto& [i, j] : edges) {
    Matrix a = Matrix::identity(p);
    a(i, i) = a(j, j) = a(i, j) = a(j, i) = 0.5;
    atoms.push_back({1.0 / static_cast<double>(edges.size()), std::move(a)});
  }
  GossipModel m = from_atoms(std::move(atoms));
  m.kind_ = GossipKind::Averaging;
  m.graph_ = g;
  m.graph_valid_ = true;
  m.send_fraction_ = 0.5;
  return m;
}

GossipModel GossipModel::make(GossipKind kind, const UndirectedGraph& g) {
  switch (kind) {
    case GossipKind::Reference:
    case GossipKind::TwoWay:
    case GossipKind::Slowed:
      return from_graph(kind, g);
    case GossipKind::Averaging:
      return pairwise_averaging(g);
    case GossipKind::Custom:
      break;
  }
  throw InvalidInput("custom models are built from atoms");
}

GossipModel GossipModel::from_atoms(std::vector<Atom> atoms, int steps_per_time_unit) {
  if (atoms.empty()) throw InvalidInput("model needs at least one atom");
  if (steps_per_time_unit < 1) throw InvalidInput("steps_per_time_unit must be positive");
  const std::size_t p = atoms.front().matrix.rows();
  double total = 0.0;
  for (const auto& a : atoms) {
    if (a.matrix.rows() != p || !ColumnStochasticMatrix::satisfies(a.matrix)) {
      throw InvalidInput("atoms must be column-stochastic matrices of equal size");
    }
    if (!(a.probability > 0.0)) throw InvalidInput("atom probabilities must be positive");
    total += a.probability;
  }
  if (std::abs(total - 1.0) > 1e-12) throw InvalidInput("atom probabilities must sum to 1");
  GossipModel m;
  m.kind_ = GossipKind::Custom;
  m.p_ = p;
  m.steps_per_time_unit_ = steps_per_time_unit;
  m.atoms_ = std::move(atoms);
  double acc = 0.0;
  for (const auto& a : m.atoms_) {
    acc += a.probability;
    m.atom_cdf_.push_back(acc);
  }
  return m;
}

std::vector<Matrix> GossipModel::extreme_realizations() const {
  std::vector<Matrix> out;
  for (const auto& e : events_) {
    out.push_back(e.realize(p_, 0.0));
    if (e.is_segment()) out.push_back(e.realize(p_, 1.0));
  }
  for (const auto& a : atoms_) out.push_back(a.matrix);
  return out;
}

ColumnUpdate sample_update(const GossipModel& model, Rng& rng) {
  if (!model.column_structured()) throw InvalidInput("sample_update: model has no column structure");
  ColumnUpdate u;
  const std::size_t p = model.size();
  if (p == 1) {
    u.column[0] = {0, 1.0};
    u.count = 1;
    return u;
  }
  const auto& g = model.graph_;
  const std::size_t i = uniform_index(rng, p);
  const auto& nb = g.neighbors(i);
  u.sender = i;
  if (model.kind() == GossipKind::TwoWay && nb.size() >= 2) {
    const std::size_t a = uniform_index(rng, nb.size());
    std::size_t b = uniform_index(rng, nb.size() - 1);
    if (b >= a) ++b;
    const double t = uniform01(rng);
    u.column[0] = {i, 0.5};
    u.column[1] = {nb[a], 0.5 * t};
    u.column[2] = {nb[b], 0.5 * (1.0 - t)};
    u.count = 3;
    return u;
  }
  const double f = model.send_fraction();
  u.column[0] = {i, 1.0 - f};
  u.column[1] = {nb[uniform_index(rng, nb.size())], f};
  u.count = 2;
  return u;
}

std::size_t sample_atom(const GossipModel& model, Rng& rng) {
  if (model.column_structured()) throw InvalidInput("sample_atom: model is not atom based");
  const double x = uniform01(rng);
  const auto it = std::upper_bound(model.atom_cdf_.begin(), model.atom_cdf_.end(), x);
  return std::min<std::size_t>(static_cast<std::size_t>(it - model.atom_cdf_.begin()), model.atoms().size() - 1);
}

ColumnStochasticMatrix sample(const GossipModel& model, Rng& rng) {
  if (model.column_structured()) {
    return ColumnStochasticMatrix(sample_update(model, rng).to_matrix(model.size()));
  }
  return ColumnStochasticMatrix(model.atoms()[sample_atom(model, rng)].matrix);
}

namespace {

using Triplet = Eigen::Triplet<double>;

std::size_t checked_pow(std::size_t base, unsigned e, std::size_t limit) {
  std::size_t r = 1;
  for (unsigned i = 0; i < e; ++i) {
    if (base != 0 && r > limit / base) return limit + 1;
    r *= base;
  }
  return r;
}

void check_triplet_budget(std::size_t triplets, std::size_t cap_bytes, const std::string& what) {
  constexpr std::size_t per = sizeof(Triplet) + sizeof(double) + sizeof(int);
  if (triplets > cap_bytes / per) {
    throw CapacityError(what + " exceeds memory cap", triplets > SIZE_MAX / per ? SIZE_MAX : triplets * per);
  }
}

// E(A^{(x)m}) for A = I + u e_i^T, grouped by sender i. Expanding the
// m-fold product position by position, positions taking the u e_i^T factor
// pin their column index to i and read their row index from u, while the
// remaining positions are identity. Averaging therefore only needs the
// moment tensors E(u_{r1} ... u_{rs}) over the sender's local support.
SparseMatrix column_event_moment(const GossipModel& model, unsigned m, std::size_t dim, std::size_t cap_bytes) {
  const std::size_t p = model.size();
  std::vector<std::vector<const ColumnEvent*>> by_sender(p);
  double total_probability = 0.0;
  for (const auto& e : model.column_events()) {
    by_sender[e.sender].push_back(&e);
    total_probability += e.probability;
  }

  std::vector<std::vector<std::size_t>> support(p);
  std::size_t estimate = dim;
  for (std::size_t i = 0; i < p; ++i) {
    if (by_sender[i].empty()) continue;
    auto& L = support[i];
    L.push_back(i);
    for (const auto* e : by_sender[i]) {
      for (const auto& en : e->base) L.push_back(en.row);
      for (const auto& en : e->slope) L.push_back(en.row);
    }
    std::sort(L.begin(), L.end());
    L.erase(std::unique(L.begin(), L.end()), L.end());
    // sum over non-empty subsets S of l^|S| p^(m-|S|) = (l + p)^m - p^m
    const std::size_t a = checked_pow(L.size() + p, m, SIZE_MAX / 2);
    estimate += a - std::min(a, dim);
    if (estimate > SIZE_MAX / 4) estimate = SIZE_MAX / 4;
  }
  check_triplet_budget(estimate, cap_bytes, "moment of order " + std::to_string(m));

  std::vector<std::size_t> place(m);
  for (unsigned l = 0; l < m; ++l) place[l] = checked_pow(p, m - 1 - l, SIZE_MAX);

  std::vector<Triplet> triplets;
  triplets.reserve(estimate);
  for (std::size_t r = 0; r < dim; ++r) {
    triplets.emplace_back(static_cast<int>(r), static_cast<int>(r), total_probability);
  }

  std::vector<std::size_t> idx(m);
  for (std::size_t i = 0; i < p; ++i) {
    if (by_sender[i].empty()) continue;
    const auto& L = support[i];
    const std::size_t ell = L.size();
    auto local = [&L](std::size_t row) {
      return static_cast<std::size_t>(std::lower_bound(L.begin(), L.end(), row) - L.begin());
    };

    // w[s][flat(r_1..r_s)] = sum_e pi_e E[(u0 + t u1)_{r_1} ... (u0 + t u1)_{r_s}]
    std::vector<std::vector<double>> w(m + 1);
    for (unsigned s = 1; s <= m; ++s) w[s].assign(checked_pow(ell, s, SIZE_MAX), 0.0);
    std::vector<double> u0(ell), u1(ell), poly(m + 1);
    for (const auto* e : by_sender[i]) {
      std::fill(u0.begin(), u0.end(), 0.0);
      std::fill(u1.begin(), u1.end(), 0.0);
      for (const auto& en : e->base) u0[local(en.row)] += en.value;
      u0[local(i)] -= 1.0;
      for (const auto& en : e->slope) u1[local(en.row)] += en.value;

      for (unsigned s = 1; s <= m; ++s) {
        auto& ws = w[s];
        std::fill(idx.begin(), idx.begin() + s, 0);
        for (std::size_t flat = 0; flat < ws.size(); ++flat) {
          // polynomial in t of prod_l (u0[idx_l] + t u1[idx_l])
          std::fill(poly.begin(), poly.end(), 0.0);
          poly[0] = 1.0;
          for (unsigned l = 0; l < s; ++l) {
            const double c0 = u0[idx[l]];
            const double c1 = u1[idx[l]];
            for (unsigned a = l + 1; a > 0; --a) poly[a] = poly[a] * c0 + poly[a - 1] * c1;
            poly[0] *= c0;
          }
          double ev = 0.0;
          for (unsigned a = 0; a <= s; ++a) ev += poly[a] / static_cast<double>(a + 1);
          ws[flat] += e->probability * ev;
          for (unsigned l = s; l-- > 0;) {  // odometer, last index fastest
            if (++idx[l] < ell) break;
            idx[l] = 0;
          }
        }
      }
    }

    for (unsigned mask = 1; mask < (1U << m); ++mask) {
      const auto s = static_cast<unsigned>(std::popcount(mask));
      std::vector<unsigned> pinned, free;
      for (unsigned l = 0; l < m; ++l) ((mask >> l) & 1U ? pinned : free).push_back(l);
      std::size_t col_base = 0;
      for (unsigned l : pinned) col_base += i * place[l];
      const std::size_t free_count = checked_pow(p, m - s, SIZE_MAX);

      std::fill(idx.begin(), idx.begin() + s, 0);
      for (std::size_t flat = 0; flat < w[s].size(); ++flat) {
        const double value = w[s][flat];
        if (value != 0.0) {
          std::size_t row_base = 0;
          for (unsigned q = 0; q < s; ++q) row_base += L[idx[q]] * place[pinned[q]];
          for (std::size_t f = 0; f < free_count; ++f) {
            std::size_t off = 0;
            std::size_t rest = f;
            for (unsigned q = static_cast<unsigned>(free.size()); q-- > 0;) {
              off += (rest % p) * place[free[q]];
              rest /= p;
            }
            triplets.emplace_back(static_cast<int>(row_base + off), static_cast<int>(col_base + off), value);
          }
        }
        for (unsigned q = s; q-- > 0;) {
          if (++idx[q] < ell) break;
          idx[q] = 0;
        }
      }
    }
  }

  SparseMatrix out(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  out.setFromTriplets(triplets.begin(), triplets.end());
  out.prune(0.0);
  return out;
}

SparseMatrix atom_moment(const GossipModel& model, unsigned m, std::size_t dim, std::size_t cap_bytes) {
  const std::size_t p = model.size();
  struct Nz {
    std::size_t r, c;
    double v;
  };
  std::vector<std::vector<Nz>> nonzeros;
  std::size_t estimate = 0;
  for (const auto& a : model.atoms()) {
    auto& nz = nonzeros.emplace_back();
    for (std::size_t r = 0; r < p; ++r) {
      for (std::size_t c = 0; c < p; ++c) {
        if (a.matrix(r, c) != 0.0) nz.push_back({r, c, a.matrix(r, c)});
      }
    }
    estimate += checked_pow(nz.size(), m, SIZE_MAX / 4);
    if (estimate > SIZE_MAX / 4) estimate = SIZE_MAX / 4;
  }
  check_triplet_budget(estimate, cap_bytes, "moment of order " + std::to_string(m));

  std::vector<Triplet> triplets;
  triplets.reserve(estimate);
  std::vector<std::size_t> idx(m);
  for (std::size_t k = 0; k < nonzeros.size(); ++k) {
    const auto& nz = nonzeros[k];
    const double prob = model.atoms()[k].probability;
    const std::size_t combos = checked_pow(nz.size(), m, SIZE_MAX);
    std::fill(idx.begin(), idx.end(), 0);
    for (std::size_t flat = 0; flat < combos; ++flat) {
      std::size_t r = 0;
      std::size_t c = 0;
      double v = prob;
      for (unsigned l = 0; l < m; ++l) {
        r = r * p + nz[idx[l]].r;
        c = c * p + nz[idx[l]].c;
        v *= nz[idx[l]].v;
      }
      triplets.emplace_back(static_cast<int>(r), static_cast<int>(c), v);
      for (unsigned l = m; l-- > 0;) {
        if (++idx[l] < nz.size()) break;
        idx[l] = 0;
      }
    }
  }
  SparseMatrix out(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  out.setFromTriplets(triplets.begin(), triplets.end());
  out.prune(0.0);
  return out;
}

}  // namespace

SparseMatrix kronecker_moment(const GossipModel& model, unsigned m, std::size_t cap_bytes) {
  if (m == 0) throw InvalidInput("kronecker_moment: order must be positive");
  if (m > 16) throw CapacityError("kronecker_moment: order too large", SIZE_MAX);
  const std::size_t dim = checked_pow(model.size(), m, static_cast<std::size_t>(INT_MAX));
  if (dim > static_cast<std::size_t>(INT_MAX)) {
    throw CapacityError("p^" + std::to_string(m) + " exceeds the sparse index range", SIZE_MAX);
  }
  return model.column_structured() ? column_event_moment(model, m, dim, cap_bytes)
                                   : atom_moment(model, m, dim, cap_bytes);
}

const SparseMatrix& MomentSet::power(unsigned m) const {
  if (m == 2) return second;
  const auto it = higher.find(m);
  if (it == higher.end()) throw InvalidInput("moment of order " + std::to_string(m) + " not computed");
  return it->second;
}

Matrix to_dense(const SparseMatrix& s, std::size_t cap_bytes) {
  const auto rows = static_cast<std::size_t>(s.rows());
  const auto cols = static_cast<std::size_t>(s.cols());
  if (rows != 0 && cols > cap_bytes / sizeof(double) / rows) {
    throw CapacityError("dense copy of sparse moment exceeds memory cap", rows * cols * sizeof(double));
  }
  Matrix d(rows, cols);
  for (Eigen::Index r = 0; r < s.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(s, r); it; ++it) {
      d(static_cast<std::size_t>(it.row()), static_cast<std::size_t>(it.col())) = it.value();
    }
  }
  return d;
}

Matrix mean_matrix(const GossipModel& model) { return to_dense(kronecker_moment(model, 1)); }

MomentSet moments(const GossipModel& model, unsigned k, std::size_t cap_bytes) {
  if (k == 0) throw InvalidInput("moments: k must be positive");
  MomentSet out;
  out.mean = to_dense(kronecker_moment(model, 1, cap_bytes), cap_bytes);
  out.second = kronecker_moment(model, 2, cap_bytes);
  for (unsigned j = 2; j <= k; ++j) out.higher.emplace(2 * j, kronecker_moment(model, 2 * j, cap_bytes));
  return out;
}

std::vector<SupportPattern> support_patterns(const GossipModel& model) {
  std::vector<SupportPattern> out;
  const std::size_t p = model.size();
  for (const auto& e : model.column_events()) {
    out.push_back(support_pattern(e.realize(p, e.is_segment() ? 0.5 : 0.0)));
  }
  for (const auto& a : model.atoms()) out.push_back(support_pattern(a.matrix));
  return out;
}

}  // namespace pushsum
