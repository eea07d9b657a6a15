#pragma once

#include <Eigen/SparseCore>

#include <cstddef>
#include <map>
#include <string_view>
#include <vector>

#include "pushsum/graphs.hpp"
#include "pushsum/linalg.hpp"
#include "pushsum/primitivity.hpp"
#include "pushsum/random.hpp"

namespace pushsum {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

enum class GossipKind { Reference, TwoWay, Slowed, Averaging, Custom };

std::string_view to_string(GossipKind kind);
/// Accepts "reference", "two-way", "slowed"; throws InvalidInput otherwise.
GossipKind parse_gossip_kind(std::string_view name);

struct Entry {
  std::size_t row = 0;
  double value = 0.0;
};

/// Identity except for column `sender`, which equals base + t * slope with
/// t uniform on [0, 1]. An empty slope makes the event a point mass.
struct ColumnEvent {
  double probability = 0.0;
  std::size_t sender = 0;
  std::vector<Entry> base;
  std::vector<Entry> slope;

  bool is_segment() const noexcept { return !slope.empty(); }
  Matrix realize(std::size_t p, double t) const;
};

struct Atom {
  double probability = 0.0;
  Matrix matrix;
};

/// One sampled update in structured form: the identity with column
/// `sender` replaced by `column` (at most three non-zeros).
struct ColumnUpdate {
  std::size_t sender = 0;
  Entry column[3];
  std::size_t count = 0;

  Matrix to_matrix(std::size_t p) const;
};

/// Distribution of the i.i.d. update matrices A_n.
///
/// The three gossip protocols are stored as column events, which keeps the
/// moment assembly proportional to the local neighbourhoods. Arbitrary finite
/// distributions are stored as dense atoms.
class GossipModel {
 public:
  /// Sender uniform, receiver uniform over its neighbours, half the mass moves.
  static GossipModel reference(const UndirectedGraph& g);
  /// Sender uniform; two distinct uniform neighbours split half the mass as
  /// t/2 and (1-t)/2 with t ~ U[0,1]. Degree-one senders behave as reference.
  static GossipModel two_way(const UndirectedGraph& g);
  /// Reference with a quarter of the mass sent; two steps per time unit.
  static GossipModel slowed(const UndirectedGraph& g);
  /// Uniform edge, both endpoints replaced by their average (doubly stochastic).
  static GossipModel pairwise_averaging(const UndirectedGraph& g);
  static GossipModel make(GossipKind kind, const UndirectedGraph& g);
  /// Finite distribution; each atom must be column-stochastic, probabilities sum to 1.
  static GossipModel from_atoms(std::vector<Atom> atoms, int steps_per_time_unit = 1);

  GossipKind kind() const noexcept { return kind_; }
  std::size_t size() const noexcept { return p_; }
  int steps_per_time_unit() const noexcept { return steps_per_time_unit_; }
  double send_fraction() const noexcept { return send_fraction_; }
  bool column_structured() const noexcept { return atoms_.empty(); }

  const std::vector<ColumnEvent>& column_events() const noexcept { return events_; }
  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  /// Present for graph-based models.
  const UndirectedGraph* graph() const noexcept { return graph_valid_ ? &graph_ : nullptr; }

  /// Every realisable matrix is a convex combination of these, each with the
  /// probability weight of its event (segment endpoints share the weight).
  std::vector<Matrix> extreme_realizations() const;

 private:
  GossipModel() = default;
  static GossipModel from_graph(GossipKind kind, const UndirectedGraph& g);

  GossipKind kind_ = GossipKind::Custom;
  std::size_t p_ = 0;
  int steps_per_time_unit_ = 1;
  double send_fraction_ = 0.0;
  UndirectedGraph graph_;
  bool graph_valid_ = false;
  std::vector<ColumnEvent> events_;
  std::vector<Atom> atoms_;
  std::vector<double> atom_cdf_;

  friend ColumnUpdate sample_update(const GossipModel&, Rng&);
  friend std::size_t sample_atom(const GossipModel&, Rng&);
};

/// Draws by the protocol rule. Column-structured models only.
ColumnUpdate sample_update(const GossipModel& model, Rng& rng);
/// Index into atoms(). Atom models only.
std::size_t sample_atom(const GossipModel& model, Rng& rng);
/// Dense draw for any model.
ColumnStochasticMatrix sample(const GossipModel& model, Rng& rng);

/// Exact E(A^{(x)m}) as a sparse p^m x p^m matrix. Segment events are
/// integrated in closed form: A(t)^{(x)m} is a polynomial in t and
/// E t^a = 1/(a+1). Throws CapacityError if the assembly would exceed cap_bytes.
SparseMatrix kronecker_moment(const GossipModel& model, unsigned m,
                              std::size_t cap_bytes = kDefaultMemoryCapBytes);

struct MomentSet {
  Matrix mean;
  SparseMatrix second;
  std::map<unsigned, SparseMatrix> higher;  ///< power 2k -> E(A^{(x)2k}), k >= 2

  /// E(A^{(x)m}) for m = 2 or a stored higher power.
  const SparseMatrix& power(unsigned m) const;
};

/// Mean, second moment, and E(A^{(x)2k}) when k >= 2.
MomentSet moments(const GossipModel& model, unsigned k, std::size_t cap_bytes = kDefaultMemoryCapBytes);

Matrix mean_matrix(const GossipModel& model);

/// One pattern per event; segment events contribute their interior pattern,
/// which is entrywise no smaller than either endpoint's.
std::vector<SupportPattern> support_patterns(const GossipModel& model);

Matrix to_dense(const SparseMatrix& s, std::size_t cap_bytes = kDefaultMemoryCapBytes);

}  // namespace pushsum
