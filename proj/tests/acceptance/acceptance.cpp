// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "pushsum/gossip.hpp"
#include "pushsum/graphs.hpp"
#include "pushsum/primitivity.hpp"
#include "pushsum/random.hpp"
#include "pushsum/simulate.hpp"
#include "pushsum/spectral.hpp"

using namespace pushsum;

namespace {

constexpr std::uint64_t kSeed = 20240601;
const GossipKind kKinds[] = {GossipKind::Reference, GossipKind::TwoWay, GossipKind::Slowed};

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a = 0, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

UndirectedGraph path(std::size_t p) {
  std::vector<Edge> e;
  for (std::size_t i = 0; i + 1 < p; ++i) e.emplace_back(i, i + 1);
  return UndirectedGraph(p, e);
}

UndirectedGraph random_connected(std::size_t p, double q, std::uint64_t seed) {
  Rng rng(seed);
  UndirectedGraph g(p);
  for (std::size_t i = 1; i < p; ++i) g.add_edge(i, uniform_index(rng, i));
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i + 1; j < p; ++j)
      if (uniform01(rng) < q) g.add_edge(i, j);
  return g;
}

Matrix dense_kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

double eigen_radius(const Matrix& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  return Eigen::EigenSolver<Eigen::MatrixXd>(e, false).eigenvalues().cwiseAbs().maxCoeff();
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::size_t col(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw std::runtime_error("missing column " + name);
  }
};

CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::string cur;
    for (char c : line) {
      if (c == ',') {
        f.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    f.push_back(cur);
    if (first) {
      t.header = f;
      first = false;
    } else {
      t.rows.push_back(f);
    }
  }
  return t;
}

int run_cli(const std::vector<std::string>& args, std::string& out) {
  std::vector<std::string> full{"pushsum-cli"};
  full.insert(full.end(), args.begin(), args.end());
  std::ostringstream o, e;
  const int code = pushsum_cli::run_cli(full, o, e);
  out = o.str();
  if (!e.str().empty()) std::fprintf(stderr, "%s", e.str().c_str());
  return code;
}

const std::vector<std::string> kDeskSweep = {"rgg-sweep", "--seed", std::to_string(kSeed), "--p0", "64",
                                             "--trials", "50", "--steps", "20000", "--c-count", "50",
                                             "--target-fraction", "0.9", "--model", "reference"};
std::string g_desk_csv;

// ---------------------------------------------------------------- criteria

Outcome ac1() {
  const auto t0 = std::chrono::steady_clock::now();
  const GossipModel m = GossipModel::reference(path(2));
  const BoundReport b = bound_report(m);
  // 4x4 oracle: each event's B = A(I-J); average B (x) B
  const Matrix c = centering_projection(2);
  Matrix acc(4, 4);
  for (const Matrix& a : {Matrix{{0.5, 0}, {0.5, 1}}, Matrix{{1, 0.5}, {0, 0.5}}}) {
    const Matrix bb = a * c;
    acc += 0.5 * dense_kron(bb, bb);
  }
  const double oracle_half = 0.5 * std::log(eigen_radius(acc));
  const TrialResult r = run_trial(m, 10000, derive_seed(kSeed, 10, 0));
  const double secs = seconds_since(t0);
  const double target = -std::log(2.0);
  const bool ok = std::abs(b.eta2_half - target) <= 1e-9 && std::abs(oracle_half - target) <= 1e-9 &&
                  std::abs(r.empirical_rate - target) <= 0.01 && secs < 1.0;
  return {ok, fmt("eta2/2=%.12f empirical=%.6f time=%.3fs", b.eta2_half, r.empirical_rate, secs)};
}

Outcome ac2() {
  const auto t0 = std::chrono::steady_clock::now();
  const int code = run_cli(kDeskSweep, g_desk_csv);
  const double secs = seconds_since(t0);
  if (code != 0) return {false, "sweep exited with " + std::to_string(code)};
  const CsvTable t = parse_csv(g_desk_csv);
  const std::size_t ib = t.col("eta2_half"), ie = t.col("empirical_rate");
  std::size_t within = 0, violations = 0;
  double worst_violation = 0.0;
  for (const auto& row : t.rows) {
    const double bound = std::stod(row[ib]), emp = std::stod(row[ie]);
    if (emp <= bound + 1e-3) ++within;
    if (emp > bound) {
      ++violations;
      worst_violation = std::max(worst_violation, emp - bound);
    }
  }
  const double frac = t.rows.empty() ? 0.0 : static_cast<double>(within) / t.rows.size();
  const bool ok = t.rows.size() == 50 && frac >= 0.96 && worst_violation < 1e-4 && secs < 600.0;
  return {ok, fmt("within=%.2f violations=%.0f worst=%.3g", frac, violations, worst_violation) +
                  fmt(" time=%.1fs", secs)};
}

Outcome ac3() {
  double worst = -INFINITY;
  std::size_t checked = 0;
  for (std::size_t i = 0; i < 20; ++i) {
    const double c = static_cast<double>(i) / 19.0;
    const RggInstance inst = make_rgg_instance(64, c, derive_seed(kSeed, 30, i), 0.9);
    for (GossipKind k : kKinds) {
      const EtaResult e = eta(GossipModel::make(k, inst.giant.graph), 1);
      worst = std::max(worst, e.converged ? e.value : 0.0);
      ++checked;
    }
  }
  return {worst < -1e-6, fmt("instances=%.0f max eta2=%.3e", checked, worst)};
}

Outcome ac4() {
  const UndirectedGraph g = random_connected(20, 0.15, derive_seed(kSeed, 40, 0));
  double worst_x = 0.0, worst_w = 0.0;
  for (GossipKind k : kKinds) {
    const GossipModel m = GossipModel::make(k, g);
    Rng rng(derive_seed(kSeed, 41, static_cast<int>(k)));
    std::vector<double> x0(20);
    for (auto& v : x0) v = 2.0 * uniform01(rng) - 0.5;
    const double sx0 = std::accumulate(x0.begin(), x0.end(), 0.0);
    PushSumState s = PushSumState::start(x0);
    for (int n = 0; n < 100000; ++n) step(s, sample_update(m, rng));
    const double sx = std::accumulate(s.x.begin(), s.x.end(), 0.0);
    const double sw = std::accumulate(s.w.begin(), s.w.end(), 0.0);
    worst_x = std::max(worst_x, std::abs(sx - sx0) / std::abs(sx0));
    worst_w = std::max(worst_w, std::abs(sw - 20.0) / 20.0);
  }
  return {worst_x <= 1e-10 && worst_w <= 1e-10, fmt("rel drift x=%.2e w=%.2e", worst_x, worst_w)};
}

Outcome ac5() {
  const UndirectedGraph g = random_connected(10, 0.2, derive_seed(kSeed, 50, 0));
  double worst = 0.0, nmax = 0.0;
  for (GossipKind k : kKinds) {
    const GossipModel m = GossipModel::make(k, g);
    const double e2 = eta(m, 1).value;
    // n counts multiplications here; eta2 is per multiplication
    const auto n_mult = static_cast<std::uint64_t>(std::ceil(50.0 / std::abs(e2)));
    const std::uint64_t n = (n_mult + m.steps_per_time_unit() - 1) / m.steps_per_time_unit();
    Rng rng(derive_seed(kSeed, 51, static_cast<int>(k)));
    std::vector<double> x0(10);
    for (auto& v : x0) v = 2.0 * uniform01(rng) - 1.0;
    const double mean = std::accumulate(x0.begin(), x0.end(), 0.0) / 10.0;
    for (auto& v : x0) v += 3.0 - mean;  // zero-mean perturbation around a constant shift
    TrialOptions opts;
    opts.x0 = x0;
    opts.check_assumptions = false;
    const TrialResult r = run_trial(m, n, derive_seed(kSeed, 52, static_cast<int>(k)), opts);
    worst = std::max(worst, r.readout_error);
    nmax = std::max(nmax, static_cast<double>(n));
  }
  return {worst <= 1e-8, fmt("max readout error=%.3e at n<=%.0f", worst, nmax)};
}

Outcome ac6() {
  double worst_mono = INFINITY, worst_mid = INFINITY;
  bool all = true;
  for (std::size_t i = 0; i < 10; ++i) {
    const std::size_t p = 2 + i % 5;
    const UndirectedGraph g = random_connected(p, 0.3, derive_seed(kSeed, 60, i));
    const ConvexityReport r = check_eta_convexity(GossipModel::reference(g), 2);
    all = all && r.holds;
    worst_mono = std::min(worst_mono, r.eta[2] / 4 - r.eta[1] / 2);
    worst_mid = std::min(worst_mid, std::exp(r.eta[0]) * std::exp(r.eta[2]) - std::exp(r.eta[1]) * std::exp(r.eta[1]));
  }
  const bool ok = all && worst_mono >= -1e-9 && worst_mid >= -1e-9;
  return {ok, fmt("min(eta4/4-eta2/2)=%.3e min midpoint slack=%.3e", worst_mono, worst_mid)};
}

Outcome ac7() {
  Rng rng(derive_seed(kSeed, 70, 0));
  double worst = INFINITY;
  for (int pair = 0; pair < 100; ++pair) {
    std::vector<CoupledAtom> atoms(4);
    double total = 0;
    for (auto& a : atoms) {
      a.probability = 0.05 + uniform01(rng);
      total += a.probability;
      a.x = Matrix(3, 3);
      a.y = Matrix(3, 3);
      for (auto& v : a.x.data()) v = 2.0 * uniform01(rng) - 1.0;
      for (auto& v : a.y.data()) v = 2.0 * uniform01(rng) - 1.0;
    }
    for (auto& a : atoms) a.probability /= total;
    worst = std::min(worst, cs_tensor_check(atoms).slack);
  }
  return {worst >= -1e-10, fmt("min slack=%.3e over 100 pairs", worst)};
}

Outcome ac8() {
  const SupportPattern id = SupportPattern::identity(2);
  const SupportPattern swap = SupportPattern::from_rows({{0, 1}, {1, 0}});
  const SupportPattern upper = SupportPattern::from_rows({{1, 1}, {0, 1}});
  bool ok = is_primitive_set({id, swap}) == Primitivity::NotPrimitive &&
            is_primitive_set({swap, upper}) == Primitivity::Primitive;
  // necessity over every model used in this suite plus degenerate ones
  std::size_t models = 0;
  std::vector<GossipModel> ms;
  for (std::size_t i = 0; i < 8; ++i) {
    const UndirectedGraph g = random_connected(3 + i, 0.25, derive_seed(kSeed, 80, i));
    for (GossipKind k : kKinds) ms.push_back(GossipModel::make(k, g));
  }
  ms.push_back(GossipModel::reference(UndirectedGraph(4, {{0, 1}, {2, 3}})));
  ms.push_back(GossipModel::from_atoms({{0.5, Matrix::identity(2)}, {0.5, Matrix{{0, 1}, {1, 0}}}}));
  for (const auto& m : ms) {
    ++models;
    if (is_primitive_set(support_patterns(m)) == Primitivity::Primitive) ok = ok && is_irreducible(mean_matrix(m));
  }
  // tensor stability on all primitive generator pairs drawn for p <= 3
  Rng rng(derive_seed(kSeed, 81, 0));
  std::size_t stable_checked = 0;
  while (stable_checked < 30) {
    const std::size_t p = 2 + stable_checked % 2;
    std::vector<SupportPattern> gens(2, SupportPattern(p)), sq;
    for (auto& g : gens)
      for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j)
          if (uniform01(rng) < 0.5) g.set(i, j);
    if (is_primitive_set(gens) != Primitivity::Primitive) continue;
    for (const auto& g : gens) sq.push_back(kron(g, g));
    ok = ok && is_primitive_set(sq) == Primitivity::Primitive;
    ++stable_checked;
  }
  return {ok, fmt("examples ok, necessity on %.0f models, tensor stability on %.0f sets", models, stable_checked)};
}

Outcome ac9() {
  double worst = 0.0;
  for (GossipKind k : kKinds) {
    const RggInstance inst = make_rgg_instance(64, 0.5, derive_seed(kSeed, 90, 0), 0.9);
    const TrialResult r = run_trial(GossipModel::make(k, inst.giant.graph), 100000,
                                    derive_seed(kSeed, 91, static_cast<int>(k)));
    worst = std::max(worst, r.weight_diag);
  }
  return {worst <= 0.01, fmt("max (1/n) log(1/min w)=%.3e at n=100000", worst)};
}

Outcome ac10() {
  const UndirectedGraph g = grow_cycle(50, 500, derive_seed(kSeed, 100, 0)).graph_at(500);
  const double ref = bound_report(GossipModel::reference(g)).time_normalized_bound;
  const double two = bound_report(GossipModel::two_way(g)).time_normalized_bound;
  const double slow = bound_report(GossipModel::slowed(g)).time_normalized_bound;
  return {slow <= two && two <= ref, fmt("slowed=%.6e two-way=%.6e reference=%.6e", slow, two, ref)};
}

Outcome ac11() {
  const UndirectedGraph g = random_connected(5, 0.3, derive_seed(kSeed, 110, 0));
  double worst = 0.0;
  for (GossipKind k : kKinds) {
    const GossipModel m = GossipModel::make(k, g);
    Rng rng(derive_seed(kSeed, 111, static_cast<int>(k)));
    Matrix acc(25, 25);
    for (int s = 0; s < 100000; ++s) {
      const Matrix a = sample(m, rng).matrix();
      acc += dense_kron(a, a);
    }
    acc *= 1e-5;
    worst = std::max(worst, max_abs_diff(acc, to_dense(kronecker_moment(m, 2))));
  }
  return {worst <= 1e-2, fmt("max entrywise deviation=%.3e", worst)};
}

Outcome ac12() {
  if (g_desk_csv.empty()) return {false, "desk sweep output unavailable"};
  auto args = kDeskSweep;
  args.insert(args.end(), {"--threads", "2"});
  std::string second;
  const int code = run_cli(args, second);
  const bool ok = code == 0 && second == g_desk_csv;
  return {ok, fmt("bytes=%.0f identical=%.0f", static_cast<double>(second.size()), ok ? 1.0 : 0.0)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"AC1  analytic tightness on the 2-path", ac1},
      {"AC2  rate bound at desk scale", ac2},
      {"AC3  negativity of eta2", ac3},
      {"AC4  conservation of x and w", ac4},
      {"AC5  readout convergence", ac5},
      {"AC6  monotonicity and convexity of eta_2k", ac6},
      {"AC7  tensor Cauchy-Schwarz", ac7},
      {"AC8  primitivity checkers", ac8},
      {"AC9  sub-exponential weights", ac9},
      {"AC10 bound ordering on cycle plus 500 edges", ac10},
      {"AC11 Monte Carlo second moment", ac11},
      {"AC12 determinism of the desk sweep", ac12},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o{false, ""};
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %s  (%s)\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
