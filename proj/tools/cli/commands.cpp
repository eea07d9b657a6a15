#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "handles.hpp"
#include "output.hpp"

namespace pushsum_cli {

namespace {

// ---------------------------------------------------------------- config

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool given(const std::vector<std::string>& args, const std::string& flag) {
  return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
    return a == flag || a.rfind(flag + "=", 0) == 0;
  });
}

// ---------------------------------------------------------------- options

struct Common {
  std::string config;
  std::string out = "-";
  std::string svg;
  std::optional<std::uint64_t> seed;
  std::size_t trials = 50;
  std::uint64_t steps = 20000;
  bool best_effort = false;
  unsigned threads = 1;
};

struct GraphSource {
  std::string file;
  std::size_t p0 = 0;
  double c = 0.0;
  double target_fraction = 0.9;
  std::size_t cycle_p = 0;
  std::size_t extra_edges = 0;
};

void add_common(CLI::App* sub, Common& c, bool seed_required) {
  sub->add_option("--config", c.config, "key = value file; command-line flags win");
  sub->add_option("--out", c.out, "CSV output path ('-' for stdout)");
  sub->add_option("--svg", c.svg, "optional SVG plot path");
  auto* seed = sub->add_option("--seed", c.seed, "base seed for all randomness");
  if (seed_required) seed->required();
  sub->add_option("--trials", c.trials, "number of instances");
  sub->add_option("--steps", c.steps, "time units per simulated trial");
  sub->add_flag("--best-effort", c.best_effort, "exit 0 despite capacity or convergence failures");
  sub->add_option("--threads", c.threads, "worker threads for independent trials")->check(CLI::Range(1u, 1024u));
}

void add_graph_source(CLI::App* sub, GraphSource& g) {
  sub->add_option("--graph", g.file, "edge-list file");
  sub->add_option("--p0", g.p0, "generate a geometric graph on p0 (perfect square) sites");
  sub->add_option("--c", g.c, "grid-to-random interpolation coefficient in [0, 1]")->check(CLI::Range(0.0, 1.0));
  sub->add_option("--target-fraction", g.target_fraction, "giant-component fraction for the radius");
  sub->add_option("--cycle-p", g.cycle_p, "generate a cycle on this many nodes");
  sub->add_option("--extra-edges", g.extra_edges, "random edges added to the cycle");
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw CliError(2, msg);
}

bool perfect_square(std::size_t n) {
  auto s = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
  return s * s == n;
}

void validate_rgg(std::size_t p0, double target) {
  require(p0 >= 4 && perfect_square(p0), "--p0 must be a perfect square >= 4");
  require(target > 0.0 && target <= 1.0, "--target-fraction must lie in (0, 1]");
}

void validate_cycle(std::size_t p, std::size_t extra) {
  require(p >= 3, "--cycle-p must be at least 3");
  require(extra <= p * (p - 1) / 2 - p, "--extra-edges exceeds the number of non-cycle pairs");
}

struct LoadedGraph {
  Graph graph;
  std::string source;
};

LoadedGraph load_graph(const GraphSource& g, const Common& c) {
  const int chosen = !g.file.empty() + (g.p0 != 0) + (g.cycle_p != 0);
  require(chosen == 1, "choose exactly one graph source: --graph, --p0 or --cycle-p");
  if (!g.file.empty()) return {read_graph(g.file), g.file};
  require(c.seed.has_value(), "--seed is required to generate a graph");
  std::ostringstream src;
  if (g.p0 != 0) {
    validate_rgg(g.p0, g.target_fraction);
    src << "rgg:p0=" << g.p0 << ";c=" << format_real(g.c) << ";seed=" << *c.seed;
    return {rgg_graph(g.p0, g.c, *c.seed, g.target_fraction, nullptr), src.str()};
  }
  validate_cycle(g.cycle_p, g.extra_edges);
  src << "cycle:p=" << g.cycle_p << ";extra=" << g.extra_edges << ";seed=" << *c.seed;
  return {cycle_graph(g.cycle_p, g.extra_edges, *c.seed, g.extra_edges), src.str()};
}

std::vector<pushsum_model_kind> parse_models(const std::vector<std::string>& names) {
  std::vector<pushsum_model_kind> out;
  for (const auto& n : names) out.push_back(parse_kind(n));
  require(!out.empty(), "--models must name at least one model");
  return out;
}

std::vector<double> c_grid(const std::vector<double>& explicit_grid, std::size_t count) {
  if (!explicit_grid.empty()) {
    for (double c : explicit_grid) require(c >= 0.0 && c <= 1.0, "--c-grid values must lie in [0, 1]");
    return explicit_grid;
  }
  require(count >= 1, "--c-count must be positive");
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i) {
    grid[i] = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return grid;
}

/// Opens --out; "-" is the caller's stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (path != "-") {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw CliError(2, "cannot write " + path);
      stream_ = file_.get();
    }
  }
  std::ostream& get() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

std::string status_text(pushsum_status s) { return pushsum_status_name(s); }

const char* color_for(pushsum_model_kind k) {
  switch (k) {
    case PUSHSUM_MODEL_REFERENCE:
      return "#2ca02c";
    case PUSHSUM_MODEL_TWO_WAY:
      return "#d62728";
    case PUSHSUM_MODEL_SLOWED:
      return "#1f77b4";
    default:
      return "#7f7f7f";
  }
}

// ---------------------------------------------------------------- evaluation

// One model on one graph: bound and an empirical trial.
struct Evaluation {
  double eta2 = NAN;
  double bound = NAN;  // steps_per_time_unit * eta2 / 2
  double empirical = NAN;
  double weight_diag = NAN;
  std::size_t warnings = 0;
  std::string status = "ok";
  int severity = 0;  // exit code contribution
};

Evaluation evaluate(const pushsum_graph* g, pushsum_model_kind kind, std::uint64_t steps, std::uint64_t sim_seed) {
  Evaluation ev;
  try {
    const Model m = make_model(g, kind);
    pushsum_bound b{};
    const pushsum_status bs = pushsum_bound_report(m.get(), &b);
    if (bs != PUSHSUM_OK && bs != PUSHSUM_NOT_CONVERGED) check(bs, "bound");
    ev.eta2 = b.eta2;
    ev.bound = b.time_normalized_bound;
    if (bs == PUSHSUM_NOT_CONVERGED) {
      ev.status = status_text(bs);
      ev.severity = 1;
    }
    pushsum_trial_result r{};
    check(pushsum_run_trial(m.get(), steps, sim_seed, &ev.bound, nullptr, &r), "trial");
    ev.empirical = r.empirical_rate;
    ev.weight_diag = r.weight_diag;
    ev.warnings = r.warning_count;
  } catch (const CliError& e) {
    ev.status = e.what();
    ev.severity = e.code();
  }
  return ev;
}

int finish(int worst, const Common& c) { return c.best_effort && worst != 2 ? 0 : worst; }

// ---------------------------------------------------------------- bound

int cmd_bound(const Common& c, const GraphSource& gs, const std::vector<std::string>& model_names,
              const std::vector<unsigned>& ks, std::ostream& out, std::ostream& err) {
  for (unsigned k : ks) require(k >= 1, "--k values must be positive");
  const auto kinds = parse_models(model_names);
  const LoadedGraph lg = load_graph(gs, c);
  Sink sink(c.out, out);
  CsvWriter csv(sink.get());
  csv.header({"source", "p", "edges", "model", "k", "eta_2k", "eta_2k_over_2k", "time_normalized_bound", "converged",
              "assumption_ok", "status"});
  int worst = 0;
  std::vector<Model> models;
  for (auto kind : kinds) models.push_back(make_model(lg.graph.get(), kind));
  for (std::size_t mi = 0; mi < kinds.size(); ++mi) {
    const pushsum_model* m = models[mi].get();
    pushsum_assumption_report ar{};
    check(pushsum_check_assumption(m, 0, &ar), "assumption check");
    if (!ar.all_pass) {
      err << "warning: " << pushsum_model_kind_name(kinds[mi]) << " model fails the assumption checks\n";
    }
    const double steps = pushsum_model_steps_per_time_unit(m);
    for (unsigned k : ks) {
      double v = NAN;
      const pushsum_status s = pushsum_eta(m, k, &v);
      if (s == PUSHSUM_CAPACITY) {
        v = NAN;
        worst = std::max(worst, 3);
        err << "capacity: k=" << k << ": " << pushsum_last_error() << "\n";
      } else if (s == PUSHSUM_NOT_CONVERGED) {
        worst = std::max(worst, 1);
      } else {
        check(s, "eta");
      }
      const double per = v / (2.0 * k);
      csv.field(lg.source).field(std::uint64_t{pushsum_graph_node_count(lg.graph.get())})
          .field(std::uint64_t{pushsum_graph_edge_count(lg.graph.get())})
          .field(pushsum_model_kind_name(kinds[mi])).field(static_cast<int>(k)).field(v).field(per)
          .field(steps * per).field(s == PUSHSUM_OK ? 1 : 0).field(ar.all_pass).field(status_text(s));
      csv.end_row();
    }
  }
  return finish(worst, c);
}

// ---------------------------------------------------------------- rgg-sweep

int cmd_rgg_sweep(const Common& c, std::size_t p0, double target, const std::vector<double>& grid_in,
                  std::size_t c_count, const std::string& model_name, std::size_t window, std::ostream& out,
                  std::ostream& err) {
  validate_rgg(p0, target);
  require(c.steps >= 1, "--steps must be positive");
  require(window >= 1, "--window must be positive");
  const auto grid = c_grid(grid_in, c_count);
  const pushsum_model_kind kind = parse_kind(model_name);
  const std::uint64_t seed = *c.seed;

  struct Row {
    double c = 0, radius = NAN;
    std::uint64_t graph_seed = 0, sim_seed = 0;
    std::size_t p = 0;
    Evaluation ev;
  };
  std::vector<Row> rows(c.trials);
  parallel_for(c.trials, c.threads, [&](std::size_t t) {
    Row& r = rows[t];
    r.c = grid[t % grid.size()];
    r.graph_seed = pushsum_derive_seed(seed, 1, t);
    r.sim_seed = pushsum_derive_seed(seed, 2, t);
    try {
      const Graph g = rgg_graph(p0, r.c, r.graph_seed, target, &r.radius);
      r.p = pushsum_graph_node_count(g.get());
      r.ev = evaluate(g.get(), kind, c.steps, r.sim_seed);
    } catch (const CliError& e) {
      r.ev.status = e.what();
      r.ev.severity = e.code();
    }
  });

  Sink sink(c.out, out);
  CsvWriter csv(sink.get());
  csv.header({"trial", "c", "graph_seed", "sim_seed", "p", "radius", "model", "eta2_half", "bound", "empirical_rate",
              "difference", "weight_diag", "warnings", "status"});
  int worst = 0;
  for (std::size_t t = 0; t < rows.size(); ++t) {
    const Row& r = rows[t];
    if (r.ev.status != "ok") err << "trial " << t << ": " << r.ev.status << "\n";
    worst = std::max(worst, r.ev.severity == 2 ? 0 : r.ev.severity);
    csv.field(std::uint64_t{t}).field(r.c).field(r.graph_seed).field(r.sim_seed).field(std::uint64_t{r.p})
        .field(r.radius).field(pushsum_model_kind_name(kind)).field(r.ev.eta2 / 2.0).field(r.ev.bound)
        .field(r.ev.empirical).field(r.ev.bound - r.ev.empirical).field(r.ev.weight_diag)
        .field(std::uint64_t{r.ev.warnings}).field(r.ev.status);
    csv.end_row();
  }

  if (!c.svg.empty()) {
    std::vector<std::size_t> order(rows.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return rows[a].c < rows[b].c; });
    std::vector<double> xs, bound, emp, diff;
    for (auto i : order) {
      xs.push_back(rows[i].c);
      bound.push_back(rows[i].ev.bound);
      emp.push_back(rows[i].ev.empirical);
      diff.push_back(rows[i].ev.bound - rows[i].ev.empirical);
    }
    Panel rates{"Empirical rate and bound per instance", "c", "rate", {}};
    rates.series.push_back({"bound", xs, bound, "#000000", true});
    rates.series.push_back({"empirical", xs, emp, "#2ca02c", true});
    rates.series.push_back({"bound (avg)", xs, moving_average(bound, window), "#000000", false});
    rates.series.push_back({"empirical (avg)", xs, moving_average(emp, window), "#2ca02c", false});
    Panel gap{"Bound minus empirical rate", "c", "difference", {}};
    gap.series.push_back({"difference", xs, diff, "#9467bd", true});
    gap.series.push_back({"difference (avg)", xs, moving_average(diff, window), "#9467bd", false});
    gap.series.push_back({"zero", {xs.empty() ? 0.0 : xs.front(), xs.empty() ? 1.0 : xs.back()}, {0.0, 0.0},
                          "#888888", false});
    write_svg(c.svg, {rates, gap});
  }
  return finish(worst, c);
}

// ---------------------------------------------------------------- variant-compare

const std::vector<pushsum_model_kind> kAllKinds = {PUSHSUM_MODEL_REFERENCE, PUSHSUM_MODEL_TWO_WAY,
                                                   PUSHSUM_MODEL_SLOWED};

int cmd_variant_compare(const Common& c, const GraphSource& gs, const std::vector<double>& grid_in,
                        std::size_t c_count, std::size_t window, std::ostream& out, std::ostream& err) {
  const bool fixed_graph = !gs.file.empty();
  if (!fixed_graph) {
    validate_rgg(gs.p0, gs.target_fraction);
  }
  require(c.steps >= 1, "--steps must be positive");
  const std::size_t p0 = gs.p0;
  const auto grid = c_grid(grid_in, c_count);
  const std::uint64_t seed = *c.seed;
  const std::size_t trials = fixed_graph ? 1 : c.trials;

  struct Row {
    double c = NAN;
    std::uint64_t graph_seed = 0, sim_seed = 0;
    std::size_t p = 0;
    Evaluation ev[3];
  };
  std::vector<Row> rows(trials);
  parallel_for(trials, c.threads, [&](std::size_t t) {
    Row& r = rows[t];
    r.sim_seed = pushsum_derive_seed(seed, 2, t);
    try {
      Graph g;
      if (fixed_graph) {
        g = read_graph(gs.file);
      } else {
        r.c = grid[t % grid.size()];
        r.graph_seed = pushsum_derive_seed(seed, 1, t);
        g = rgg_graph(p0, r.c, r.graph_seed, gs.target_fraction, nullptr);
      }
      r.p = pushsum_graph_node_count(g.get());
      for (std::size_t k = 0; k < 3; ++k) r.ev[k] = evaluate(g.get(), kAllKinds[k], c.steps, r.sim_seed);
    } catch (const CliError& e) {
      for (auto& ev : r.ev) ev.status = e.what(), ev.severity = e.code();
    }
  });

  Sink sink(c.out, out);
  CsvWriter csv(sink.get());
  csv.header({"trial", "c", "graph_seed", "sim_seed", "p", "model", "bound", "empirical_rate",
              "bound_minus_reference", "empirical_minus_reference", "weight_diag", "status"});
  int worst = 0;
  for (std::size_t t = 0; t < rows.size(); ++t) {
    const Row& r = rows[t];
    for (std::size_t k = 0; k < 3; ++k) {
      const Evaluation& ev = r.ev[k];
      if (ev.status != "ok") err << "trial " << t << " " << pushsum_model_kind_name(kAllKinds[k]) << ": " << ev.status << "\n";
      worst = std::max(worst, ev.severity == 2 ? 0 : ev.severity);
      csv.field(std::uint64_t{t}).field(r.c).field(r.graph_seed).field(r.sim_seed).field(std::uint64_t{r.p})
          .field(pushsum_model_kind_name(kAllKinds[k])).field(ev.bound).field(ev.empirical)
          .field(ev.bound - r.ev[0].bound).field(ev.empirical - r.ev[0].empirical).field(ev.weight_diag)
          .field(ev.status);
      csv.end_row();
    }
  }

  if (!c.svg.empty()) {
    std::vector<std::size_t> order(rows.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return rows[a].c < rows[b].c; });
    Panel bounds{"Bound relative to reference gossip", "c", "bound - reference", {}};
    Panel emp{"Empirical rate relative to reference gossip", "c", "rate - reference", {}};
    for (std::size_t k = 1; k < 3; ++k) {
      std::vector<double> xs, db, de;
      for (auto i : order) {
        xs.push_back(rows[i].c);
        db.push_back(rows[i].ev[k].bound - rows[i].ev[0].bound);
        de.push_back(rows[i].ev[k].empirical - rows[i].ev[0].empirical);
      }
      const std::string name = pushsum_model_kind_name(kAllKinds[k]);
      bounds.series.push_back({name, xs, db, color_for(kAllKinds[k]), true});
      bounds.series.push_back({name + " (avg)", xs, moving_average(db, window), color_for(kAllKinds[k]), false});
      emp.series.push_back({name, xs, de, color_for(kAllKinds[k]), true});
      emp.series.push_back({name + " (avg)", xs, moving_average(de, window), color_for(kAllKinds[k]), false});
    }
    write_svg(c.svg, {bounds, emp});
  }
  return finish(worst, c);
}

// ---------------------------------------------------------------- cycle-growth

int cmd_cycle_growth(const Common& c, std::size_t cycle_p, std::size_t extra, std::size_t stride,
                     std::size_t sequences, std::ostream& out, std::ostream& err) {
  validate_cycle(cycle_p, extra);
  require(stride >= 1, "--stride must be positive");
  require(c.steps >= 1, "--steps must be positive");
  const std::uint64_t seed = *c.seed;

  std::vector<std::size_t> prefixes;
  for (std::size_t k = 0; k <= extra; k += stride) prefixes.push_back(k);
  if (prefixes.back() != extra) prefixes.push_back(extra);

  struct Row {
    std::size_t sequence = 0, prefix = 0;
    std::uint64_t edge_seed = 0, sim_seed = 0;
    Evaluation ev[3];
  };
  std::vector<Row> rows(sequences * prefixes.size());
  parallel_for(rows.size(), c.threads, [&](std::size_t idx) {
    Row& r = rows[idx];
    r.sequence = idx / prefixes.size();
    r.prefix = prefixes[idx % prefixes.size()];
    r.edge_seed = pushsum_derive_seed(seed, 3, r.sequence);
    r.sim_seed = pushsum_derive_seed(pushsum_derive_seed(seed, 4, r.sequence), 0, r.prefix);
    try {
      const Graph g = cycle_graph(cycle_p, extra, r.edge_seed, r.prefix);
      for (std::size_t k = 0; k < 3; ++k) r.ev[k] = evaluate(g.get(), kAllKinds[k], c.steps, r.sim_seed);
    } catch (const CliError& e) {
      for (auto& ev : r.ev) ev.status = e.what(), ev.severity = e.code();
    }
  });

  Sink sink(c.out, out);
  CsvWriter csv(sink.get());
  csv.header({"sequence", "edge_seed", "edges_added", "model", "sim_seed", "eta2_half", "bound", "empirical_rate",
              "difference", "weight_diag", "status"});
  int worst = 0;
  for (const Row& r : rows) {
    for (std::size_t k = 0; k < 3; ++k) {
      const Evaluation& ev = r.ev[k];
      if (ev.status != "ok") err << "edges " << r.prefix << ": " << ev.status << "\n";
      worst = std::max(worst, ev.severity == 2 ? 0 : ev.severity);
      csv.field(std::uint64_t{r.sequence}).field(r.edge_seed).field(std::uint64_t{r.prefix})
          .field(pushsum_model_kind_name(kAllKinds[k])).field(r.sim_seed).field(ev.eta2 / 2.0).field(ev.bound)
          .field(ev.empirical).field(ev.bound - ev.empirical).field(ev.weight_diag).field(ev.status);
      csv.end_row();
    }
  }

  if (!c.svg.empty()) {
    Panel bounds{"Time-normalised bound along the edge sequence", "edges added", "bound", {}};
    Panel emp{"Empirical rate along the edge sequence", "edges added", "rate", {}};
    for (std::size_t k = 0; k < 3; ++k) {
      std::vector<double> xs, b, e;
      for (const Row& r : rows) {
        if (r.sequence != 0) continue;
        xs.push_back(static_cast<double>(r.prefix));
        b.push_back(r.ev[k].bound);
        e.push_back(r.ev[k].empirical);
      }
      const std::string name = pushsum_model_kind_name(kAllKinds[k]);
      bounds.series.push_back({name, xs, b, color_for(kAllKinds[k]), false});
      emp.series.push_back({name, xs, e, color_for(kAllKinds[k]), false});
    }
    write_svg(c.svg, {bounds, emp});
  }
  return finish(worst, c);
}

// ---------------------------------------------------------------- check

struct CheckItem {
  std::string name;
  std::string status;  // pass | fail | undetermined | skipped
  std::string value;
};

std::vector<std::vector<unsigned char>> read_patterns(const std::string& path, std::size_t& p) {
  std::ifstream in(path);
  if (!in) throw CliError(2, "cannot open pattern file " + path);
  std::size_t count = 0;
  require(static_cast<bool>(in >> p >> count) && p > 0, "pattern file: expected header \"p count\"");
  std::vector<std::vector<unsigned char>> out(count, std::vector<unsigned char>(p * p));
  for (auto& pat : out) {
    for (auto& b : pat) {
      int v = 0;
      require(static_cast<bool>(in >> v) && (v == 0 || v == 1), "pattern file: expected 0/1 entries");
      b = static_cast<unsigned char>(v);
    }
  }
  return out;
}

// Uniform doubles from the library's seed mixer, so the suite needs no
// implementation-defined distribution.
class SeedStream {
 public:
  explicit SeedStream(std::uint64_t seed) : seed_(seed) {}
  double uniform() {
    return static_cast<double>(pushsum_derive_seed(seed_, 7, counter_++) >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

int cmd_check(const Common& c, const GraphSource& gs, const std::string& model_name, unsigned kmax,
              std::size_t cs_pairs, const std::string& patterns_file, std::size_t cap, std::ostream& out) {
  std::vector<CheckItem> items;
  auto flag = [](bool ok) { return std::string(ok ? "pass" : "fail"); };
  auto prim = [](pushsum_primitivity p) {
    return std::string(p == PUSHSUM_PRIMITIVE ? "pass" : p == PUSHSUM_NOT_PRIMITIVE ? "fail" : "undetermined");
  };
  auto prim_value = [](pushsum_primitivity p) {
    return std::string(p == PUSHSUM_PRIMITIVE ? "primitive" : p == PUSHSUM_NOT_PRIMITIVE ? "not-primitive"
                                                                                        : "undetermined");
  };

  if (!patterns_file.empty()) {
    std::size_t p = 0;
    const auto pats = read_patterns(patterns_file, p);
    std::vector<unsigned char> flat;
    for (const auto& pat : pats) flat.insert(flat.end(), pat.begin(), pat.end());
    pushsum_primitivity r{};
    check(pushsum_patterns_primitive(p, pats.size(), flat.data(), cap, &r), "pattern primitivity");
    items.push_back({"pattern_set_primitive", prim(r), prim_value(r)});
  }

  const bool have_graph = !gs.file.empty() || gs.p0 != 0 || gs.cycle_p != 0;
  if (have_graph) {
    const LoadedGraph lg = load_graph(gs, c);
    const Model m = make_model(lg.graph.get(), parse_kind(model_name));
    pushsum_assumption_report ar{};
    check(pushsum_check_assumption(m.get(), cap, &ar), "assumption check");
    items.push_back({"allowable", flag(ar.all_allowable), ""});
    items.push_back({"support_primitive", prim(ar.support_primitive), prim_value(ar.support_primitive)});
    items.push_back({"mean_irreducible", flag(ar.mean_irreducible), ""});
    items.push_back({"positive_diagonal", flag(ar.positive_diagonal_as), ""});
    items.push_back({"log_moment_finite", flag(ar.log_moment_finite), format_real(ar.expected_log_alpha)});

    double eta2 = NAN;
    const pushsum_status es = pushsum_eta(m.get(), 1, &eta2);
    if (es == PUSHSUM_CAPACITY) {
      items.push_back({"eta2_negative", "skipped", "capacity"});
    } else if (!ar.all_pass) {
      items.push_back({"eta2_negative", "skipped", format_real(eta2)});
    } else {
      items.push_back({"eta2_negative", flag(es == PUSHSUM_OK && eta2 < 0.0), format_real(eta2)});
    }

    int holds = 0;
    double margin = NAN;
    const std::size_t p = pushsum_model_size(m.get());
    const bool small = p <= 6 || kmax < 2;
    const pushsum_status cs = small ? pushsum_check_eta_convexity(m.get(), kmax, &holds, &margin) : PUSHSUM_CAPACITY;
    if (cs == PUSHSUM_OK) {
      items.push_back({"eta_convexity", flag(holds != 0), format_real(margin)});
    } else if (cs == PUSHSUM_CAPACITY) {
      items.push_back({"eta_convexity", "skipped", "p too large"});
    } else {
      check(cs, "convexity");
    }
  }

  if (cs_pairs > 0) {
    SeedStream rng(c.seed.value_or(1));
    constexpr std::size_t atoms = 4, d = 3;
    double worst = INFINITY;
    bool all = true;
    for (std::size_t pair = 0; pair < cs_pairs; ++pair) {
      std::vector<double> probs(atoms), xs(atoms * d * d), ys(atoms * d * d);
      double total = 0.0;
      for (auto& pr : probs) total += (pr = 0.05 + rng.uniform());
      for (auto& pr : probs) pr /= total;
      for (auto& v : xs) v = 2.0 * rng.uniform() - 1.0;
      for (auto& v : ys) v = 2.0 * rng.uniform() - 1.0;
      int holds = 0;
      double slack = 0.0;
      check(pushsum_cs_tensor_check(atoms, probs.data(), d, xs.data(), d, ys.data(), &holds, &slack), "cs check");
      all = all && holds;
      worst = std::min(worst, slack);
    }
    items.push_back({"cs_tensor", flag(all), format_real(worst)});
  }

  require(!items.empty(), "check: nothing to check; give a graph source, --patterns or --cs-pairs");
  bool failed = false;
  for (const auto& it : items) {
    failed = failed || it.status == "fail";
    std::string tag = it.status;
    std::transform(tag.begin(), tag.end(), tag.begin(), ::toupper);
    out << "[" << tag << "] " << it.name << (it.value.empty() ? "" : "  " + it.value) << "\n";
  }
  if (c.out != "-") {
    std::ofstream f(c.out);
    if (!f) throw CliError(2, "cannot write " + c.out);
    CsvWriter csv(f);
    csv.header({"item", "status", "value"});
    for (const auto& it : items) {
      csv.field(it.name).field(it.status).field(it.value);
      csv.end_row();
    }
  }
  return failed ? 1 : 0;
}

}  // namespace

std::vector<std::string> merge_config(const std::vector<std::string>& args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw CliError(2, "cannot open config " + path);
  std::vector<std::string> merged = args;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw CliError(2, path + ":" + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    require(!key.empty() && key != "config", path + ":" + std::to_string(lineno) + ": invalid key");
    const std::string flag = "--" + key;
    if (given(args, flag)) continue;
    if (value == "true") {
      merged.push_back(flag);
    } else if (value != "false") {
      merged.push_back(flag);
      merged.push_back(value);
    }
  }
  return merged;
}

int run_cli(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Push-sum gossip convergence bounds and experiments"};
  app.require_subcommand(1, 1);

  // Separate storage per subcommand so one command's defaults never leak
  // into another's "exactly one graph source" validation.
  Common cb, cs, cv, cc, ck;
  GraphSource gb, gsw, gv, gc, gk;
  cc.trials = 1;
  gsw.p0 = 64;
  gv.p0 = 64;
  gc.cycle_p = 50;
  gc.extra_edges = 500;
  std::vector<std::string> models = {"reference", "two-way", "slowed"};
  std::vector<unsigned> ks = {1};
  std::vector<double> grid;
  std::size_t c_count = 50;
  std::size_t window = 25;
  std::string model = "reference";
  std::size_t stride = 10;
  unsigned kmax = 2;
  std::size_t cs_pairs = 100;
  std::string patterns;
  std::size_t cap = 0;

  auto* bound = app.add_subcommand("bound", "eta_2k bounds for one graph");
  add_common(bound, cb, false);
  add_graph_source(bound, gb);
  bound->add_option("--models", models, "comma-separated model list")->delimiter(',');
  bound->add_option("--k", ks, "comma-separated k values (eta_2k)")->delimiter(',');

  auto* sweep = app.add_subcommand("rgg-sweep", "empirical rate versus bound over geometric graphs");
  add_common(sweep, cs, true);
  sweep->add_option("--p0", gsw.p0, "sites per instance (perfect square)");
  sweep->add_option("--target-fraction", gsw.target_fraction, "giant-component fraction");
  sweep->add_option("--c-grid", grid, "comma-separated c values")->delimiter(',');
  sweep->add_option("--c-count", c_count, "evenly spaced c values in [0, 1] when --c-grid is absent");
  sweep->add_option("--model", model, "gossip model");
  sweep->add_option("--window", window, "moving-average window for the SVG");

  auto* variants = app.add_subcommand("variant-compare", "all three models on the same graphs");
  add_common(variants, cv, true);
  variants->add_option("--graph", gv.file, "single edge-list graph instead of generated instances");
  variants->add_option("--p0", gv.p0, "sites per instance (perfect square)");
  variants->add_option("--target-fraction", gv.target_fraction, "giant-component fraction");
  variants->add_option("--c-grid", grid, "comma-separated c values")->delimiter(',');
  variants->add_option("--c-count", c_count, "evenly spaced c values in [0, 1] when --c-grid is absent");
  variants->add_option("--window", window, "moving-average window for the SVG");

  auto* cycle = app.add_subcommand("cycle-growth", "bounds and rates along a cycle with added edges");
  add_common(cycle, cc, true);
  cycle->add_option("--cycle-p", gc.cycle_p, "cycle length");
  cycle->add_option("--extra-edges", gc.extra_edges, "edges added one by one");
  cycle->add_option("--stride", stride, "evaluate every stride-th prefix");

  auto* chk = app.add_subcommand("check", "assumption, convexity and tensor Cauchy-Schwarz checks");
  add_common(chk, ck, false);
  add_graph_source(chk, gk);
  chk->add_option("--model", model, "gossip model");
  chk->add_option("--kmax", kmax, "largest k for the convexity check (p <= 6)");
  chk->add_option("--cs-pairs", cs_pairs, "random coupled pairs for the Cauchy-Schwarz suite");
  chk->add_option("--patterns", patterns, "pattern-set file: \"p count\" then count p x p 0/1 blocks");
  chk->add_option("--cap", cap, "closure cap for primitivity (0 = default)");

  try {
    const std::vector<std::string> args = merge_config(raw_args);
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e, out, err);
      return code == 0 ? 0 : 2;
    }
    if (*bound) return cmd_bound(cb, gb, models, ks, out, err);
    if (*sweep) return cmd_rgg_sweep(cs, gsw.p0, gsw.target_fraction, grid, c_count, model, window, out, err);
    if (*variants) return cmd_variant_compare(cv, gv, grid, c_count, window, out, err);
    if (*cycle) return cmd_cycle_growth(cc, gc.cycle_p, gc.extra_edges, stride, cc.trials, out, err);
    if (*chk) return cmd_check(ck, gk, model, kmax, cs_pairs, patterns, cap, out);
  } catch (const CliError& e) {
    err << "error: " << e.what() << "\n";
    return e.code();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace pushsum_cli
