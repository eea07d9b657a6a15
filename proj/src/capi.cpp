#include "pushsum/pushsum.h"

#include <cmath>
#include <exception>
#include <new>
#include <string>

#include "pushsum/error.hpp"
#include "pushsum/gossip.hpp"
#include "pushsum/graphs.hpp"
#include "pushsum/primitivity.hpp"
#include "pushsum/random.hpp"
#include "pushsum/simulate.hpp"
#include "pushsum/spectral.hpp"

struct pushsum_graph {
  pushsum::UndirectedGraph graph;
};

struct pushsum_model {
  pushsum::GossipModel model;
};

namespace {

thread_local std::string last_error;

pushsum_status fail(pushsum_status status, const char* what) {
  last_error = what;
  return status;
}

template <class F>
pushsum_status guarded(F&& body) {
  try {
    last_error.clear();
    return body();
  } catch (const pushsum::CapacityError& e) {
    return fail(PUSHSUM_CAPACITY, e.what());
  } catch (const pushsum::PreconditionError& e) {
    return fail(PUSHSUM_PRECONDITION, e.what());
  } catch (const pushsum::InvalidInput& e) {
    return fail(PUSHSUM_INVALID_INPUT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(PUSHSUM_CAPACITY, "out of memory");
  } catch (const std::exception& e) {
    return fail(PUSHSUM_INTERNAL, e.what());
  } catch (...) {
    return fail(PUSHSUM_INTERNAL, "unknown error");
  }
}

#define PUSHSUM_REQUIRE(cond, msg) \
  do {                             \
    if (!(cond)) return fail(PUSHSUM_INVALID_INPUT, msg); \
  } while (0)

pushsum::GossipKind to_kind(pushsum_model_kind k) {
  switch (k) {
    case PUSHSUM_MODEL_REFERENCE:
      return pushsum::GossipKind::Reference;
    case PUSHSUM_MODEL_TWO_WAY:
      return pushsum::GossipKind::TwoWay;
    case PUSHSUM_MODEL_SLOWED:
      return pushsum::GossipKind::Slowed;
    case PUSHSUM_MODEL_AVERAGING:
      return pushsum::GossipKind::Averaging;
    case PUSHSUM_MODEL_CUSTOM:
      break;
  }
  throw pushsum::InvalidInput("unknown or non-graph model kind");
}

pushsum_model_kind from_kind(pushsum::GossipKind k) {
  switch (k) {
    case pushsum::GossipKind::Reference:
      return PUSHSUM_MODEL_REFERENCE;
    case pushsum::GossipKind::TwoWay:
      return PUSHSUM_MODEL_TWO_WAY;
    case pushsum::GossipKind::Slowed:
      return PUSHSUM_MODEL_SLOWED;
    case pushsum::GossipKind::Averaging:
      return PUSHSUM_MODEL_AVERAGING;
    case pushsum::GossipKind::Custom:
      break;
  }
  return PUSHSUM_MODEL_CUSTOM;
}

pushsum_primitivity from_primitivity(pushsum::Primitivity p) {
  switch (p) {
    case pushsum::Primitivity::Primitive:
      return PUSHSUM_PRIMITIVE;
    case pushsum::Primitivity::NotPrimitive:
      return PUSHSUM_NOT_PRIMITIVE;
    case pushsum::Primitivity::Undetermined:
      break;
  }
  return PUSHSUM_UNDETERMINED;
}

pushsum_status new_graph(pushsum::UndirectedGraph g, pushsum_graph** out) {
  *out = new pushsum_graph{std::move(g)};
  return PUSHSUM_OK;
}

}  // namespace

extern "C" {

const char* pushsum_version(void) { return "1.0.0"; }

const char* pushsum_last_error(void) { return last_error.c_str(); }

const char* pushsum_status_name(pushsum_status status) {
  switch (status) {
    case PUSHSUM_OK:
      return "ok";
    case PUSHSUM_CHECK_FAILED:
      return "check-failed";
    case PUSHSUM_INVALID_INPUT:
      return "invalid-input";
    case PUSHSUM_CAPACITY:
      return "capacity";
    case PUSHSUM_NOT_CONVERGED:
      return "not-converged";
    case PUSHSUM_PRECONDITION:
      return "precondition";
    case PUSHSUM_INTERNAL:
      return "internal";
  }
  return "unknown";
}

uint64_t pushsum_derive_seed(uint64_t base, uint64_t stream, uint64_t index) {
  return pushsum::derive_seed(base, stream, index);
}

pushsum_status pushsum_graph_create(size_t nodes, const size_t* edges, size_t edge_count, pushsum_graph** out) {
  PUSHSUM_REQUIRE(out != nullptr, "out is null");
  PUSHSUM_REQUIRE(edges != nullptr || edge_count == 0, "edges is null");
  return guarded([&] {
    std::vector<pushsum::Edge> list;
    list.reserve(edge_count);
    for (size_t e = 0; e < edge_count; ++e) list.emplace_back(edges[2 * e], edges[2 * e + 1]);
    return new_graph(pushsum::UndirectedGraph(nodes, list), out);
  });
}

pushsum_status pushsum_graph_read(const char* path, pushsum_graph** out) {
  PUSHSUM_REQUIRE(path != nullptr && out != nullptr, "null argument");
  return guarded([&] { return new_graph(pushsum::read_edge_list_file(path), out); });
}

pushsum_status pushsum_graph_write(const pushsum_graph* g, const char* path) {
  PUSHSUM_REQUIRE(g != nullptr && path != nullptr, "null argument");
  return guarded([&] {
    pushsum::write_edge_list_file(path, g->graph);
    return PUSHSUM_OK;
  });
}

pushsum_status pushsum_graph_rgg(size_t p0, double c, uint64_t seed, double target_fraction, pushsum_graph** out,
                                 double* radius) {
  PUSHSUM_REQUIRE(out != nullptr, "out is null");
  return guarded([&] {
    pushsum::RggInstance inst = pushsum::make_rgg_instance(p0, c, seed, target_fraction);
    if (radius) *radius = inst.radius;
    return new_graph(std::move(inst.giant.graph), out);
  });
}

pushsum_status pushsum_graph_cycle_growth(size_t p, size_t extra_edges, uint64_t seed, size_t prefix,
                                          pushsum_graph** out) {
  PUSHSUM_REQUIRE(out != nullptr, "out is null");
  return guarded([&] { return new_graph(pushsum::grow_cycle(p, extra_edges, seed).graph_at(prefix), out); });
}

void pushsum_graph_free(pushsum_graph* g) { delete g; }

size_t pushsum_graph_node_count(const pushsum_graph* g) { return g ? g->graph.node_count() : 0; }

size_t pushsum_graph_edge_count(const pushsum_graph* g) { return g ? g->graph.edge_count() : 0; }

int pushsum_graph_connected(const pushsum_graph* g) { return g && g->graph.connected() ? 1 : 0; }

pushsum_status pushsum_graph_edges(const pushsum_graph* g, size_t* out, size_t capacity) {
  PUSHSUM_REQUIRE(g != nullptr && (out != nullptr || capacity == 0), "null argument");
  return guarded([&] {
    size_t k = 0;
    for (const auto& [i, j] : g->graph.edges()) {
      if (k < capacity) out[k] = i;
      ++k;
      if (k < capacity) out[k] = j;
      ++k;
    }
    return PUSHSUM_OK;
  });
}

pushsum_status pushsum_model_kind_parse(const char* name, pushsum_model_kind* out) {
  PUSHSUM_REQUIRE(name != nullptr && out != nullptr, "null argument");
  return guarded([&] {
    *out = from_kind(pushsum::parse_gossip_kind(name));
    return PUSHSUM_OK;
  });
}

const char* pushsum_model_kind_name(pushsum_model_kind kind) {
  switch (kind) {
    case PUSHSUM_MODEL_REFERENCE:
      return "reference";
    case PUSHSUM_MODEL_TWO_WAY:
      return "two-way";
    case PUSHSUM_MODEL_SLOWED:
      return "slowed";
    case PUSHSUM_MODEL_AVERAGING:
      return "averaging";
    case PUSHSUM_MODEL_CUSTOM:
      return "custom";
  }
  return "unknown";
}

pushsum_status pushsum_model_create(const pushsum_graph* g, pushsum_model_kind kind, pushsum_model** out) {
  PUSHSUM_REQUIRE(g != nullptr && out != nullptr, "null argument");
  return guarded([&] {
    *out = new pushsum_model{pushsum::GossipModel::make(to_kind(kind), g->graph)};
    return PUSHSUM_OK;
  });
}

pushsum_status pushsum_model_from_atoms(size_t p, size_t count, const double* probabilities, const double* matrices,
                                        int steps_per_time_unit, pushsum_model** out) {
  PUSHSUM_REQUIRE(out != nullptr && probabilities != nullptr && matrices != nullptr, "null argument");
  return guarded([&] {
    std::vector<pushsum::Atom> atoms;
    for (size_t a = 0; a < count; ++a) {
      pushsum::Matrix m(p, p);
      for (size_t i = 0; i < p * p; ++i) m.data()[i] = matrices[a * p * p + i];
      atoms.push_back({probabilities[a], std::move(m)});
    }
    *out = new pushsum_model{pushsum::GossipModel::from_atoms(std::move(atoms), steps_per_time_unit)};
    return PUSHSUM_OK;
  });
}

void pushsum_model_free(pushsum_model* m) { delete m; }

size_t pushsum_model_size(const pushsum_model* m) { return m ? m->model.size() : 0; }

int pushsum_model_steps_per_time_unit(const pushsum_model* m) { return m ? m->model.steps_per_time_unit() : 0; }

pushsum_model_kind pushsum_model_get_kind(const pushsum_model* m) {
  return m ? from_kind(m->model.kind()) : PUSHSUM_MODEL_CUSTOM;
}

pushsum_status pushsum_check_assumption(const pushsum_model* m, size_t cap, pushsum_assumption_report* out) {
  PUSHSUM_REQUIRE(m != nullptr && out != nullptr, "null argument");
  return guarded([&] {
    const auto r = pushsum::check_assumption(m->model, cap == 0 ? pushsum::kDefaultClosureCap : cap);
    *out = {r.all_allowable,        from_primitivity(r.support_primitive),
            r.mean_irreducible,     r.positive_diagonal_as,
            r.log_moment_finite,    r.min_positive_entry,
            r.expected_log_alpha,   r.all_pass()};
    return PUSHSUM_OK;
  });
}

pushsum_status pushsum_patterns_primitive(size_t p, size_t count, const unsigned char* bits, size_t cap,
                                          pushsum_primitivity* out) {
  PUSHSUM_REQUIRE(out != nullptr && (bits != nullptr || count == 0), "null argument");
  return guarded([&] {
    std::vector<pushsum::SupportPattern> patterns;
    for (size_t a = 0; a < count; ++a) {
      pushsum::SupportPattern s(p);
      for (size_t i = 0; i < p; ++i) {
        for (size_t j = 0; j < p; ++j) s.set(i, j, bits[a * p * p + i * p + j] != 0);
      }
      patterns.push_back(std::move(s));
    }
    *out = from_primitivity(pushsum::is_primitive_set(patterns, cap == 0 ? pushsum::kDefaultClosureCap : cap));
    return PUSHSUM_OK;
  });
}

pushsum_status pushsum_eta(const pushsum_model* m, unsigned k, double* value) {
  PUSHSUM_REQUIRE(m != nullptr && value != nullptr, "null argument");
  return guarded([&] {
    const auto e = pushsum::eta(m->model, k);
    *value = e.value;
    return e.converged ? PUSHSUM_OK : fail(PUSHSUM_NOT_CONVERGED, "spectral radius did not converge");
  });
}

pushsum_status pushsum_bound_report(const pushsum_model* m, pushsum_bound* out) {
  PUSHSUM_REQUIRE(m != nullptr && out != nullptr, "null argument");
  return guarded([&] {
    const auto e = pushsum::eta(m->model, 1);
    out->eta2 = e.value;
    out->eta2_half = e.value / 2.0;
    out->time_normalized_bound = m->model.steps_per_time_unit() * out->eta2_half;
    out->converged = e.converged;
    return e.converged ? PUSHSUM_OK : fail(PUSHSUM_NOT_CONVERGED, "spectral radius did not converge");
  });
}

pushsum_status pushsum_check_eta_convexity(const pushsum_model* m, unsigned kmax, int* holds, double* worst_margin) {
  PUSHSUM_REQUIRE(m != nullptr && holds != nullptr && worst_margin != nullptr, "null argument");
  return guarded([&] {
    const auto r = pushsum::check_eta_convexity(m->model, kmax);
    *holds = r.holds;
    *worst_margin = r.worst_margin;
    return PUSHSUM_OK;
  });
}

pushsum_status pushsum_cs_tensor_check(size_t count, const double* probabilities, size_t dx, const double* xs,
                                       size_t dy, const double* ys, int* holds, double* slack) {
  PUSHSUM_REQUIRE(probabilities && xs && ys && holds && slack, "null argument");
  return guarded([&] {
    std::vector<pushsum::CoupledAtom> atoms;
    for (size_t a = 0; a < count; ++a) {
      pushsum::Matrix x(dx, dx), y(dy, dy);
      for (size_t i = 0; i < dx * dx; ++i) x.data()[i] = xs[a * dx * dx + i];
      for (size_t i = 0; i < dy * dy; ++i) y.data()[i] = ys[a * dy * dy + i];
      atoms.push_back({probabilities[a], std::move(x), std::move(y)});
    }
    const auto r = pushsum::cs_tensor_check(atoms);
    *holds = r.holds;
    *slack = r.slack;
    return PUSHSUM_OK;
  });
}

pushsum_status pushsum_moment_bound_doubly_stochastic(const pushsum_model* m, unsigned k, double* value) {
  PUSHSUM_REQUIRE(m != nullptr && value != nullptr, "null argument");
  return guarded([&] {
    *value = pushsum::moment_bound_doubly_stochastic(m->model, k);
    return PUSHSUM_OK;
  });
}

pushsum_status pushsum_run_trial(const pushsum_model* m, uint64_t n, uint64_t seed, const double* bound,
                                 const double* x0, pushsum_trial_result* out) {
  PUSHSUM_REQUIRE(m != nullptr && out != nullptr, "null argument");
  return guarded([&] {
    pushsum::TrialOptions opts;
    if (bound) opts.bound = *bound;
    if (x0) opts.x0 = std::vector<double>(x0, x0 + m->model.size());
    const auto r = pushsum::run_trial(m->model, n, seed, opts);
    *out = {r.empirical_rate, r.bound_eta2_half, r.bound_minus_empirical,
            r.weight_diag,    r.readout_error,   r.n,
            r.seed,           r.p,               r.warnings.size()};
    return PUSHSUM_OK;
  });
}

}  // extern "C"
