#include "handles.hpp"

namespace pushsum_cli {

int exit_code_for(pushsum_status s) {
  switch (s) {
    case PUSHSUM_OK:
      return 0;
    case PUSHSUM_INVALID_INPUT:
    case PUSHSUM_PRECONDITION:
      return 2;
    case PUSHSUM_CAPACITY:
      return 3;
    default:
      return 1;
  }
}

void check(pushsum_status s, const std::string& context) {
  if (s == PUSHSUM_OK) return;
  throw CliError(exit_code_for(s), context + ": " + pushsum_last_error());
}

Graph read_graph(const std::string& path) {
  pushsum_graph* g = nullptr;
  check(pushsum_graph_read(path.c_str(), &g), "reading " + path);
  return Graph(g);
}

Graph rgg_graph(std::size_t p0, double c, std::uint64_t seed, double target_fraction, double* radius) {
  pushsum_graph* g = nullptr;
  check(pushsum_graph_rgg(p0, c, seed, target_fraction, &g, radius), "generating geometric graph");
  return Graph(g);
}

Graph cycle_graph(std::size_t p, std::size_t extra_edges, std::uint64_t seed, std::size_t prefix) {
  pushsum_graph* g = nullptr;
  check(pushsum_graph_cycle_growth(p, extra_edges, seed, prefix, &g), "generating cycle graph");
  return Graph(g);
}

Model make_model(const pushsum_graph* g, pushsum_model_kind kind) {
  pushsum_model* m = nullptr;
  check(pushsum_model_create(g, kind, &m), std::string("building ") + pushsum_model_kind_name(kind) + " model");
  return Model(m);
}

pushsum_model_kind parse_kind(const std::string& name) {
  pushsum_model_kind k{};
  check(pushsum_model_kind_parse(name.c_str(), &k), "model");
  return k;
}

}  // namespace pushsum_cli
