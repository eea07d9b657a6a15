#pragma once

// Thin RAII layer over the C API. The CLI deliberately sees nothing else.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>

#include "pushsum/pushsum.h"

namespace pushsum_cli {

/// Carries the process exit code: 1 check failure, 2 invalid input, 3 capacity.
class CliError : public std::runtime_error {
 public:
  CliError(int code, const std::string& what) : std::runtime_error(what), code_(code) {}
  int code() const noexcept { return code_; }

 private:
  int code_;
};

int exit_code_for(pushsum_status s);

/// Throws CliError unless s is PUSHSUM_OK.
void check(pushsum_status s, const std::string& context);

struct GraphDeleter {
  void operator()(pushsum_graph* g) const noexcept { pushsum_graph_free(g); }
};
struct ModelDeleter {
  void operator()(pushsum_model* m) const noexcept { pushsum_model_free(m); }
};

using Graph = std::unique_ptr<pushsum_graph, GraphDeleter>;
using Model = std::unique_ptr<pushsum_model, ModelDeleter>;

Graph read_graph(const std::string& path);
Graph rgg_graph(std::size_t p0, double c, std::uint64_t seed, double target_fraction, double* radius);
Graph cycle_graph(std::size_t p, std::size_t extra_edges, std::uint64_t seed, std::size_t prefix);
Model make_model(const pushsum_graph* g, pushsum_model_kind kind);
pushsum_model_kind parse_kind(const std::string& name);

}  // namespace pushsum_cli
