#include "pushsum/simulate.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "pushsum/error.hpp"
#include "pushsum/primitivity.hpp"
#include "pushsum/spectral.hpp"

namespace pushsum {

PushSumState PushSumState::start(std::vector<double> x0) {
  PushSumState s;
  s.w.assign(x0.size(), 1.0);
  s.x = std::move(x0);
  return s;
}

std::vector<double> PushSumState::readout() const {
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] / w[i];
  return r;
}

void step(PushSumState& state, const ColumnStochasticMatrix& a) {
  if (a.size() != state.size() || state.w.size() != state.size()) {
    throw InvalidInput("step: dimension mismatch");
  }
  state.x = a.matrix() * std::span<const double>(state.x);
  state.w = a.matrix() * std::span<const double>(state.w);
}

void step(PushSumState& state, const ColumnUpdate& a) {
  if (a.sender >= state.size() || state.w.size() != state.size()) throw InvalidInput("step: dimension mismatch");
  const double xi = state.x[a.sender];
  const double wi = state.w[a.sender];
  state.x[a.sender] = 0.0;
  state.w[a.sender] = 0.0;
  for (std::size_t k = 0; k < a.count; ++k) {
    state.x[a.column[k].row] += a.column[k].value * xi;
    state.w[a.column[k].row] += a.column[k].value * wi;
  }
}

TrackedProduct::TrackedProduct(std::size_t p) : n_(centering_projection(p)), row_sq_(p, 0.0) {
  for (std::size_t r = 0; r < p; ++r) refresh_row(r);
  total_sq_ = std::accumulate(row_sq_.begin(), row_sq_.end(), 0.0);
  vanished_ = total_sq_ == 0.0;
}

Matrix TrackedProduct::value() const { return std::exp(log_scale_) * n_; }

void TrackedProduct::refresh_row(std::size_t r) {
  double s = 0.0;
  for (double v : n_.row(r)) s += v * v;
  row_sq_[r] = s;
}

void TrackedProduct::recenter() {
  const std::size_t p = size();
  std::vector<double> mean(p, 0.0);
  for (std::size_t r = 0; r < p; ++r) {
    const auto row = n_.row(r);
    for (std::size_t j = 0; j < p; ++j) mean[j] += row[j];
  }
  for (auto& m : mean) m /= static_cast<double>(p);
  for (std::size_t r = 0; r < p; ++r) {
    auto row = n_.row(r);
    for (std::size_t j = 0; j < p; ++j) row[j] -= mean[j];
    refresh_row(r);
  }
}

void TrackedProduct::renormalize_if_needed() {
  if (++since_recenter_ >= size()) {
    since_recenter_ = 0;
    recenter();
  }
  total_sq_ = std::accumulate(row_sq_.begin(), row_sq_.end(), 0.0);
  ++steps_;
  if (total_sq_ == 0.0) {
    vanished_ = true;
    return;
  }
  const double f = std::sqrt(total_sq_);
  if (f >= kLowerBand && f <= kUpperBand) return;
  n_ *= 1.0 / f;
  log_scale_ += std::log(f);
  for (std::size_t r = 0; r < size(); ++r) refresh_row(r);
  total_sq_ = std::accumulate(row_sq_.begin(), row_sq_.end(), 0.0);
}

void TrackedProduct::apply(const ColumnStochasticMatrix& a) {
  if (a.size() != size()) throw InvalidInput("track_step: dimension mismatch");
  if (vanished_) {
    ++steps_;
    return;
  }
  const Matrix& m = a.matrix();
  Matrix next(size(), size());
  for (std::size_t r = 0; r < size(); ++r) {
    auto dst = next.row(r);
    for (std::size_t c = 0; c < size(); ++c) {
      const double v = m(r, c);
      if (v == 0.0) continue;
      const auto src = n_.row(c);
      for (std::size_t j = 0; j < size(); ++j) dst[j] += v * src[j];
    }
  }
  n_ = std::move(next);
  for (std::size_t r = 0; r < size(); ++r) refresh_row(r);
  renormalize_if_needed();
}

void TrackedProduct::apply(const ColumnUpdate& a) {
  if (a.sender >= size()) throw InvalidInput("track_step: sender out of range");
  if (vanished_) {
    ++steps_;
    return;
  }
  // A = I + (c - e_i) e_i^T, so A N adds multiples of row i to the rows in c.
  const std::size_t i = a.sender;
  const std::size_t p = size();
  double keep = 0.0;
  const auto src = n_.row(i);
  for (std::size_t k = 0; k < a.count; ++k) {
    const auto& e = a.column[k];
    if (e.row == i) {
      keep += e.value;
      continue;
    }
    auto dst = n_.row(e.row);
    for (std::size_t j = 0; j < p; ++j) dst[j] += e.value * src[j];
    refresh_row(e.row);
  }
  for (std::size_t j = 0; j < p; ++j) src[j] *= keep;
  row_sq_[i] *= keep * keep;
  renormalize_if_needed();
}

double empirical_rate(const TrackedProduct& tp, std::span<const double> w, double time_units) {
  if (w.size() != tp.size()) throw InvalidInput("empirical_rate: weight vector has wrong size");
  const double n = time_units > 0.0 ? time_units : static_cast<double>(tp.steps());
  if (!(n > 0.0)) throw InvalidInput("empirical_rate: needs at least one step");
  if (tp.vanished()) return -std::numeric_limits<double>::infinity();
  double s = 0.0;
  const Matrix& m = tp.scaled();
  for (std::size_t r = 0; r < tp.size(); ++r) {
    if (!(w[r] > 0.0)) throw InvalidInput("empirical_rate: weights must be positive");
    double row = 0.0;
    for (double v : m.row(r)) row += v * v;
    s += row / (w[r] * w[r]);
  }
  return (tp.log_scale() + 0.5 * std::log(s) - 0.5 * std::log(static_cast<double>(tp.size()))) / n;
}

double weight_diagnostic(std::span<const double> w, double n) {
  if (w.empty() || !(n > 0.0)) throw InvalidInput("weight_diagnostic: needs weights and n > 0");
  const double lo = *std::min_element(w.begin(), w.end());
  if (!(lo > 0.0)) throw InvalidInput("weight_diagnostic: weights must be positive");
  return -std::log(lo) / n;
}

TrialResult run_trial(const GossipModel& model, std::uint64_t n, std::uint64_t seed, const TrialOptions& options) {
  if (n == 0) throw InvalidInput("run_trial: n must be positive");
  const std::size_t p = model.size();
  const auto steps = static_cast<std::uint64_t>(model.steps_per_time_unit());

  TrialResult res;
  res.n = n;
  res.seed = seed;
  res.p = p;

  std::vector<double> x0;
  if (options.x0) {
    if (options.x0->size() != p) throw InvalidInput("run_trial: x0 has wrong size");
    x0 = *options.x0;
  } else {
    x0.assign(p, -1.0 / static_cast<double>(p));
    x0[0] += 1.0;
  }
  const double mean = std::accumulate(x0.begin(), x0.end(), 0.0) / static_cast<double>(p);

  if (options.bound) {
    res.bound_eta2_half = *options.bound;
  } else {
    const BoundReport b = bound_report(model);
    res.bound_eta2_half = b.time_normalized_bound;
    for (const auto& [k, msg] : b.errors) res.warnings.push_back("eta k=" + std::to_string(k) + ": " + msg);
  }
  if (options.check_assumptions) {
    const AssumptionReport a = check_assumption(model);
    if (!a.all_allowable) res.warnings.emplace_back("assumption: a support pattern is not allowable");
    if (a.support_primitive != Primitivity::Primitive) {
      res.warnings.push_back("assumption: support primitivity " + std::string(to_string(a.support_primitive)));
    }
    if (!a.mean_irreducible) res.warnings.emplace_back("assumption: mean matrix is reducible");
    if (!a.log_moment_finite) res.warnings.emplace_back("assumption: E log alpha is infinite");
  }

  Rng rng(seed);
  TrackedProduct tp(p);
  PushSumState state = PushSumState::start(std::move(x0));
  std::vector<ColumnStochasticMatrix> atoms;
  for (const auto& a : model.atoms()) atoms.emplace_back(a.matrix);

  const std::uint64_t total = n * steps;
  for (std::uint64_t t = 1; t <= total; ++t) {
    if (model.column_structured()) {
      const ColumnUpdate u = sample_update(model, rng);
      tp.apply(u);
      step(state, u);
    } else {
      const auto& a = atoms[sample_atom(model, rng)];
      tp.apply(a);
      step(state, a);
    }
    if (options.trace_stride != 0 && t % steps == 0 && (t / steps) % options.trace_stride == 0) {
      const auto units = static_cast<double>(t / steps);
      res.trace.push_back({t / steps, empirical_rate(tp, state.w, units), weight_diagnostic(state.w, units)});
    }
  }

  const auto units = static_cast<double>(n);
  res.empirical_rate = empirical_rate(tp, state.w, units);
  res.bound_minus_empirical = res.bound_eta2_half - res.empirical_rate;
  res.weight_diag = weight_diagnostic(state.w, units);
  for (std::size_t i = 0; i < p; ++i) res.readout_error += std::abs(state.x[i] / state.w[i] - mean);
  return res;
}

}  // namespace pushsum
