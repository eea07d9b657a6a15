#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pushsum/gossip.hpp"
#include "pushsum/linalg.hpp"

namespace pushsum {

/// Values x and weights w of the ratio-consensus recursion.
struct PushSumState {
  std::vector<double> x;
  std::vector<double> w;

  /// w = 1.
  static PushSumState start(std::vector<double> x0);
  std::size_t size() const noexcept { return x.size(); }
  /// x_i / w_i.
  std::vector<double> readout() const;
};

/// x <- A x, w <- A w.
void step(PushSumState& state, const ColumnStochasticMatrix& a);
void step(PushSumState& state, const ColumnUpdate& a);

/// Running value of M_n (I-J), stored as exp(log_scale) * n_matrix.
///
/// Column sums of the true product are exactly zero and every update
/// preserves them, so rounding error along 1 never decays while N does.
/// Column means are therefore removed every p updates; (I-J) N_n = N_n
/// makes this exact in exact arithmetic.
class TrackedProduct {
 public:
  static constexpr double kLowerBand = 1e-8;
  static constexpr double kUpperBand = 1e8;

  /// N_0 = I - J.
  explicit TrackedProduct(std::size_t p);

  std::size_t size() const noexcept { return n_.rows(); }
  const Matrix& scaled() const noexcept { return n_; }
  double log_scale() const noexcept { return log_scale_; }
  std::uint64_t steps() const noexcept { return steps_; }
  /// True once N hit exactly zero; rates are then -inf.
  bool vanished() const noexcept { return vanished_; }
  double frobenius() const noexcept { return std::sqrt(total_sq_); }
  /// exp(log_scale) * N; may underflow for long runs.
  Matrix value() const;

  void apply(const ColumnStochasticMatrix& a);
  void apply(const ColumnUpdate& a);

 private:
  void refresh_row(std::size_t r);
  void recenter();
  void renormalize_if_needed();

  Matrix n_;
  std::vector<double> row_sq_;
  double total_sq_ = 0.0;
  double log_scale_ = 0.0;
  std::uint64_t steps_ = 0;
  std::size_t since_recenter_ = 0;
  bool vanished_ = false;
};

inline void track_step(TrackedProduct& tp, const ColumnStochasticMatrix& a) { tp.apply(a); }
inline void track_step(TrackedProduct& tp, const ColumnUpdate& a) { tp.apply(a); }

/// (log_scale + log(||diag(w)^{-1} N||_F / sqrt(p))) / n with n = `time_units`
/// (defaults to the multiplication count).
double empirical_rate(const TrackedProduct& tp, std::span<const double> w, double time_units = 0.0);

/// log(1 / min_i w_i) / n.
double weight_diagnostic(std::span<const double> w, double n);

struct TrialOptions {
  /// Initial values for the readout; defaults to the first column of I - J.
  std::optional<std::vector<double>> x0;
  /// Pre-computed time-normalised bound; computed from `spectral` when absent.
  std::optional<double> bound;
  /// Run check_assumption and record failures as warnings.
  bool check_assumptions = true;
  /// Record rate and weight diagnostic every `trace_stride` time units (0 = off).
  std::uint64_t trace_stride = 0;
};

struct TracePoint {
  std::uint64_t n = 0;
  double empirical_rate = 0.0;
  double weight_diag = 0.0;
};

struct TrialResult {
  double empirical_rate = 0.0;
  double bound_eta2_half = 0.0;  ///< time-normalised
  double bound_minus_empirical = 0.0;
  double weight_diag = 0.0;
  double readout_error = 0.0;  ///< sum_i |x_i/w_i - mean(x0)|
  std::uint64_t n = 0;         ///< time units; steps_per_time_unit * n multiplications
  std::uint64_t seed = 0;
  std::size_t p = 0;
  std::vector<std::string> warnings;
  std::vector<TracePoint> trace;
};

/// Simulates n time units of the model from N_0 = I - J and w_0 = 1.
TrialResult run_trial(const GossipModel& model, std::uint64_t n, std::uint64_t seed, const TrialOptions& options = {});

}  // namespace pushsum
