#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "pushsum/linalg.hpp"

namespace pushsum {

class GossipModel;

/// Boolean p x p matrix: bit (i, j) marks a strictly positive entry.
/// Rows are packed into 64-bit words.
class SupportPattern {
 public:
  SupportPattern() = default;
  explicit SupportPattern(std::size_t size);

  static SupportPattern identity(std::size_t size);
  static SupportPattern all_ones(std::size_t size);
  static SupportPattern from_rows(std::initializer_list<std::initializer_list<int>> rows);

  std::size_t size() const noexcept { return size_; }
  bool test(std::size_t i, std::size_t j) const {
    return (words_[i * stride_ + j / 64] >> (j % 64)) & 1U;
  }
  void set(std::size_t i, std::size_t j, bool value = true);

  bool is_all_ones() const;
  std::size_t count() const;

  /// Boolean product: bit (i, j) is set iff some k has a(i, k) and b(k, j).
  friend SupportPattern operator*(const SupportPattern& a, const SupportPattern& b);
  /// Entrywise OR.
  friend SupportPattern operator|(const SupportPattern& a, const SupportPattern& b);
  friend bool operator==(const SupportPattern&, const SupportPattern&) = default;

  std::size_t hash() const noexcept;

 private:
  std::size_t size_ = 0;
  std::size_t stride_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Pattern of the Kronecker product of matrices with patterns a and b.
SupportPattern kron(const SupportPattern& a, const SupportPattern& b);

/// Bit (i, j) set iff a(i, j) > eps. Throws InvalidInput on entries below -eps.
SupportPattern support_pattern(const Matrix& a, double eps = 0.0);

bool is_allowable(const SupportPattern& p);
bool has_positive_diagonal(const SupportPattern& p);

/// Strong connectivity of the directed graph i -> j for a(i, j) != 0.
bool is_irreducible(const SupportPattern& p);
bool is_irreducible(const Matrix& m);

enum class Primitivity { Primitive, NotPrimitive, Undetermined };

std::string_view to_string(Primitivity p);

inline constexpr std::size_t kDefaultClosureCap = 100000;

/// Decides whether some finite product of the patterns (repetitions allowed)
/// is all-ones, by breadth-first closure of the generated boolean
/// semigroup. Two exact shortcuts run first: a reducible union pattern
/// rules primitivity out, and an explicit all-ones product found by
/// repeatedly multiplying the generators in sequence proves it. The closure
/// reports Undetermined once it holds more than `cap` distinct patterns.
Primitivity is_primitive_set(const std::vector<SupportPattern>& patterns, std::size_t cap = kDefaultClosureCap);

struct AssumptionReport {
  bool all_allowable = false;
  Primitivity support_primitive = Primitivity::Undetermined;
  bool mean_irreducible = false;
  bool positive_diagonal_as = false;
  bool log_moment_finite = false;
  /// Essential infimum of the positive entries over the support. Zero when
  /// entries can be arbitrarily small (two-way gossip), in which case
  /// expected_log_alpha carries the finiteness evidence.
  double min_positive_entry = 0.0;
  /// E log(min positive entry of A_1); -inf when infinite.
  double expected_log_alpha = 0.0;

  bool all_pass() const {
    return all_allowable && support_primitive == Primitivity::Primitive && mean_irreducible &&
           log_moment_finite;
  }
};

AssumptionReport check_assumption(const GossipModel& model, std::size_t cap = kDefaultClosureCap);

}  // namespace pushsum
