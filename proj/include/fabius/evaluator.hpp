#pragma once

// Exact Fabius function values at dyadic rationals.

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <shared_mutex>
#include <unordered_map>
#include <vector>

#include "fabius/exact.hpp"
#include "fabius/identity.hpp"

namespace fabius {

struct FabiusValue {
  DyadicRational argument;
  ExactRational value;
};

/// |f(query) - value| <= error_bound, from |f'(x)| = |2 f(2x)| <= 2.
struct ApproxResult {
  ExactRational query;
  DyadicRational anchor;
  ExactRational value;
  ExactRational error_bound;
};

struct EvaluatorOptions {
  /// Evaluate d > 1/2 as 1 - f(1 - d). Turn off to keep the pure descent
  /// path separately testable.
  bool reflect_upper_half = true;
  /// Maximum memoized entries; 0 disables the cache. Once full, new values
  /// are computed but not stored.
  std::size_t cache_capacity = std::size_t{1} << 16;
};

/// Parity of the number of set bits.
int thue_morse(std::uint64_t m);
int thue_morse(const BigInt& m);

/// Evaluates f by pairing descent over an identity table grown on demand.
/// All member functions are safe to call concurrently.
class Evaluator {
 public:
  explicit Evaluator(EvaluatorOptions options = {}, IdentityTable table = {});

  Evaluator(const Evaluator&) = delete;
  Evaluator& operator=(const Evaluator&) = delete;

  /// f(d) for d in [0, 1]; throws DomainError otherwise.
  ExactRational eval_unit(const DyadicRational& d) const;

  /// 1 - eval_unit(1 - d).
  ExactRational eval_reflected(const DyadicRational& d) const;

  /// f on [0, inf): the bell on [0, 2] repeated with Thue-Morse signs.
  ExactRational eval_extended(const DyadicRational& d) const;

  /// Throws DomainError for x < 0 or eps <= 0.
  ApproxResult approx_eval(const ExactRational& x,
                           const ExactRational& eps) const;

  /// f(j/2^m) for j = 0..2^m, in order.
  std::vector<FabiusValue> values_at_denominator(std::uint64_t m) const;
  void for_each_value_at_denominator(
      std::uint64_t m,
      const std::function<void(const FabiusValue&)>& visit) const;

  /// Level n of the identity table, growing the table if needed.
  std::shared_ptr<const IdentityLevel> level(int n) const;
  IdentityTable table_snapshot() const;

  const EvaluatorOptions& options() const noexcept { return options_; }
  std::size_t cache_size() const;
  std::size_t cache_hits() const noexcept { return hits_.load(); }

 private:
  ExactRational descend(const DyadicRational& d) const;
  ExactRational power_of_two_value(std::uint64_t exponent) const;
  bool cache_lookup(const DyadicRational& d, ExactRational& out) const;
  void cache_store(const DyadicRational& d, const ExactRational& v) const;

  EvaluatorOptions options_;

  mutable std::shared_mutex table_mutex_;
  mutable IdentityTable table_;

  mutable std::shared_mutex cache_mutex_;
  mutable std::unordered_map<DyadicRational, ExactRational> cache_;
  mutable std::atomic<std::size_t> hits_{0};
};

}  // namespace fabius
