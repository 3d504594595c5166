#pragma once

// Scaled sum/difference closed forms for the Fabius function.
//
// For each level n >= 1 and 0 <= x <= 1:
//
//   2^(2n^2-2n+1) (f((1+x)/2^(2n-1)) + f((1-x)/2^(2n-1))) = S_n(x)   (even)
//   2^(2n^2)      (f((1+x)/2^(2n))   - f((1-x)/2^(2n)))   = D_n(x)   (odd)
//
// S_1 = 2 and D_1 = 2x; level n+1 follows from D_n by integrating once.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "fabius/exact.hpp"

namespace fabius {

std::int64_t sum_scale_exponent(int n);   // 2n^2 - 2n + 1
std::int64_t diff_scale_exponent(int n);  // 2n^2

/// Even polynomial; coeffs[k] multiplies x^(2k).
struct SumIdentity {
  int n = 0;
  std::int64_t sigma = 0;
  std::vector<ExactRational> coeffs;

  friend bool operator==(const SumIdentity&, const SumIdentity&) = default;
};

/// Odd polynomial; coeffs[k] multiplies x^(2k+1).
struct DiffIdentity {
  int n = 0;
  std::int64_t sigma = 0;
  std::vector<ExactRational> coeffs;

  friend bool operator==(const DiffIdentity&, const DiffIdentity&) = default;
};

struct IdentityLevel {
  SumIdentity sum;
  DiffIdentity diff;
  /// f(1/2^(2n+1)), obtained from D_n at x = 1.
  ExactRational small_odd_value;

  friend bool operator==(const IdentityLevel&, const IdentityLevel&) = default;
};

struct IdentityPair {
  SumIdentity sum;
  DiffIdentity diff;
};

IdentityPair seed();

/// Level n+1 from the level-n difference identity.
IdentityPair step(const DiffIdentity& d);

/// f(1/2^(2n+1)) from D_n. Level 0 is the seed case f(1/2) = 1/2.
ExactRational small_odd_value(const DiffIdentity& d);

/// Throws DomainError when x is outside [0, 1].
ExactRational eval_sum(const SumIdentity& s, const ExactRational& x);
ExactRational eval_diff(const DiffIdentity& d, const ExactRational& x);

/// Levels 1..max_n. Copies share level storage, so extending a copy never
/// disturbs the original's entries.
class IdentityTable {
 public:
  IdentityTable() = default;
  explicit IdentityTable(int max_n);

  int max_n() const noexcept { return static_cast<int>(levels_.size()); }
  /// 1-based. Throws std::out_of_range past max_n().
  const IdentityLevel& level(int n) const;
  std::shared_ptr<const IdentityLevel> level_ptr(int n) const;

  /// Levels 1..min(n, max_n()).
  IdentityTable prefix(int n) const;

  /// Keys are odd exponents 2n+1 for n = 0..max_n.
  std::map<std::int64_t, ExactRational> small_odd_values() const;

  friend IdentityTable extend_table(IdentityTable t, int new_max_n);

  friend bool operator==(const IdentityTable& a, const IdentityTable& b);

  /// Checks sigma exponents, lengths, positivity, the D_n(1)/S_n(0) cross
  /// identity, decreasing constants, and that every level follows from its
  /// predecessor. Throws CorruptTable on the first failure.
  void validate() const;

  /// Takes already-built levels (e.g. from a cache file) and validates.
  static IdentityTable from_levels(std::vector<IdentityLevel> levels);

 private:
  std::vector<std::shared_ptr<const IdentityLevel>> levels_;
};

IdentityTable extend_table(IdentityTable t, int new_max_n);

// Cache file: {"max_n": int, "levels": [{"n", "sigma_s", "s", "sigma_d",
// "d"}, ...]} with coefficients as "num/den" strings.
std::string table_to_json(const IdentityTable& t, int indent = -1);
/// Throws CorruptTable on malformed JSON or any failed invariant.
IdentityTable table_from_json(const std::string& text);

}  // namespace fabius
