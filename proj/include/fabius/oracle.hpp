#pragma once

// Independent checks on the evaluator.
//
// The bracket oracle does not use the sum/difference identities at all: it
// uses that f is the distribution function of X = sum_{n>=1} 2^-n U_n with
// U_n iid uniform on [0, 1], truncated after N terms.

#include <cstdint>
#include <string>
#include <vector>

#include "fabius/evaluator.hpp"
#include "fabius/exact.hpp"

namespace fabius {

/// Coefficients in the monomial basis of (x - left endpoint of the piece).
using Polynomial = std::vector<ExactRational>;

ExactRational evaluate(const Polynomial& p, const ExactRational& t);

/// p(t + shift) re-expanded in t.
Polynomial taylor_shift(const Polynomial& p, const ExactRational& shift);

/// Continuous distribution function on [front, back] of the breakpoints,
/// 0 to the left and 1 to the right of that range.
class PiecewisePolynomialCDF {
 public:
  /// Uniform distribution on [0, width].
  static PiecewisePolynomialCDF uniform(const ExactRational& width);

  /// CDF of X + width * U for independent U uniform on [0, 1]:
  /// F'(x) = (1/width) * integral of F over [x - width, x].
  PiecewisePolynomialCDF convolve_uniform(const ExactRational& width) const;

  ExactRational operator()(const ExactRational& x) const;

  /// Merges neighbours whose polynomials continue one another.
  PiecewisePolynomialCDF normalized() const;

  /// Exact continuity at every breakpoint, including 0 and 1 at the ends.
  bool is_continuous() const;

  const std::vector<ExactRational>& breakpoints() const noexcept {
    return breakpoints_;
  }
  const std::vector<Polynomial>& pieces() const noexcept { return pieces_; }
  /// Number of convolved uniforms.
  int level() const noexcept { return level_; }
  std::size_t max_degree() const;

  friend bool operator==(const PiecewisePolynomialCDF&,
                         const PiecewisePolynomialCDF&) = default;

 private:
  std::vector<ExactRational> breakpoints_;
  std::vector<Polynomial> pieces_;
  int level_ = 0;
};

inline constexpr int kMaxOracleLevel = 24;

/// CDF of X_N = sum_{n=1..N} 2^-n U_n by N successive convolutions.
/// Throws DomainError unless 1 <= N <= kMaxOracleLevel. Piece count is 2^N.
PiecewisePolynomialCDF truncated_cdf(int N);

/// F_N(x) at a single point without materializing the pieces, from the
/// truncated-power form
///   F_N(x) = (1 / (N! prod a_i)) sum_S (-1)^|S| (x - sum_{i in S} a_i)_+^N.
/// With a_i = 2^-i the subset sums are exactly s/2^N for s = 0..2^N-1 and
/// |S| = popcount(s).
ExactRational truncated_cdf_at(int N, const ExactRational& x);

struct Bracket {
  ExactRational lo;
  ExactRational hi;
};

/// lo = F_N(x - 2^-N), hi = F_N(x); lo <= f(x) <= hi since the discarded
/// tail lies in [0, 2^-N].
Bracket bracket(const DyadicRational& x, int N);

// ---------------------------------------------------------------------------

struct VerificationFailure {
  std::string input;
  std::string expected;
  std::string got;
};

struct VerificationReport {
  std::string suite;
  std::size_t cases = 0;
  std::vector<VerificationFailure> failures;
  /// Where the expected values come from.
  std::string provenance;

  bool pass() const noexcept { return failures.empty(); }
};

/// {"suite", "cases", "failures": [{"input", "expected", "got"}], "pass"}
std::string report_to_json(const VerificationReport& r, int indent = -1);

struct GoldenValue {
  DyadicRational argument;
  ExactRational value;
};

/// The 31 published values f(j/2^m), m = 1..5.
const std::vector<GoldenValue>& golden_values();

VerificationReport verify_golden(
    const Evaluator& ev, const std::vector<GoldenValue>& table = golden_values());

/// Checks, for n = 1..max_n and every x in xs,
///   2^sigma_s (f((1+x)/2^(2n-1)) + f((1-x)/2^(2n-1))) = S_n(x)
///   2^sigma_d (f((1+x)/2^(2n))   - f((1-x)/2^(2n)))   = D_n(x)
/// plus D_n(1)/2^(2n^2) = S_n(0)/2^(2n^2-2n+2) and
/// S_n(1)/2^(2n^2-2n+1) = f(1/2^(2n-2)), the latter against 1 - f(1 - .).
VerificationReport verify_identities(const Evaluator& ev, int max_n,
                                     const std::vector<DyadicRational>& xs);

/// Brackets f(j/2^grid_exponent) for all grid points in [0, 1] and checks
/// containment and width <= 2^(1-N). Grid points run concurrently.
VerificationReport verify_oracle(const Evaluator& ev, int N,
                                 std::uint64_t grid_exponent = 4);

struct MonteCarloEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;
  std::uint64_t samples = 0;
};

/// Empirical P(sum_{n=1..40} 2^-n U_n <= x). Statistical smoke test only.
MonteCarloEstimate monte_carlo_estimate(const ExactRational& x,
                                        std::uint64_t samples,
                                        std::uint64_t seed);

}  // namespace fabius
