#pragma once

// Exact rational and dyadic-rational arithmetic.

#include <gmpxx.h>

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "fabius/errors.hpp"

namespace fabius {

using BigInt = mpz_class;

/// Signed rational in lowest terms with a positive denominator.
class ExactRational {
 public:
  ExactRational() = default;
  ExactRational(long value) : value_(value) {}  // NOLINT(runtime/explicit)
  ExactRational(int value) : value_(value) {}   // NOLINT(runtime/explicit)
  explicit ExactRational(const BigInt& integer) : value_(integer) {}

  /// Throws DivisionByZero when `denominator` is zero.
  ExactRational(const BigInt& numerator, const BigInt& denominator);

  /// Accepts "num/den" or an integer, with an optional leading '-'.
  static ExactRational parse(std::string_view text);

  /// 2^exponent, exponent may be negative.
  static ExactRational pow2(std::int64_t exponent);

  BigInt numerator() const { return value_.get_num(); }
  BigInt denominator() const { return value_.get_den(); }
  const mpq_class& raw() const noexcept { return value_; }

  int sign() const noexcept { return sgn(value_); }
  bool is_zero() const noexcept { return sign() == 0; }
  bool is_integer() const { return value_.get_den() == 1; }

  /// this * 2^exponent, exact.
  ExactRational scaled_pow2(std::int64_t exponent) const;
  ExactRational abs() const;
  ExactRational reciprocal() const;

  /// "num/den", or just "num" for integers.
  std::string to_string() const;

  ExactRational& operator+=(const ExactRational& rhs);
  ExactRational& operator-=(const ExactRational& rhs);
  ExactRational& operator*=(const ExactRational& rhs);
  ExactRational& operator/=(const ExactRational& rhs);

  friend ExactRational operator+(ExactRational lhs, const ExactRational& rhs) {
    return lhs += rhs;
  }
  friend ExactRational operator-(ExactRational lhs, const ExactRational& rhs) {
    return lhs -= rhs;
  }
  friend ExactRational operator*(ExactRational lhs, const ExactRational& rhs) {
    return lhs *= rhs;
  }
  friend ExactRational operator/(ExactRational lhs, const ExactRational& rhs) {
    return lhs /= rhs;
  }
  ExactRational operator-() const;

  friend bool operator==(const ExactRational& a, const ExactRational& b) {
    return a.value_ == b.value_;
  }
  friend std::strong_ordering operator<=>(const ExactRational& a,
                                          const ExactRational& b) {
    const int c = cmp(a.value_, b.value_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater
                          : std::strong_ordering::equal);
  }

 private:
  explicit ExactRational(mpq_class value) : value_(std::move(value)) {}

  mpq_class value_;
};

std::ostream& operator<<(std::ostream& os, const ExactRational& r);

/// Nonnegative k / 2^m, canonical: k odd, or k = 0 with m = 0.
class DyadicRational {
 public:
  DyadicRational() = default;
  /// Normalizes; see normalize_dyadic.
  DyadicRational(BigInt numerator, std::uint64_t exponent);

  /// Succeeds iff `r` is nonnegative with a power-of-two denominator.
  static std::optional<DyadicRational> from_rational(const ExactRational& r);
  static DyadicRational integer(std::uint64_t value) {
    return DyadicRational(BigInt(static_cast<unsigned long>(value)), 0);
  }

  const BigInt& numerator() const noexcept { return numerator_; }
  std::uint64_t exponent() const noexcept { return exponent_; }
  bool is_zero() const noexcept { return sgn(numerator_) == 0; }

  ExactRational to_rational() const;
  std::string to_string() const;

  friend DyadicRational operator+(const DyadicRational& a,
                                  const DyadicRational& b);
  /// Throws DomainError when the result would be negative.
  friend DyadicRational operator-(const DyadicRational& a,
                                  const DyadicRational& b);

  friend bool operator==(const DyadicRational& a, const DyadicRational& b) {
    return a.exponent_ == b.exponent_ && a.numerator_ == b.numerator_;
  }
  friend std::strong_ordering operator<=>(const DyadicRational& a,
                                          const DyadicRational& b);

 private:
  BigInt numerator_{0};
  std::uint64_t exponent_ = 0;
};

std::ostream& operator<<(std::ostream& os, const DyadicRational& d);

DyadicRational normalize_dyadic(const BigInt& numerator, std::uint64_t exponent);

/// k/2^M = (2^q + p)/2^M = (1 + x)/2^inner_exponent with x = p/2^q.
struct LeadingBitSplit {
  std::uint64_t q = 0;
  BigInt p;
  std::uint64_t inner_exponent = 0;
  DyadicRational x;
  /// (1 - x)/2^inner_exponent = (2^q - p)/2^M, renormalized.
  DyadicRational partner;
};

/// Requires 0 < d < 1 with numerator > 1; throws DomainError otherwise.
LeadingBitSplit split_leading_bit(const DyadicRational& d);

/// Round-half-to-even decimal expansion with `digits` fractional digits.
std::string to_decimal_string(const ExactRational& r, std::size_t digits);

/// Round-half-to-even to the nearest integer.
BigInt round_half_even(const ExactRational& r);

BigInt floor(const ExactRational& r);

}  // namespace fabius

template <>
struct std::hash<fabius::DyadicRational> {
  std::size_t operator()(const fabius::DyadicRational& d) const noexcept;
};
