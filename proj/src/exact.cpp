#include "fabius/exact.hpp"

#include <cctype>
#include <ostream>

namespace fabius {

ExactRational::ExactRational(const BigInt& numerator,
                             const BigInt& denominator) {
  if (sgn(denominator) == 0) throw DivisionByZero();
  value_ = mpq_class(numerator, denominator);
  value_.canonicalize();
}

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

BigInt parse_natural(std::string_view digits, std::string_view whole) {
  if (!all_digits(digits)) {
    throw ParseError(std::string(whole),
                     "malformed rational '" + std::string(whole) + "'");
  }
  return BigInt(std::string(digits), 10);
}

}  // namespace

ExactRational ExactRational::parse(std::string_view text) {
  std::string_view body = text;
  bool negative = false;
  if (!body.empty() && body.front() == '-') {
    negative = true;
    body.remove_prefix(1);
  }
  BigInt num;
  BigInt den = 1;
  if (const auto slash = body.find('/'); slash == std::string_view::npos) {
    num = parse_natural(body, text);
  } else {
    num = parse_natural(body.substr(0, slash), text);
    den = parse_natural(body.substr(slash + 1), text);
    if (sgn(den) == 0) {
      throw ParseError(std::string(text),
                       "zero denominator in '" + std::string(text) + "'");
    }
  }
  if (negative) num = -num;
  return ExactRational(num, den);
}

ExactRational ExactRational::pow2(std::int64_t exponent) {
  return ExactRational(1).scaled_pow2(exponent);
}

ExactRational ExactRational::scaled_pow2(std::int64_t exponent) const {
  mpq_class out;
  if (exponent >= 0) {
    mpq_mul_2exp(out.get_mpq_t(), value_.get_mpq_t(),
                 static_cast<mp_bitcnt_t>(exponent));
  } else {
    mpq_div_2exp(out.get_mpq_t(), value_.get_mpq_t(),
                 static_cast<mp_bitcnt_t>(-exponent));
  }
  return ExactRational(std::move(out));
}

ExactRational ExactRational::abs() const {
  return ExactRational(mpq_class(::abs(value_)));
}

ExactRational ExactRational::reciprocal() const {
  if (is_zero()) throw DivisionByZero();
  mpq_class out;
  mpq_inv(out.get_mpq_t(), value_.get_mpq_t());
  return ExactRational(std::move(out));
}

std::string ExactRational::to_string() const {
  if (is_integer()) return value_.get_num().get_str();
  return value_.get_num().get_str() + "/" + value_.get_den().get_str();
}

ExactRational& ExactRational::operator+=(const ExactRational& rhs) {
  value_ += rhs.value_;
  return *this;
}

ExactRational& ExactRational::operator-=(const ExactRational& rhs) {
  value_ -= rhs.value_;
  return *this;
}

ExactRational& ExactRational::operator*=(const ExactRational& rhs) {
  value_ *= rhs.value_;
  return *this;
}

ExactRational& ExactRational::operator/=(const ExactRational& rhs) {
  if (rhs.is_zero()) throw DivisionByZero();
  value_ /= rhs.value_;
  return *this;
}

ExactRational ExactRational::operator-() const {
  return ExactRational(mpq_class(-value_));
}

std::ostream& operator<<(std::ostream& os, const ExactRational& r) {
  return os << r.to_string();
}

// ---------------------------------------------------------------------------

DyadicRational normalize_dyadic(const BigInt& numerator,
                                std::uint64_t exponent) {
  return DyadicRational(numerator, exponent);
}

DyadicRational::DyadicRational(BigInt numerator, std::uint64_t exponent)
    : numerator_(std::move(numerator)), exponent_(exponent) {
  if (sgn(numerator_) < 0) {
    throw DomainError("dyadic rationals are nonnegative");
  }
  if (sgn(numerator_) == 0) {
    exponent_ = 0;
    return;
  }
  const std::uint64_t twos = mpz_scan1(numerator_.get_mpz_t(), 0);
  const std::uint64_t strip = twos < exponent_ ? twos : exponent_;
  if (strip > 0) {
    mpz_fdiv_q_2exp(numerator_.get_mpz_t(), numerator_.get_mpz_t(), strip);
    exponent_ -= strip;
  }
}

std::optional<DyadicRational> DyadicRational::from_rational(
    const ExactRational& r) {
  if (r.sign() < 0) return std::nullopt;
  const BigInt den = r.denominator();
  // Power of two iff exactly one bit set.
  if (mpz_popcount(den.get_mpz_t()) != 1) return std::nullopt;
  const std::uint64_t exponent = mpz_scan1(den.get_mpz_t(), 0);
  return DyadicRational(r.numerator(), exponent);
}

ExactRational DyadicRational::to_rational() const {
  return ExactRational(numerator_).scaled_pow2(
      -static_cast<std::int64_t>(exponent_));
}

std::string DyadicRational::to_string() const {
  if (exponent_ == 0) return numerator_.get_str();
  return numerator_.get_str() + "/2^" + std::to_string(exponent_);
}

namespace {

// Numerators of a and b brought to the common exponent max(ea, eb).
std::pair<BigInt, BigInt> align(const DyadicRational& a,
                                const DyadicRational& b, std::uint64_t& e) {
  e = a.exponent() > b.exponent() ? a.exponent() : b.exponent();
  BigInt ka, kb;
  mpz_mul_2exp(ka.get_mpz_t(), a.numerator().get_mpz_t(), e - a.exponent());
  mpz_mul_2exp(kb.get_mpz_t(), b.numerator().get_mpz_t(), e - b.exponent());
  return {std::move(ka), std::move(kb)};
}

}  // namespace

DyadicRational operator+(const DyadicRational& a, const DyadicRational& b) {
  std::uint64_t e = 0;
  auto [ka, kb] = align(a, b, e);
  return DyadicRational(ka + kb, e);
}

DyadicRational operator-(const DyadicRational& a, const DyadicRational& b) {
  std::uint64_t e = 0;
  auto [ka, kb] = align(a, b, e);
  if (ka < kb) throw DomainError("negative dyadic difference");
  return DyadicRational(ka - kb, e);
}

std::strong_ordering operator<=>(const DyadicRational& a,
                                 const DyadicRational& b) {
  std::uint64_t e = 0;
  auto [ka, kb] = align(a, b, e);
  const int c = cmp(ka, kb);
  return c < 0 ? std::strong_ordering::less
               : (c > 0 ? std::strong_ordering::greater
                        : std::strong_ordering::equal);
}

std::ostream& operator<<(std::ostream& os, const DyadicRational& d) {
  return os << d.to_string();
}

LeadingBitSplit split_leading_bit(const DyadicRational& d) {
  const BigInt& k = d.numerator();
  const std::uint64_t total = d.exponent();
  if (sgn(k) == 0 || total == 0) {
    throw DomainError("split_leading_bit requires 0 < d < 1, got " +
                      d.to_string());
  }
  if (k == 1) {
    throw DomainError("split_leading_bit: numerator 1 has no leading-bit split");
  }
  const std::uint64_t bits = mpz_sizeinbase(k.get_mpz_t(), 2);
  if (bits > total) {
    throw DomainError("split_leading_bit requires d < 1, got " +
                      d.to_string());
  }
  LeadingBitSplit out;
  out.q = bits - 1;
  BigInt lead;
  mpz_setbit(lead.get_mpz_t(), out.q);
  out.p = k - lead;
  out.inner_exponent = total - out.q;
  out.x = DyadicRational(out.p, out.q);
  out.partner = DyadicRational(lead - out.p, total);
  return out;
}

BigInt floor(const ExactRational& r) {
  BigInt q;
  mpz_fdiv_q(q.get_mpz_t(), r.raw().get_num_mpz_t(), r.raw().get_den_mpz_t());
  return q;
}

BigInt round_half_even(const ExactRational& r) {
  BigInt q, rem;
  const mpz_srcptr num = r.raw().get_num_mpz_t();
  const mpz_srcptr den = r.raw().get_den_mpz_t();
  mpz_fdiv_qr(q.get_mpz_t(), rem.get_mpz_t(), num, den);
  // 0 <= rem < den; compare 2*rem against den.
  BigInt twice = rem * 2;
  const int c = cmp(twice, BigInt(den));
  if (c > 0 || (c == 0 && mpz_odd_p(q.get_mpz_t()))) q += 1;
  return q;
}

std::string to_decimal_string(const ExactRational& r, std::size_t digits) {
  BigInt scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, digits);
  BigInt scaled = round_half_even(r * ExactRational(scale));
  const bool negative = sgn(scaled) < 0;
  if (negative) scaled = -scaled;

  std::string body = scaled.get_str();
  if (body.size() <= digits) body.insert(0, digits + 1 - body.size(), '0');
  std::string out = negative ? "-" : "";
  out += body.substr(0, body.size() - digits);
  if (digits > 0) {
    out += '.';
    out += body.substr(body.size() - digits);
  }
  return out;
}

}  // namespace fabius

std::size_t std::hash<fabius::DyadicRational>::operator()(
    const fabius::DyadicRational& d) const noexcept {
  const mpz_srcptr k = d.numerator().get_mpz_t();
  std::size_t h = mpz_size(k) == 0 ? 0 : mpz_getlimbn(k, 0);
  h ^= std::hash<std::uint64_t>{}(d.exponent()) + 0x9e3779b97f4a7c15ULL +
       (h << 6) + (h >> 2);
  return h;
}
