#include "fabius/evaluator.hpp"

#include <bit>
#include <mutex>

namespace fabius {

int thue_morse(std::uint64_t m) { return std::popcount(m) & 1; }

int thue_morse(const BigInt& m) {
  if (sgn(m) < 0) throw DomainError("thue_morse of a negative integer");
  return static_cast<int>(mpz_popcount(m.get_mpz_t()) & 1U);
}

Evaluator::Evaluator(EvaluatorOptions options, IdentityTable table)
    : options_(options), table_(std::move(table)) {}

std::shared_ptr<const IdentityLevel> Evaluator::level(int n) const {
  {
    std::shared_lock lock(table_mutex_);
    if (n <= table_.max_n()) return table_.level_ptr(n);
  }
  std::unique_lock lock(table_mutex_);
  if (n > table_.max_n()) table_ = extend_table(std::move(table_), n);
  return table_.level_ptr(n);
}

IdentityTable Evaluator::table_snapshot() const {
  std::shared_lock lock(table_mutex_);
  return table_;
}

std::size_t Evaluator::cache_size() const {
  std::shared_lock lock(cache_mutex_);
  return cache_.size();
}

bool Evaluator::cache_lookup(const DyadicRational& d,
                             ExactRational& out) const {
  if (options_.cache_capacity == 0) return false;
  std::shared_lock lock(cache_mutex_);
  const auto it = cache_.find(d);
  if (it == cache_.end()) return false;
  out = it->second;
  hits_.fetch_add(1, std::memory_order_relaxed);
  return true;
}

void Evaluator::cache_store(const DyadicRational& d,
                            const ExactRational& v) const {
  if (options_.cache_capacity == 0) return;
  std::unique_lock lock(cache_mutex_);
  if (cache_.size() >= options_.cache_capacity) return;
  cache_.emplace(d, v);
}

namespace {

void check_unit(const DyadicRational& d) {
  const std::uint64_t bits = mpz_sizeinbase(d.numerator().get_mpz_t(), 2);
  // d <= 1 iff k < 2^M, or d == 1 exactly.
  if (!d.is_zero() && bits > d.exponent() &&
      !(d.exponent() == 0 && d.numerator() == 1)) {
    throw DomainError("eval_unit: argument " + d.to_string() +
                      " outside [0, 1]");
  }
}

const DyadicRational& one() {
  static const DyadicRational kOne = DyadicRational::integer(1);
  return kOne;
}

const DyadicRational& half() {
  static const DyadicRational kHalf(BigInt(1), 1);
  return kHalf;
}

}  // namespace

ExactRational Evaluator::power_of_two_value(std::uint64_t exponent) const {
  if (exponent == 0) return ExactRational(1);
  if (exponent == 1) return ExactRational(1, 2);
  if (exponent % 2 == 1) {
    // 1/2^(2n-1) = S_n(0) / 2^(sigma+1)
    const int n = static_cast<int>((exponent + 1) / 2);
    const auto lvl = level(n);
    return lvl->sum.coeffs.front().scaled_pow2(-(lvl->sum.sigma + 1));
  }
  // 1/2^(2n-2) = S_n(1) / 2^sigma
  const int n = static_cast<int>((exponent + 2) / 2);
  const auto lvl = level(n);
  return eval_sum(lvl->sum, ExactRational(1)).scaled_pow2(-lvl->sum.sigma);
}

ExactRational Evaluator::descend(const DyadicRational& d) const {
  // f(node) = term + f(next), or term - f(next) when `subtract`.
  struct Link {
    DyadicRational node;
    ExactRational term;
    bool subtract;
  };
  std::vector<Link> chain;
  ExactRational value;
  DyadicRational cur = d;
  bool from_cache = false;

  for (;;) {
    if (cache_lookup(cur, value)) {
      from_cache = true;
      break;
    }
    if (cur.is_zero()) {
      value = ExactRational(0);
      break;
    }
    if (cur.numerator() == 1) {
      value = power_of_two_value(cur.exponent());
      break;
    }
    if (options_.reflect_upper_half && cur > half()) {
      DyadicRational mirror = one() - cur;
      chain.push_back({std::move(cur), ExactRational(1), true});
      cur = std::move(mirror);
      continue;
    }
    LeadingBitSplit split = split_leading_bit(cur);
    const ExactRational x = split.x.to_rational();
    ExactRational term;
    bool subtract = false;
    if (split.inner_exponent % 2 == 1) {
      const int n = static_cast<int>((split.inner_exponent + 1) / 2);
      const auto lvl = level(n);
      term = eval_sum(lvl->sum, x).scaled_pow2(-lvl->sum.sigma);
      subtract = true;
    } else {
      const int n = static_cast<int>(split.inner_exponent / 2);
      const auto lvl = level(n);
      term = eval_diff(lvl->diff, x).scaled_pow2(-lvl->diff.sigma);
    }
    chain.push_back({std::move(cur), std::move(term), subtract});
    cur = std::move(split.partner);
  }

  if (!from_cache) cache_store(cur, value);
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
    value = it->subtract ? it->term - value : it->term + value;
    cache_store(it->node, value);
  }
  return value;
}

ExactRational Evaluator::eval_unit(const DyadicRational& d) const {
  check_unit(d);
  return descend(d);
}

ExactRational Evaluator::eval_reflected(const DyadicRational& d) const {
  check_unit(d);
  return ExactRational(1) - descend(one() - d);
}

ExactRational Evaluator::eval_extended(const DyadicRational& d) const {
  // d = 2M + r with r in [0, 2).
  BigInt period;
  mpz_fdiv_q_2exp(period.get_mpz_t(), d.numerator().get_mpz_t(),
                  d.exponent() + 1);
  const DyadicRational r = d - DyadicRational(period * 2, 0);
  const DyadicRational two = DyadicRational::integer(2);
  ExactRational bell = r <= one() ? eval_unit(r) : eval_unit(two - r);
  return thue_morse(period) == 0 ? bell : -bell;
}

ApproxResult Evaluator::approx_eval(const ExactRational& x,
                                    const ExactRational& eps) const {
  if (x.sign() < 0) {
    throw DomainError("approx_eval: x = " + x.to_string() + " is negative");
  }
  if (eps.sign() <= 0) {
    throw DomainError("approx_eval: eps must be positive");
  }
  // Smallest m >= 0 with 2^-m <= eps.
  std::uint64_t m = 0;
  if (eps < ExactRational(1)) {
    const BigInt num = eps.numerator();
    const BigInt den = eps.denominator();
    const auto nb = mpz_sizeinbase(num.get_mpz_t(), 2);
    const auto db = mpz_sizeinbase(den.get_mpz_t(), 2);
    m = db > nb ? db - nb : 0;
    while (eps.scaled_pow2(static_cast<std::int64_t>(m)) < ExactRational(1)) {
      ++m;
    }
    while (m > 0 &&
           eps.scaled_pow2(static_cast<std::int64_t>(m) - 1) >= ExactRational(1)) {
      --m;
    }
  }
  const std::uint64_t bits = m + 1;
  DyadicRational anchor(
      round_half_even(x.scaled_pow2(static_cast<std::int64_t>(bits))), bits);
  ExactRational bound = (x - anchor.to_rational()).abs() * ExactRational(2);
  ExactRational value = eval_extended(anchor);
  return {x, std::move(anchor), std::move(value), std::move(bound)};
}

void Evaluator::for_each_value_at_denominator(
    std::uint64_t m,
    const std::function<void(const FabiusValue&)>& visit) const {
  if (m > 62) throw DomainError("values_at_denominator: exponent too large");
  const std::uint64_t count = std::uint64_t{1} << m;
  for (std::uint64_t j = 0; j <= count; ++j) {
    DyadicRational arg(BigInt(static_cast<unsigned long>(j)), m);
    ExactRational value = eval_unit(arg);
    visit(FabiusValue{std::move(arg), std::move(value)});
  }
}

std::vector<FabiusValue> Evaluator::values_at_denominator(
    std::uint64_t m) const {
  std::vector<FabiusValue> out;
  for_each_value_at_denominator(
      m, [&out](const FabiusValue& v) { out.push_back(v); });
  return out;
}

}  // namespace fabius
