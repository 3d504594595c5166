#include "fabius/identity.hpp"

#include <algorithm>
#include <stdexcept>

namespace fabius {

std::int64_t sum_scale_exponent(int n) {
  const std::int64_t m = n;
  return 2 * m * m - 2 * m + 1;
}

std::int64_t diff_scale_exponent(int n) {
  const std::int64_t m = n;
  return 2 * m * m;
}

IdentityPair seed() {
  return {SumIdentity{1, sum_scale_exponent(1), {ExactRational(2)}},
          DiffIdentity{1, diff_scale_exponent(1), {ExactRational(2)}}};
}

namespace {

// Sum_k a_(2k-1) / (k(2k+1)), i.e. a_1/3 + a_3/10 + a_5/21 + ...
// Also fills the integrated-twice coefficients it passes through.
ExactRational integrated_at_one(const DiffIdentity& d,
                                std::vector<ExactRational>* twice) {
  ExactRational total;
  for (std::size_t i = 0; i < d.coeffs.size(); ++i) {
    const long k = static_cast<long>(i) + 1;
    ExactRational term = d.coeffs[i] / ExactRational(k * (2 * k + 1));
    total += term;
    if (twice != nullptr) twice->push_back(std::move(term));
  }
  return total;
}

ExactRational mersenne(std::int64_t bits) {
  return ExactRational::pow2(bits) - ExactRational(1);
}

}  // namespace

IdentityPair step(const DiffIdentity& d) {
  const int n = d.n;
  std::vector<ExactRational> twice;
  twice.reserve(d.coeffs.size());
  const ExactRational constant =
      integrated_at_one(d, &twice) / mersenne(2 * static_cast<std::int64_t>(n));

  IdentityPair out;
  out.sum.n = n + 1;
  out.sum.sigma = sum_scale_exponent(n + 1);
  out.sum.coeffs.reserve(d.coeffs.size() + 1);
  out.sum.coeffs.push_back(constant);
  for (std::size_t i = 0; i < d.coeffs.size(); ++i) {
    out.sum.coeffs.push_back(d.coeffs[i] /
                             ExactRational(static_cast<long>(i) + 1));
  }

  out.diff.n = n + 1;
  out.diff.sigma = diff_scale_exponent(n + 1);
  out.diff.coeffs.reserve(d.coeffs.size() + 1);
  out.diff.coeffs.push_back(constant);
  for (auto& c : twice) out.diff.coeffs.push_back(std::move(c));
  return out;
}

ExactRational small_odd_value(const DiffIdentity& d) {
  const std::int64_t n = d.n;
  if (n == 0) return ExactRational(1, 2);
  return (integrated_at_one(d, nullptr) / mersenne(2 * n))
      .scaled_pow2(-(2 * n * n + 2 * n + 2));
}

namespace {

void check_unit_interval(const ExactRational& x, const char* who) {
  if (x.sign() < 0 || x > ExactRational(1)) {
    throw DomainError(std::string(who) + ": x = " + x.to_string() +
                      " outside [0, 1]");
  }
}

// Horner in y = x^2.
ExactRational horner(const std::vector<ExactRational>& coeffs,
                     const ExactRational& y) {
  ExactRational acc;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
    acc *= y;
    acc += *it;
  }
  return acc;
}

}  // namespace

ExactRational eval_sum(const SumIdentity& s, const ExactRational& x) {
  check_unit_interval(x, "eval_sum");
  return horner(s.coeffs, x * x);
}

ExactRational eval_diff(const DiffIdentity& d, const ExactRational& x) {
  check_unit_interval(x, "eval_diff");
  return horner(d.coeffs, x * x) * x;
}

// ---------------------------------------------------------------------------

IdentityTable::IdentityTable(int max_n) { *this = extend_table(*this, max_n); }

const IdentityLevel& IdentityTable::level(int n) const {
  return *level_ptr(n);
}

std::shared_ptr<const IdentityLevel> IdentityTable::level_ptr(int n) const {
  if (n < 1 || n > max_n()) {
    throw std::out_of_range("identity level " + std::to_string(n) +
                            " not in table (max_n = " +
                            std::to_string(max_n()) + ")");
  }
  return levels_[static_cast<std::size_t>(n - 1)];
}

IdentityTable IdentityTable::prefix(int n) const {
  IdentityTable out;
  const auto keep = static_cast<std::size_t>(std::clamp(n, 0, max_n()));
  out.levels_.assign(levels_.begin(), levels_.begin() + keep);
  return out;
}

std::map<std::int64_t, ExactRational> IdentityTable::small_odd_values() const {
  std::map<std::int64_t, ExactRational> out;
  out.emplace(1, ExactRational(1, 2));
  for (const auto& lvl : levels_) {
    out.emplace(2 * static_cast<std::int64_t>(lvl->diff.n) + 1,
                lvl->small_odd_value);
  }
  return out;
}

IdentityTable extend_table(IdentityTable t, int new_max_n) {
  if (new_max_n < t.max_n()) {
    throw std::invalid_argument("extend_table cannot shrink a table");
  }
  t.levels_.reserve(static_cast<std::size_t>(new_max_n));
  while (t.max_n() < new_max_n) {
    IdentityPair next =
        t.levels_.empty() ? seed() : step(t.levels_.back()->diff);
    ExactRational small = small_odd_value(next.diff);
    t.levels_.push_back(std::make_shared<const IdentityLevel>(IdentityLevel{
        std::move(next.sum), std::move(next.diff), std::move(small)}));
  }
  return t;
}

bool operator==(const IdentityTable& a, const IdentityTable& b) {
  if (a.max_n() != b.max_n()) return false;
  for (std::size_t i = 0; i < a.levels_.size(); ++i) {
    if (a.levels_[i] != b.levels_[i] && *a.levels_[i] != *b.levels_[i]) {
      return false;
    }
  }
  return true;
}

namespace {

[[noreturn]] void corrupt(int n, const std::string& what) {
  throw CorruptTable("level " + std::to_string(n) + ": " + what);
}

}  // namespace

void IdentityTable::validate() const {
  IdentityPair expected = seed();
  ExactRational previous_constant;
  for (int n = 1; n <= max_n(); ++n) {
    const IdentityLevel& lvl = level(n);
    if (lvl.sum.n != n || lvl.diff.n != n) corrupt(n, "level index mismatch");
    if (lvl.sum.sigma != sum_scale_exponent(n)) {
      corrupt(n, "sum scale exponent is " + std::to_string(lvl.sum.sigma) +
                     ", expected " + std::to_string(sum_scale_exponent(n)));
    }
    if (lvl.diff.sigma != diff_scale_exponent(n)) {
      corrupt(n, "difference scale exponent is " +
                     std::to_string(lvl.diff.sigma) + ", expected " +
                     std::to_string(diff_scale_exponent(n)));
    }
    const auto len = static_cast<std::size_t>(n);
    if (lvl.sum.coeffs.size() != len || lvl.diff.coeffs.size() != len) {
      corrupt(n, "coefficient count differs from level");
    }
    for (const auto& c : lvl.sum.coeffs) {
      if (c.sign() <= 0) corrupt(n, "nonpositive sum coefficient");
    }
    for (const auto& c : lvl.diff.coeffs) {
      if (c.sign() <= 0) corrupt(n, "nonpositive difference coefficient");
    }
    // Both sides equal f(1/2^(2n-1)).
    const ExactRational via_diff =
        eval_diff(lvl.diff, ExactRational(1)).scaled_pow2(-lvl.diff.sigma);
    const ExactRational via_sum =
        lvl.sum.coeffs.front().scaled_pow2(-(lvl.sum.sigma + 1));
    if (via_diff != via_sum) corrupt(n, "D_n(1) and S_n(0) disagree");
    if (n > 1 && !(lvl.sum.coeffs.front() < previous_constant)) {
      corrupt(n, "constant coefficients not strictly decreasing");
    }
    previous_constant = lvl.sum.coeffs.front();

    if (lvl.sum != expected.sum || lvl.diff != expected.diff) {
      corrupt(n, "coefficients do not follow from the previous level");
    }
    if (lvl.small_odd_value != small_odd_value(lvl.diff)) {
      corrupt(n, "small-value constant mismatch");
    }
    expected = step(lvl.diff);
  }
}

IdentityTable IdentityTable::from_levels(std::vector<IdentityLevel> levels) {
  IdentityTable t;
  t.levels_.reserve(levels.size());
  for (auto& lvl : levels) {
    t.levels_.push_back(std::make_shared<const IdentityLevel>(std::move(lvl)));
  }
  t.validate();
  return t;
}

}  // namespace fabius
