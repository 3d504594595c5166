#include <algorithm>
#include <bit>
#include <cmath>
#include <future>
#include <random>

#include "fabius/oracle.hpp"
#include "json.hpp"

namespace fabius {

namespace {

void check_level(int N) {
  if (N < 1 || N > kMaxOracleLevel) {
    throw DomainError("oracle level N = " + std::to_string(N) +
                      " outside [1, " + std::to_string(kMaxOracleLevel) + "]");
  }
}

// sum_{0 <= s < X} (-1)^popcount(s) (a - s b)^N where X = a/b, s < 2^N.
BigInt signed_power_sum(int N, const BigInt& a, const BigInt& b) {
  BigInt total, term, base;
  const auto exponent = static_cast<unsigned long>(N);
  if (b == 1) {
    const unsigned long upper = a.get_ui();
    for (unsigned long s = 0; s < upper; ++s) {
      mpz_ui_pow_ui(term.get_mpz_t(), upper - s, exponent);
      if (std::popcount(s) & 1) {
        total -= term;
      } else {
        total += term;
      }
    }
    return total;
  }
  for (unsigned long s = 0;; ++s) {
    base = a - b * s;
    if (sgn(base) <= 0) break;
    mpz_pow_ui(term.get_mpz_t(), base.get_mpz_t(), exponent);
    if (std::popcount(s) & 1) {
      total -= term;
    } else {
      total += term;
    }
  }
  return total;
}

}  // namespace

ExactRational truncated_cdf_at(int N, const ExactRational& x) {
  check_level(N);
  const ExactRational right_end = ExactRational(1) - ExactRational::pow2(-N);
  if (x.sign() <= 0) return ExactRational(0);
  if (x >= right_end) return ExactRational(1);
  // X_N is symmetric about right_end / 2; take the side with fewer terms.
  if (x.scaled_pow2(1) > right_end) {
    return ExactRational(1) - truncated_cdf_at(N, right_end - x);
  }
  const ExactRational scaled = x.scaled_pow2(N);
  const BigInt a = scaled.numerator();
  const BigInt b = scaled.denominator();
  const BigInt sum = signed_power_sum(N, a, b);

  // 2^(N(N+1)/2) / (N! 2^(N^2) b^N)
  BigInt factorial, b_pow;
  mpz_fac_ui(factorial.get_mpz_t(), static_cast<unsigned long>(N));
  mpz_pow_ui(b_pow.get_mpz_t(), b.get_mpz_t(), static_cast<unsigned long>(N));
  const std::int64_t n = N;
  return ExactRational(sum, factorial * b_pow)
      .scaled_pow2(n * (n + 1) / 2 - n * n);
}

Bracket bracket(const DyadicRational& x, int N) {
  check_level(N);
  const ExactRational value = x.to_rational();
  if (value.sign() < 0 || value > ExactRational(1)) {
    throw DomainError("bracket: x = " + x.to_string() + " outside [0, 1]");
  }
  ExactRational lower = value - ExactRational::pow2(-N);
  if (lower.sign() < 0) lower = ExactRational(0);
  return {truncated_cdf_at(N, lower), truncated_cdf_at(N, value)};
}

// ---------------------------------------------------------------------------

std::string report_to_json(const VerificationReport& r, int indent) {
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& f : r.failures) {
    failures.push_back(
        {{"input", f.input}, {"expected", f.expected}, {"got", f.got}});
  }
  return nlohmann::json{{"suite", r.suite},
                        {"cases", r.cases},
                        {"failures", std::move(failures)},
                        {"pass", r.pass()}}
      .dump(indent);
}

const std::vector<GoldenValue>& golden_values() {
  static const std::vector<GoldenValue> table = [] {
    struct Row {
      unsigned long j;
      std::uint64_t m;
      const char* value;
    };
    static constexpr Row kRows[] = {
        {1, 1, "1/2"},
        {1, 2, "5/72"},
        {3, 2, "67/72"},
        {1, 3, "1/288"},
        {3, 3, "73/288"},
        {5, 3, "215/288"},
        {7, 3, "287/288"},
        {1, 4, "143/2073600"},
        {3, 4, "46657/2073600"},
        {5, 4, "305857/2073600"},
        {7, 4, "777743/2073600"},
        {9, 4, "1295857/2073600"},
        {11, 4, "1767743/2073600"},
        {13, 4, "2026943/2073600"},
        {15, 4, "2073457/2073600"},
        {1, 5, "19/33177600"},
        {3, 5, "25219/33177600"},
        {5, 5, "334781/33177600"},
        {7, 5, "1396781/33177600"},
        {9, 5, "3470381/33177600"},
        {11, 5, "6555581/33177600"},
        {13, 5, "10393219/33177600"},
        {15, 5, "14515219/33177600"},
        {17, 5, "18662381/33177600"},
        {19, 5, "22784381/33177600"},
        {21, 5, "26622019/33177600"},
        {23, 5, "29707219/33177600"},
        {25, 5, "31780819/33177600"},
        {27, 5, "32842819/33177600"},
        {29, 5, "33152381/33177600"},
        {31, 5, "33177581/33177600"},
    };
    std::vector<GoldenValue> out;
    for (const Row& row : kRows) {
      out.push_back({DyadicRational(BigInt(row.j), row.m),
                     ExactRational::parse(row.value)});
    }
    return out;
  }();
  return table;
}

VerificationReport verify_golden(const Evaluator& ev,
                                 const std::vector<GoldenValue>& table) {
  VerificationReport report;
  report.suite = "golden";
  report.provenance = "published table of f(j/2^m), m <= 5";
  for (const auto& g : table) {
    ++report.cases;
    const ExactRational got = ev.eval_unit(g.argument);
    if (got != g.value) {
      report.failures.push_back(
          {g.argument.to_string(), g.value.to_string(), got.to_string()});
    }
  }
  return report;
}

VerificationReport verify_identities(const Evaluator& ev, int max_n,
                                     const std::vector<DyadicRational>& xs) {
  VerificationReport report;
  report.suite = "identities";
  report.provenance =
      "sum/difference closed forms against pairing-descent values";
  const DyadicRational one = DyadicRational::integer(1);

  auto record = [&report](std::string input, const ExactRational& expected,
                          const ExactRational& got) {
    ++report.cases;
    if (expected != got) {
      report.failures.push_back(
          {std::move(input), expected.to_string(), got.to_string()});
    }
  };

  for (int n = 1; n <= max_n; ++n) {
    const auto lvl = ev.level(n);
    const std::uint64_t sum_exp = 2 * static_cast<std::uint64_t>(n) - 1;
    const std::uint64_t diff_exp = sum_exp + 1;
    for (const auto& x : xs) {
      const ExactRational xr = x.to_rational();
      const std::string tag = "n=" + std::to_string(n) + " x=" + x.to_string();

      // (1 +- x) / 2^e = (2^q +- p) / 2^(q+e) for x = p/2^q.
      auto at = [&](std::uint64_t e, bool plus) {
        BigInt lead;
        mpz_setbit(lead.get_mpz_t(), x.exponent());
        const BigInt num = plus ? BigInt(lead + x.numerator())
                                : BigInt(lead - x.numerator());
        return ev.eval_unit(DyadicRational(num, x.exponent() + e));
      };

      record("S " + tag, eval_sum(lvl->sum, xr),
             (at(sum_exp, true) + at(sum_exp, false)).scaled_pow2(lvl->sum.sigma));
      record("D " + tag, eval_diff(lvl->diff, xr),
             (at(diff_exp, true) - at(diff_exp, false))
                 .scaled_pow2(lvl->diff.sigma));
    }

    record("D_n(1) vs S_n(0) n=" + std::to_string(n),
           lvl->sum.coeffs.front().scaled_pow2(-(lvl->sum.sigma + 1)),
           eval_diff(lvl->diff, ExactRational(1)).scaled_pow2(-lvl->diff.sigma));

    const DyadicRational power(BigInt(1), 2 * static_cast<std::uint64_t>(n) - 2);
    record("S_n(1) vs f(1/2^(2n-2)) n=" + std::to_string(n),
           ExactRational(1) - ev.eval_unit(one - power),
           eval_sum(lvl->sum, ExactRational(1)).scaled_pow2(-lvl->sum.sigma));
  }
  return report;
}

VerificationReport verify_oracle(const Evaluator& ev, int N,
                                 std::uint64_t grid_exponent) {
  check_level(N);
  VerificationReport report;
  report.suite = "oracle";
  report.provenance =
      "exact CDF of sum_{n<=N} 2^-n U_n (distribution-function "
      "characterization, independent of the closed forms)";
  const std::uint64_t count = std::uint64_t{1} << grid_exponent;
  const ExactRational max_width = ExactRational::pow2(1 - N);

  std::vector<std::future<std::optional<VerificationFailure>>> jobs;
  for (std::uint64_t j = 0; j <= count; ++j) {
    jobs.push_back(std::async(std::launch::async, [&ev, N, j, grid_exponent,
                                                   &max_width]()
                                  -> std::optional<VerificationFailure> {
      const DyadicRational x(BigInt(static_cast<unsigned long>(j)),
                             grid_exponent);
      const ExactRational value = ev.eval_unit(x);
      const Bracket b = bracket(x, N);
      const std::string range =
          "[" + b.lo.to_string() + ", " + b.hi.to_string() + "]";
      if (!(b.lo <= value && value <= b.hi)) {
        return VerificationFailure{x.to_string(), range, value.to_string()};
      }
      if (b.hi - b.lo > max_width) {
        return VerificationFailure{x.to_string(),
                                   "width <= " + max_width.to_string(),
                                   (b.hi - b.lo).to_string()};
      }
      return std::nullopt;
    }));
  }
  for (auto& job : jobs) {
    ++report.cases;
    if (auto failure = job.get()) report.failures.push_back(std::move(*failure));
  }
  return report;
}

MonteCarloEstimate monte_carlo_estimate(const ExactRational& x,
                                        std::uint64_t samples,
                                        std::uint64_t seed) {
  if (samples == 0) throw DomainError("monte_carlo_estimate: samples >= 1");
  const double threshold = x.raw().get_d();
  constexpr std::uint64_t kChunk = std::uint64_t{1} << 16;
  constexpr int kTerms = 40;

  // Each chunk draws from its own stream keyed by (seed, chunk), so the
  // result does not depend on how chunks are scheduled.
  std::uint64_t hits = 0;
  for (std::uint64_t start = 0, chunk = 0; start < samples;
       start += kChunk, ++chunk) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(chunk),
                      static_cast<std::uint32_t>(chunk >> 32)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::uint64_t stop = std::min(samples, start + kChunk);
    for (std::uint64_t i = start; i < stop; ++i) {
      double sum = 0.0;
      double scale = 0.5;
      for (int n = 0; n < kTerms; ++n, scale *= 0.5) sum += scale * unit(rng);
      if (sum <= threshold) ++hits;
    }
  }
  MonteCarloEstimate out;
  out.samples = samples;
  out.estimate = static_cast<double>(hits) / static_cast<double>(samples);
  out.standard_error = std::sqrt(out.estimate * (1.0 - out.estimate) /
                                 static_cast<double>(samples));
  return out;
}

}  // namespace fabius
