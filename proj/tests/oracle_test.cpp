#include <gtest/gtest.h>

#include <random>

#include "fabius/oracle.hpp"
#include "json.hpp"

namespace fabius {
namespace {

ExactRational Q(const char* s) { return ExactRational::parse(s); }
DyadicRational D(unsigned long k, std::uint64_t m) {
  return DyadicRational(BigInt(k), m);
}

TEST(Polynomial, TaylorShift) {
  // (t + 2)^2 = t^2 + 4t + 4
  const Polynomial p{ExactRational(0), ExactRational(0), ExactRational(1)};
  const Polynomial shifted = taylor_shift(p, ExactRational(2));
  EXPECT_EQ(shifted, (Polynomial{ExactRational(4), ExactRational(4),
                                 ExactRational(1)}));
  EXPECT_EQ(evaluate(shifted, Q("1/3")), evaluate(p, Q("7/3")));
}

TEST(TruncatedCdf, LevelOne) {
  const auto f = truncated_cdf(1);
  ASSERT_EQ(f.breakpoints(), (std::vector<ExactRational>{0, Q("1/2")}));
  EXPECT_EQ(f.pieces()[0], (Polynomial{ExactRational(0), ExactRational(2)}));
  EXPECT_EQ(f(Q("1/8")), Q("1/4"));
}

TEST(TruncatedCdf, LevelTwo) {
  const auto f = truncated_cdf(2);
  EXPECT_EQ(f(Q("3/8")), Q("1/2"));
  // 4 * integral_0^x 2t dt = 4x^2 on [0, 1/4].
  EXPECT_EQ(f.breakpoints()[1], Q("1/4"));
  EXPECT_EQ(f.pieces()[0],
            (Polynomial{ExactRational(0), ExactRational(0), ExactRational(4)}));
  EXPECT_EQ(f(Q("1/8")), Q("1/16"));
}

TEST(TruncatedCdf, RangeChecked) {
  EXPECT_THROW(truncated_cdf(0), DomainError);
  EXPECT_THROW(truncated_cdf(kMaxOracleLevel + 1), DomainError);
  EXPECT_THROW(truncated_cdf_at(0, Q("1/2")), DomainError);
  EXPECT_THROW(bracket(D(1, 1), 25), DomainError);
}

TEST(TruncatedCdf, StructuralInvariants) {
  for (int N = 1; N <= 9; ++N) {
    const auto f = truncated_cdf(N);
    EXPECT_EQ(f.level(), N);
    EXPECT_TRUE(f.is_continuous()) << N;
    EXPECT_LE(f.max_degree(), static_cast<std::size_t>(N));
    EXPECT_EQ(f.breakpoints().front(), ExactRational(0));
    EXPECT_EQ(f.breakpoints().back(), ExactRational(1) - ExactRational::pow2(-N));
    EXPECT_EQ(f(f.breakpoints().back()), ExactRational(1));
    EXPECT_EQ(f(ExactRational(0)), ExactRational(0));
    ExactRational previous(-1);
    for (unsigned long j = 0; j <= 256; ++j) {
      const ExactRational v = f(ExactRational(BigInt(j), BigInt(256)));
      EXPECT_GE(v, previous);
      previous = v;
    }
  }
}

TEST(TruncatedCdf, ConvolutionOrderInvariance) {
  const auto a = PiecewisePolynomialCDF::uniform(Q("1/2"))
                     .convolve_uniform(Q("1/4"))
                     .normalized();
  const auto b = PiecewisePolynomialCDF::uniform(Q("1/4"))
                     .convolve_uniform(Q("1/2"))
                     .normalized();
  EXPECT_EQ(a, b);
  const auto c = PiecewisePolynomialCDF::uniform(Q("1/8"))
                     .convolve_uniform(Q("1/2"))
                     .convolve_uniform(Q("1/4"))
                     .normalized();
  EXPECT_EQ(c, truncated_cdf(3).normalized());
}

TEST(TruncatedCdf, NormalizeMergesContinuations) {
  // Two uniforms of equal width: triangle, a true breakpoint at the peak.
  const auto tri = PiecewisePolynomialCDF::uniform(Q("1/2"))
                       .convolve_uniform(Q("1/2"))
                       .normalized();
  EXPECT_EQ(tri.breakpoints().size(), 3u);
  EXPECT_TRUE(tri.is_continuous());
}

TEST(TruncatedCdfAt, MatchesMaterializedCdf) {
  std::mt19937_64 rng(17);
  for (int N = 1; N <= 10; ++N) {
    const auto f = truncated_cdf(N);
    for (unsigned long j = 0; j <= 64; ++j) {
      const ExactRational x(BigInt(j), BigInt(64));
      EXPECT_EQ(truncated_cdf_at(N, x), f(x)) << "N=" << N << " x=" << x;
    }
    for (int i = 0; i < 20; ++i) {
      const ExactRational x(BigInt(static_cast<unsigned long>(rng() % 1000)),
                            BigInt(static_cast<unsigned long>(1 + rng() % 997)));
      EXPECT_EQ(truncated_cdf_at(N, x), f(x)) << "N=" << N << " x=" << x;
    }
  }
}

TEST(Bracket, Examples) {
  const Bracket half = bracket(D(1, 1), 10);
  EXPECT_LE(half.lo, Q("1/2"));
  EXPECT_GE(half.hi, Q("1/2"));
  EXPECT_LE(half.hi - half.lo, ExactRational::pow2(-9));

  const Bracket zero = bracket(DyadicRational(), 7);
  EXPECT_EQ(zero.lo, ExactRational(0));
  EXPECT_EQ(zero.hi, ExactRational(0));

  const Bracket five = bracket(D(5, 4), 12);
  EXPECT_LE(five.lo, Q("305857/2073600"));
  EXPECT_GE(five.hi, Q("305857/2073600"));
}

TEST(Bracket, SoundAndNarrowOnGrid) {
  const Evaluator ev;
  for (int N : {8, 12, 16}) {
    for (unsigned long j = 0; j <= 16; ++j) {
      const Bracket b = bracket(D(j, 4), N);
      const ExactRational v = ev.eval_unit(D(j, 4));
      EXPECT_LE(b.lo, v) << "N=" << N << " j=" << j;
      EXPECT_LE(v, b.hi) << "N=" << N << " j=" << j;
      EXPECT_LE(b.hi - b.lo, ExactRational::pow2(1 - N));
    }
  }
}

TEST(VerifyGolden, Nominal) {
  const Evaluator ev;
  EXPECT_EQ(ev.table_snapshot().max_n(), 0);
  const auto report = verify_golden(ev);
  EXPECT_TRUE(report.pass());
  EXPECT_EQ(report.cases, 31u);
  EXPECT_EQ(golden_values().size(), 31u);
}

TEST(VerifyGolden, InjectedFaultIsReported) {
  const Evaluator ev;
  auto table = golden_values();
  table[9].value = Q("305858/2073600");
  const auto report = verify_golden(ev, table);
  EXPECT_FALSE(report.pass());
  ASSERT_EQ(report.failures.size(), 1u);
  EXPECT_EQ(report.failures[0].input, "5/2^4");
  EXPECT_EQ(report.failures[0].expected, "152929/1036800");
  EXPECT_EQ(report.failures[0].got, "305857/2073600");
}

TEST(VerifyIdentities, Examples) {
  const Evaluator ev({.reflect_upper_half = false});
  std::vector<DyadicRational> grid;
  for (unsigned long j = 0; j <= 16; ++j) grid.push_back(D(j, 4));
  const auto full = verify_identities(ev, 5, grid);
  EXPECT_TRUE(full.pass());
  EXPECT_EQ(full.cases, 5u * (2 * 17 + 2));

  EXPECT_TRUE(verify_identities(ev, 1, {DyadicRational()}).pass());
  EXPECT_TRUE(verify_identities(ev, 2, {D(1, 1)}).pass());
  EXPECT_EQ(eval_sum(ev.level(2)->sum, Q("1/2")), Q("13/18"));
  EXPECT_EQ((ev.eval_unit(D(3, 4)) + ev.eval_unit(D(1, 4))).scaled_pow2(5),
            Q("13/18"));
}

TEST(VerifyOracle, Passes) {
  const Evaluator ev;
  const auto report = verify_oracle(ev, 12);
  EXPECT_TRUE(report.pass());
  EXPECT_EQ(report.cases, 17u);
}

TEST(Report, JsonSchema) {
  VerificationReport r;
  r.suite = "golden";
  r.cases = 2;
  r.failures.push_back({"1/2^2", "5/72", "1/14"});
  const auto doc = nlohmann::json::parse(report_to_json(r));
  EXPECT_EQ(doc["suite"], "golden");
  EXPECT_EQ(doc["cases"], 2);
  EXPECT_EQ(doc["pass"], false);
  EXPECT_EQ(doc["failures"][0]["input"], "1/2^2");
  EXPECT_EQ(doc["failures"][0]["expected"], "5/72");
  EXPECT_EQ(doc["failures"][0]["got"], "1/14");
  r.failures.clear();
  EXPECT_EQ(nlohmann::json::parse(report_to_json(r))["pass"], true);
}

TEST(MonteCarlo, SmokeTests) {
  const auto half = monte_carlo_estimate(Q("1/2"), 1000000, 42);
  EXPECT_NEAR(half.estimate, 0.5, 5 * half.standard_error);
  const auto one = monte_carlo_estimate(ExactRational(1), 1000, 3);
  EXPECT_EQ(one.estimate, 1.0);
  const auto five = monte_carlo_estimate(Q("5/16"), 1000000, 1);
  EXPECT_NEAR(five.estimate, 305857.0 / 2073600.0, 5 * five.standard_error);
  // Reproducible for a fixed seed.
  EXPECT_EQ(monte_carlo_estimate(Q("1/3"), 70000, 5).estimate,
            monte_carlo_estimate(Q("1/3"), 70000, 5).estimate);
}

}  // namespace
}  // namespace fabius
