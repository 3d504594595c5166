#include <gtest/gtest.h>

#include <random>
#include <thread>
#include <vector>

#include "fabius/evaluator.hpp"

namespace fabius {
namespace {

ExactRational Q(const char* s) { return ExactRational::parse(s); }
DyadicRational D(unsigned long k, std::uint64_t m) {
  return DyadicRational(BigInt(k), m);
}

// f(X) = integral_0^{2X} f = sum_{m<M} (-1)^t(m) + (-1)^t(M) f(r/2) with
// 2X = 2M + r, using only values on [0, 1).
ExactRational by_integral_decomposition(const Evaluator& ev,
                                        const DyadicRational& x) {
  const DyadicRational twice = x + x;
  BigInt periods;
  mpz_fdiv_q_2exp(periods.get_mpz_t(), twice.numerator().get_mpz_t(),
                  twice.exponent() + 1);
  const DyadicRational r = twice - DyadicRational(periods * 2, 0);
  ExactRational total;
  for (unsigned long m = 0; m < periods.get_ui(); ++m) {
    total += ExactRational(thue_morse(m) ? -1 : 1);
  }
  const DyadicRational half_r(r.numerator(), r.exponent() + 1);
  const ExactRational tail = ev.eval_unit(half_r);
  return thue_morse(periods) ? total - tail : total + tail;
}

TEST(EvalUnit, PublishedValues) {
  const Evaluator ev;
  EXPECT_EQ(ev.eval_unit(D(1, 2)), Q("5/72"));
  EXPECT_EQ(ev.eval_unit(D(5, 4)), Q("305857/2073600"));
  EXPECT_EQ(ev.eval_unit(D(29, 5)), Q("33152381/33177600"));
  EXPECT_EQ(ev.eval_unit(DyadicRational()), ExactRational(0));
  EXPECT_EQ(ev.eval_unit(DyadicRational::integer(1)), ExactRational(1));
}

TEST(EvalUnit, PureDescentMatchesReflected) {
  const Evaluator plain({.reflect_upper_half = false, .cache_capacity = 0});
  const Evaluator reflecting;
  for (unsigned long j = 0; j <= 64; ++j) {
    EXPECT_EQ(plain.eval_unit(D(j, 6)), reflecting.eval_unit(D(j, 6))) << j;
  }
}

TEST(EvalUnit, DomainErrors) {
  const Evaluator ev;
  EXPECT_THROW(ev.eval_unit(D(3, 1)), DomainError);
  EXPECT_THROW(ev.eval_unit(DyadicRational::integer(2)), DomainError);
  EXPECT_THROW(ev.eval_reflected(D(5, 2)), DomainError);
}

TEST(EvalReflected, Examples) {
  const Evaluator ev;
  EXPECT_EQ(ev.eval_reflected(D(3, 2)), Q("67/72"));
  EXPECT_EQ(ev.eval_reflected(D(1, 1)), Q("1/2"));
  EXPECT_EQ(ev.eval_reflected(D(15, 4)), Q("2073457/2073600"));
}

TEST(ThueMorse, Examples) {
  EXPECT_EQ(thue_morse(std::uint64_t{0}), 0);
  EXPECT_EQ(thue_morse(std::uint64_t{3}), 0);
  EXPECT_EQ(thue_morse(std::uint64_t{7}), 1);
  EXPECT_EQ(thue_morse(BigInt("340282366920938463463374607431768211456")), 1);
  // t(2m) = t(m), t(2m+1) = 1 - t(m).
  for (std::uint64_t m = 0; m < 1000; ++m) {
    EXPECT_EQ(thue_morse(2 * m), thue_morse(m));
    EXPECT_EQ(thue_morse(2 * m + 1), 1 - thue_morse(m));
  }
}

TEST(EvalExtended, Examples) {
  const Evaluator ev;
  EXPECT_EQ(ev.eval_extended(DyadicRational::integer(2)), ExactRational(0));
  EXPECT_EQ(ev.eval_extended(D(5, 1)), Q("-1/2"));
  EXPECT_EQ(ev.eval_extended(DyadicRational::integer(3)), ExactRational(-1));
  EXPECT_EQ(by_integral_decomposition(ev, D(5, 1)), Q("-1/2"));
  EXPECT_EQ(by_integral_decomposition(ev, DyadicRational::integer(3)),
            ExactRational(-1));
}

TEST(EvalExtended, IntegralDecomposition) {
  const Evaluator ev;
  for (unsigned long j = 0; j <= 16 * 12; ++j) {
    const DyadicRational x = D(j, 4);
    EXPECT_EQ(ev.eval_extended(x), by_integral_decomposition(ev, x))
        << x.to_string();
  }
}

TEST(EvalExtended, BellRepeatsUpToSign) {
  const Evaluator ev;
  for (unsigned long j = 0; j < 64; ++j) {
    const DyadicRational r = D(j, 5);  // [0, 2)
    const ExactRational bell = ev.eval_extended(r);
    EXPECT_GE(bell, ExactRational(0));
    EXPECT_LE(bell, ExactRational(1));
    for (std::uint64_t m : {1u, 2u, 5u, 11u}) {
      const ExactRational v =
          ev.eval_extended(r + DyadicRational::integer(2 * m));
      EXPECT_EQ(v.abs(), bell);
    }
  }
}

TEST(ApproxEval, Examples) {
  const Evaluator ev;
  const ApproxResult a = ev.approx_eval(Q("3/10"), Q("1/64"));
  EXPECT_EQ(a.anchor, D(19, 6));
  EXPECT_EQ(a.value, ev.eval_unit(D(19, 6)));
  EXPECT_EQ(a.error_bound, Q("1/160"));
  EXPECT_LE(a.error_bound, Q("1/64"));

  const ApproxResult exact = ev.approx_eval(Q("5/16"), Q("1/1024"));
  EXPECT_EQ(exact.anchor, D(5, 4));
  EXPECT_EQ(exact.error_bound, ExactRational(0));

  const ApproxResult half = ev.approx_eval(Q("1/2"), ExactRational(1));
  EXPECT_EQ(half.value, Q("1/2"));
  EXPECT_EQ(half.error_bound, ExactRational(0));

  EXPECT_THROW(ev.approx_eval(Q("-1"), Q("1/8")), DomainError);
  EXPECT_THROW(ev.approx_eval(Q("1/3"), ExactRational(0)), DomainError);
}

TEST(ApproxEval, BoundWithinEps) {
  const Evaluator ev;
  std::mt19937_64 rng(9);
  for (int i = 0; i < 200; ++i) {
    const ExactRational x(BigInt(static_cast<unsigned long>(rng() % 40000)),
                          BigInt(static_cast<unsigned long>(1 + rng() % 9999)));
    const ExactRational eps(BigInt(1),
                            BigInt(static_cast<unsigned long>(1 + rng() % 5000)));
    const ApproxResult r = ev.approx_eval(x, eps);
    EXPECT_LE(r.error_bound, eps);
    EXPECT_EQ(r.error_bound, (x - r.anchor.to_rational()).abs() * 2);
    EXPECT_EQ(r.value, ev.eval_extended(r.anchor));
  }
}

TEST(ApproxEval, CertifiedAgainstExactValues) {
  // Fine dyadic queries have exact values to compare the bound against.
  const Evaluator ev;
  std::mt19937_64 rng(13);
  for (int i = 0; i < 300; ++i) {
    const DyadicRational x = D(static_cast<unsigned long>(rng() % (6 << 14)), 14);
    const ExactRational eps = ExactRational::pow2(-static_cast<int>(rng() % 12));
    const ApproxResult r = ev.approx_eval(x.to_rational(), eps);
    EXPECT_LE((ev.eval_extended(x) - r.value).abs(), r.error_bound)
        << x.to_string();
  }
}

TEST(ValuesAtDenominator, Examples) {
  const Evaluator ev;
  const auto m0 = ev.values_at_denominator(0);
  ASSERT_EQ(m0.size(), 2u);
  EXPECT_EQ(m0[0].value, ExactRational(0));
  EXPECT_EQ(m0[1].value, ExactRational(1));

  const auto m3 = ev.values_at_denominator(3);
  ASSERT_EQ(m3.size(), 9u);
  const char* expected[] = {"0",       "1/288", "5/72",   "73/288", "1/2",
                            "215/288", "67/72", "287/288", "1"};
  for (std::size_t j = 0; j < 9; ++j) {
    EXPECT_EQ(m3[j].value, Q(expected[j])) << j;
    EXPECT_EQ(m3[j].argument, D(j, 3));
  }

  const auto m5 = ev.values_at_denominator(5);
  ASSERT_EQ(m5.size(), 33u);
  EXPECT_EQ(m5[31].value, Q("33177581/33177600"));
  EXPECT_EQ(m5[19].value, Q("22784381/33177600"));
}

TEST(Properties, ReflectionAndMonotonicity) {
  const Evaluator ev;
  for (std::uint64_t m = 0; m <= 9; ++m) {
    const auto values = ev.values_at_denominator(m);
    for (std::size_t j = 0; j < values.size(); ++j) {
      EXPECT_EQ(values[j].value + values[values.size() - 1 - j].value,
                ExactRational(1));
      if (j > 0) EXPECT_LT(values[j - 1].value, values[j].value);
    }
  }
}

TEST(Properties, RandomDeepDyadics) {
  const Evaluator ev;
  const Evaluator plain({.reflect_upper_half = false, .cache_capacity = 0});
  std::mt19937_64 rng(21);
  for (int i = 0; i < 100; ++i) {
    const std::uint64_t m = 1 + rng() % 24;
    const unsigned long k = static_cast<unsigned long>(rng() % ((1ULL << m) + 1));
    const DyadicRational d = D(k, m);
    const ExactRational v = ev.eval_unit(d);
    EXPECT_GE(v, ExactRational(0));
    EXPECT_LE(v, ExactRational(1));
    EXPECT_EQ(v + ev.eval_unit(DyadicRational::integer(1) - d),
              ExactRational(1));
    EXPECT_EQ(plain.eval_unit(d), plain.eval_reflected(d)) << d.to_string();
  }
}

TEST(Properties, IdentityConsistency) {
  const Evaluator ev;
  for (int n = 1; n <= 4; ++n) {
    const auto lvl = ev.level(n);
    for (unsigned long j = 0; j <= 8; ++j) {
      const DyadicRational x = D(j, 3);
      const std::uint64_t e = 2 * n - 1;
      const DyadicRational one = DyadicRational::integer(1);
      const DyadicRational up((one + x).numerator(), (one + x).exponent() + e);
      const DyadicRational down((one - x).numerator(),
                                (one - x).exponent() + e);
      EXPECT_EQ((ev.eval_unit(up) + ev.eval_unit(down))
                    .scaled_pow2(lvl->sum.sigma),
                eval_sum(lvl->sum, x.to_rational()));
      const DyadicRational up2(up.numerator(), up.exponent() + 1);
      const DyadicRational down2(down.numerator(), down.exponent() + 1);
      EXPECT_EQ((ev.eval_unit(up2) - ev.eval_unit(down2))
                    .scaled_pow2(lvl->diff.sigma),
                eval_diff(lvl->diff, x.to_rational()));
    }
  }
}

TEST(Cache, BoundedAndTransparent) {
  const Evaluator bounded({.cache_capacity = 5});
  const Evaluator uncached({.cache_capacity = 0});
  for (unsigned long j = 0; j <= 32; ++j) {
    EXPECT_EQ(bounded.eval_unit(D(j, 5)), uncached.eval_unit(D(j, 5)));
  }
  EXPECT_LE(bounded.cache_size(), 5u);
  EXPECT_EQ(uncached.cache_size(), 0u);

  const Evaluator cached;
  cached.eval_unit(D(5, 4));
  const std::size_t hits = cached.cache_hits();
  cached.eval_unit(D(5, 4));
  EXPECT_EQ(cached.cache_hits(), hits + 1);
}

TEST(Cache, StartsFromEmptyTableAndGrows) {
  const Evaluator ev;
  EXPECT_EQ(ev.table_snapshot().max_n(), 0);
  ev.eval_unit(D(1, 9));
  EXPECT_GE(ev.table_snapshot().max_n(), 5);
}

TEST(Concurrency, SharedEvaluatorAgrees) {
  const Evaluator shared;
  const Evaluator reference({.cache_capacity = 0});
  constexpr std::uint64_t kExp = 9;
  std::vector<std::vector<ExactRational>> results(4);
  std::vector<std::thread> threads;
  for (std::size_t t = 0; t < results.size(); ++t) {
    threads.emplace_back([&, t] {
      for (unsigned long j = 0; j <= (1UL << kExp); ++j) {
        results[t].push_back(shared.eval_unit(D(j, kExp)));
      }
    });
  }
  for (auto& th : threads) th.join();
  for (unsigned long j = 0; j <= (1UL << kExp); ++j) {
    const ExactRational expected = reference.eval_unit(D(j, kExp));
    for (const auto& r : results) ASSERT_EQ(r[j], expected) << j;
  }
}

}  // namespace
}  // namespace fabius
