#include <gtest/gtest.h>

#include <cmath>

#include <divilab/arith.hpp>
#include <divilab/multiples.hpp>
#include <divilab/rng.hpp>
#include <divilab/sieve.hpp>

#include "support.hpp"

using namespace divilab;

namespace {

GeneratorSet G(std::vector<std::uint64_t> v) { return GeneratorSet::of(std::move(v)); }

/// d M(A) by counting one period lcm(A).
Rational density_by_period(const std::vector<std::uint64_t>& A) {
    std::uint64_t L = 1;
    for (std::uint64_t a : A) L = std::lcm(L, a);
    return Rational(oracle::count_multiples(A, L), L);
}

}  // namespace

TEST(GeneratorSet, Construction) {
    EXPECT_EQ(GeneratorSet::interval(4, 8).elements(), (std::vector<std::uint64_t>{5, 6, 7, 8}));
    EXPECT_EQ(GeneratorSet::closed(4, 8).elements(), (std::vector<std::uint64_t>{4, 5, 6, 7, 8}));
    EXPECT_TRUE(GeneratorSet::interval(4, 4).empty());
    EXPECT_EQ(G({6, 2, 2, 3}).elements(), (std::vector<std::uint64_t>{2, 3, 6}));
    EXPECT_EQ(G({2, 3, 6, 9, 35}).primitive().elements(), (std::vector<std::uint64_t>{2, 3, 35}));
    EXPECT_FALSE(G({2, 4}).is_primitive());
    EXPECT_THROW((void)G({0, 3}), DomainError);
    EXPECT_THROW((void)GeneratorSet::interval(5, 4), DomainError);
}

TEST(MultiplesCount, Examples) {
    EXPECT_EQ(multiples_count(G({2, 3}), 12), 8u);
    EXPECT_EQ(multiples_count(G({2}), 100), 50u);
    const auto A = GeneratorSet::interval(4, 8);
    EXPECT_EQ(multiples_count(A, 35), oracle::count_multiples(A.elements(), 35));
    EXPECT_EQ(multiples_count(A, 35), 18u);
    EXPECT_EQ(multiples_count(GeneratorSet{}, 1000), 0u);
    EXPECT_THROW((void)multiples_count(A, 100, 1, 10), ResourceError);
}

TEST(MultiplesCount, PrimitiveReductionAndThreads) {
    CounterRng rng(11);
    for (int trial = 0; trial < 40; ++trial) {
        const auto A = G(gen::subset(rng, 2, 400, 12));
        const std::uint64_t x = 1 + rng.below(1'000'000);
        const auto c = multiples_count(A, x, 1);
        ASSERT_EQ(c, multiples_count(A.primitive(), x, 1));
        ASSERT_EQ(c, multiples_count(A, x, 4));
        if (x < 20'000) {
            ASSERT_EQ(c, oracle::count_multiples(A.elements(), x));
        }
    }
}

TEST(DensityBracket, ExactExamples) {
    EXPECT_EQ(*density_bracket(G({2, 3})).exact, Rational(2, 3));
    EXPECT_EQ(*density_bracket(GeneratorSet::interval(2, 4)).exact, Rational(1, 2));
    const auto e = density_bracket(GeneratorSet::interval(4, 8));
    EXPECT_EQ(*e.exact, Rational(17, 35));
    EXPECT_EQ(e.lower, e.upper);
    EXPECT_EQ(e.method.tag(), EstimateTag::exact);
    EXPECT_EQ(*density_bracket(GeneratorSet{}).exact, Rational(0));
    EXPECT_EQ(*density_bracket(G({1, 5})).exact, Rational(1));
}

TEST(DensityBracket, RandomSetsAgainstPeriodCount) {
    CounterRng rng(5);
    for (int trial = 0; trial < 60; ++trial) {
        const auto v = gen::subset(rng, 2, 30, 6);
        ASSERT_EQ(*density_bracket(G(v)).exact, density_by_period(v));
    }
}

TEST(DensityBracket, DyadicIntervalMatchesSieve) {
    const auto e = density_bracket(GeneratorSet::interval(12, 24));
    ASSERT_TRUE(e.is_exact());
    EXPECT_NEAR(e.point, sieve_density(GeneratorSet::interval(12, 24), 10'000'000).point, 1e-4);
}

TEST(DensityBracket, FallbackIsFlaggedBracket) {
    DensityOptions opt;
    opt.limits.max_generators = 3;
    const auto e = density_bracket(GeneratorSet::interval(4, 8), opt);
    EXPECT_TRUE(e.fallback);
    EXPECT_FALSE(e.is_exact());
    EXPECT_EQ(e.method.kind, MethodKind::bonferroni);
    EXPECT_TRUE(e.contains(17.0 / 35.0));
    // lcm overflow forces the fallback too
    const auto big = G({(1ULL << 61) - 1, (1ULL << 61) - 3, (1ULL << 62) - 57, (1ULL << 62) - 87});
    const auto b = density_bracket(big);
    EXPECT_TRUE(b.fallback);
    EXPECT_LE(b.lower, b.upper);
}

TEST(Bonferroni, BracketsContainExactValue) {
    CounterRng rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
        const auto A = G(gen::subset(rng, 2, 60, 10)).primitive();
        const Rational exact = *density_bracket(A).exact;
        const double v = to_double(exact);
        for (std::size_t depth = 1; depth <= A.size(); ++depth) {
            const auto b = bonferroni_bracket(A, depth);
            ASSERT_TRUE(b.contains(v, 1e-12)) << "trial " << trial << " depth " << depth;
        }
        const auto full = bonferroni_bracket(A, A.size());
        ASSERT_NEAR(full.lower, v, 1e-12);
        ASSERT_NEAR(full.upper, v, 1e-12);
    }
}

TEST(Bonferroni, DepthParity) {
    const auto A = G({2, 3, 5});
    const auto d1 = bonferroni_bracket(A, 1);  // 31/30, clamped to 1
    EXPECT_DOUBLE_EQ(d1.upper, 1.0);
    EXPECT_DOUBLE_EQ(d1.lower, 0.0);
    const auto d2 = bonferroni_bracket(A, 2);  // 31/30 - 1/3
    EXPECT_NEAR(d2.lower, 0.7, 1e-12);
    EXPECT_DOUBLE_EQ(d2.upper, 1.0);
    const auto d3 = bonferroni_bracket(A, 3);
    EXPECT_NEAR(d3.lower, 11.0 / 15, 1e-12);
    EXPECT_NEAR(d3.upper, 11.0 / 15, 1e-12);
    EXPECT_THROW((void)bonferroni_bracket(A, 0), DomainError);
}

TEST(ExactlyOne, Values) {
    EXPECT_EQ(*exactly_one_density(GeneratorSet::interval(3, 4)), Rational(1, 4));
    EXPECT_EQ(*exactly_one_density(GeneratorSet::interval(2, 4)), Rational(5, 12));
    CounterRng rng(3);
    for (int trial = 0; trial < 30; ++trial) {
        const auto v = gen::subset(rng, 2, 24, 6);
        std::uint64_t L = 1;
        for (std::uint64_t a : v) L = std::lcm(L, a);
        std::uint64_t one = 0;
        for (std::uint64_t n = 1; n <= L; ++n)
            one += std::count_if(v.begin(), v.end(), [n](std::uint64_t a) { return n % a == 0; }) == 1;
        ASSERT_EQ(*exactly_one_density(G(v)), Rational(one, L));
    }
}

TEST(SieveDensity, ConvergesToExact) {
    CounterRng rng(77);
    for (int trial = 0; trial < 10; ++trial) {
        const auto A = G(gen::subset(rng, 2, 40, 6));
        const double exact = density_bracket(A).point;
        const std::uint64_t x = 10'000'000;
        ASSERT_NEAR(sieve_density(A, x).point, exact, 2 / std::sqrt(static_cast<double>(x)) + 40.0 / x);
    }
    EXPECT_EQ(sieve_density(G({2}), 1000).method.tag(), EstimateTag::empirical);
}

TEST(LogDensity, Examples) {
    EXPECT_NEAR(log_density(G({2}), 1'000'000).point, 0.5, 0.01);
    EXPECT_EQ(log_density(GeneratorSet{}, 1000).point, 0.0);
    EXPECT_EQ(log_density(G({2}), 1000).method.tag(), EstimateTag::empirical);
    // sum_{n in M, n <= x} 1/n = d log x + c + o(1): the scaled error settles
    const auto A = GeneratorSet::interval(4, 8);
    const double d = 17.0 / 35;
    const double c6 = (log_density(A, 1'000'000).point - d) * std::log(1e6);
    const double c7 = (log_density(A, 10'000'000).point - d) * std::log(1e7);
    EXPECT_NEAR(c6, c7, 5e-3);
    EXPECT_NEAR(log_density(A, 10'000'000).point, d, -c7 / std::log(1e7) + 1e-3);
    EXPECT_THROW((void)log_density(A, 1), DomainError);
}

TEST(SequentialDensity, ExamplesAndMonotone) {
    const std::uint64_t grid[] = {2, 3, 5};
    const auto s = sequential_density(G({2, 3, 5}), grid);
    EXPECT_EQ(*s[0].exact, Rational(1, 2));
    EXPECT_EQ(*s[1].exact, Rational(2, 3));
    EXPECT_EQ(*s[2].exact, Rational(11, 15));
    const std::uint64_t t6[] = {6};
    EXPECT_EQ(*sequential_density(GeneratorSet::interval(4, 8), t6)[0].exact, Rational(1, 3));
    CounterRng rng(8);
    const auto A = G(gen::subset(rng, 2, 200, 14));
    std::vector<std::uint64_t> g;
    for (std::uint64_t T = 0; T <= 200; T += 10) g.push_back(T);
    const auto seq = sequential_density(A, g);
    for (std::size_t i = 1; i < seq.size(); ++i) {
        ASSERT_LE(seq[i - 1].point, seq[i].point + 1e-15);
        ASSERT_LE(seq[i].upper, 1.0);
    }
}

TEST(D1, Examples) {
    const SpfSieve s(1000);
    EXPECT_EQ(d1(divisors(factor(12, s)), G({4, 6})), ExtNat(4));
    EXPECT_TRUE(d1(divisors(factor(5, s)), G({4, 6})).is_infinite());
    EXPECT_EQ(d1(divisors(factor(36, s)), GeneratorSet::interval(4, 8)), ExtNat(6));
}

TEST(Criterion4, Examples) {
    // d_1(n) = 2 for even n, and n^{1/2} < 2 only at n = 2
    EXPECT_DOUBLE_EQ(criterion4_scan(G({2}), 0.5, 100'000), 1.0 / 100'000);
    EXPECT_EQ(criterion4_scan(GeneratorSet{}, 0.5, 1000), 0.0);
    const SpfSieve s(20'000);
    SpectrumBuilder sb(s);
    const auto A = GeneratorSet::interval(4, 8);
    std::uint64_t hits = 0;
    for (std::uint64_t n = 1; n <= 20'000; ++n) {
        const ExtNat d = d1(sb.build(n), A);
        if (!d.is_infinite() && std::pow(double(n), 0.75) < double(d.value())) ++hits;
    }
    EXPECT_DOUBLE_EQ(criterion4_scan(A, 0.25, 20'000), hits / 20'000.0);
    EXPECT_THROW((void)criterion4_scan(G({2}), 0.0, 10), DomainError);
}

TEST(Behrend, Examples) {
    const auto eq = behrend_ineq_check(G({2}), G({3}));
    EXPECT_TRUE(eq.ok);
    EXPECT_TRUE(eq.equality);
    EXPECT_TRUE(eq.exact);
    const auto r = behrend_ineq_check(G({4}), G({6}));
    EXPECT_TRUE(r.ok);
    EXPECT_FALSE(r.equality);
    EXPECT_NEAR(r.lhs, 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(r.rhs, 5.0 / 8.0, 1e-15);
    const auto same = behrend_ineq_check(G({2}), G({2}));
    EXPECT_TRUE(same.ok);  // 1/2 >= 1/4
}

TEST(Behrend, RandomPairsHold) {
    CounterRng rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        const auto A = G(gen::subset(rng, 2, 50, 8)), B = G(gen::subset(rng, 2, 50, 8));
        const auto r = behrend_ineq_check(A, B);
        ASSERT_TRUE(r.exact);
        ASSERT_TRUE(r.ok) << trial;
    }
}

TEST(Blocks, Families) {
    const auto a = block_builder(BlockFamily::a_lambda, {1.0}, 3);
    ASSERT_EQ(a.blocks.size(), 3u);
    for (std::size_t j = 0; j < 3; ++j) {
        EXPECT_NEAR(a.blocks[j].T, std::exp(static_cast<double>(j + 1)), 1e-12);
        EXPECT_EQ(a.blocks[j].H, 2.0);
    }
    EXPECT_EQ(a.integers().elements(), (std::vector<std::uint64_t>{3, 4, 5, 8, 9, 10, 11, 12, 13, 14, 21, 22, 23,
                                                                   24, 25, 26, 27, 28, 29, 30, 31, 32, 33, 34, 35, 36,
                                                                   37, 38, 39, 40}));
    const auto t3 = block_builder(BlockFamily::theorem3, {0, 0, 0, 0.5}, 10);
    ASSERT_EQ(t3.blocks.size(), 10u);
    for (std::size_t j = 0; j < 10; ++j)
        EXPECT_NEAR(std::log(t3.blocks[j].H), 1.0 / std::sqrt(static_cast<double>(j + 1)), 1e-12);
    const auto bes = block_builder(BlockFamily::besicovitch, {2.0}, 5);
    for (std::size_t j = 0; j + 1 < bes.blocks.size(); ++j)
        EXPECT_LE(bes.blocks[j].H, bes.blocks[j + 1].T / bes.blocks[j].T);
}

TEST(Blocks, ValidatorNamesFirstFailingBlock) {
    try {
        validate_blocks({{10, 2}, {30, 1.0001}, {100, 2}}, 0.1);
        FAIL() << "expected ConstraintError";
    } catch (const ConstraintError& e) {
        EXPECT_EQ(e.index(), 2u);
    }
    EXPECT_THROW(validate_blocks({{10, 20}}, 0.1), ConstraintError);        // H > T
    EXPECT_THROW(validate_blocks({{10, 5}, {20, 2}}, 0.1), ConstraintError);  // H_1 > T_2/T_1
    EXPECT_THROW(validate_blocks({{10, 2}}, 1.5), DomainError);
    EXPECT_THROW((void)block_builder(BlockFamily::a_lambda, {}, 3), DomainError);
}

TEST(Alpha0, Values) {
    EXPECT_NEAR(alpha0(0), std::log(2.0), 1e-15);
    EXPECT_NEAR(alpha0(kSigma0), 0.0, 1e-15);
    EXPECT_NEAR(alpha0(3), kSigma0 - 3, 1e-15);
    EXPECT_NEAR(alpha0(3), -0.741109, 1e-6);
    EXPECT_NEAR(alpha0(kSigma0 - 1e-13), alpha0(kSigma0 + 1e-13), 1e-12);
    EXPECT_THROW((void)alpha0(-1), DomainError);
}

TEST(BlockDeltaSeries, PartialSums) {
    const auto seq = block_builder(BlockFamily::besicovitch, {2.0}, 4);
    const auto s = block_delta_series(seq, 1.0);
    ASSERT_EQ(s.size(), 4u);
    // log 2 / log 2^(2^(j-1)) = 2^-(j-1)
    EXPECT_NEAR(s[3], 1 + 0.5 + 0.25 + 0.125, 1e-12);
}

TEST(MOfY, Values) {
    const auto all = m_of_y(G({2, 3, 4, 5}), 5);
    // every 5-friable r > 1 is a multiple: m = 1 - prod_{p <= 5}(1 - 1/p)
    EXPECT_NEAR(all.lower, 11.0 / 15.0, 1e-9);
    EXPECT_NEAR(all.upper, 11.0 / 15.0, 1e-9);
    const auto with_one = m_of_y(G({1, 2}), 5);
    EXPECT_NEAR(with_one.point, 1.0, 1e-9);
    EXPECT_NEAR(m_of_y(G({2}), 3).point, 0.5, 1e-9);
    EXPECT_EQ(m_of_y(GeneratorSet{}, 7).upper, 0.0);
    EXPECT_THROW((void)m_of_y(G({2}), 1), DomainError);
    const auto coarse = m_of_y(G({2}), 3, 100);
    EXPECT_TRUE(coarse.contains(0.5));
    EXPECT_GT(coarse.upper - coarse.lower, 1e-3);
}

TEST(MOfY, LowerBoundsObservedDensity) {
    CounterRng rng(4);
    for (int trial = 0; trial < 10; ++trial) {
        const auto A = G(gen::subset(rng, 2, 60, 6));
        const auto m = m_of_y(A, 7, 1'000'000'000ULL);
        const double d = sieve_density(A, 1'000'000).point;
        ASSERT_LE(m.lower, d + (m.upper - m.lower) + 1e-3) << trial;
    }
}

TEST(ESet, Membership) {
    const SpfSieve s(100'000);
    auto sp = [&](std::uint64_t n) { return divisors(factor(n, s)); };
    EXPECT_FALSE(is_in_E(sp(2)));
    EXPECT_TRUE(is_in_E(sp(6)));
    EXPECT_TRUE(is_in_E(sp(12)));
    const auto E = e_set_members(20'000);
    SpectrumBuilder sb(s);
    for (std::uint64_t n = 1; n <= 20'000; ++n) {
        const auto& d = sb.build(n);
        ASSERT_EQ(is_in_E(d), E.contains(n)) << n;
        ASSERT_EQ(in_ME(d), in_ME_literal(d)) << n;
    }
    for (std::uint64_t n = 1; n <= 5; ++n) EXPECT_FALSE(in_ME(sp(n)));
}

TEST(Remainder, Values) {
    const auto r1 = remainder_Rn(1, 1000);
    EXPECT_EQ(*r1.eps.exact, Rational(1));
    EXPECT_EQ(r1.remainder, 0.0);
    RemainderOptions opt;
    opt.x_ref = 1'000'000;
    const auto r10 = remainder_Rn(10, 1'000'000, opt);
    EXPECT_TRUE(r10.eps.is_exact());
    EXPECT_EQ(r10.count, multiples_count(GeneratorSet::closed(10, 20), 1'000'000));
    EXPECT_LT(std::abs(r10.remainder), 1000.0);
    const auto r30 = remainder_Rn(30, 100'000, opt);
    EXPECT_FALSE(r30.eps.is_exact());
    EXPECT_GE(r30.band, 0.0);
}

TEST(MaxGap, Values) {
    EXPECT_EQ(max_gap(1, 100).gap, 2u);
    // M({3, 4}) up to 50: brute force
    std::uint64_t prev = 0, best = 0;
    for (std::uint64_t v = 1; v <= 50; ++v) {
        if (v % 3 && v % 4) continue;
        if (prev) best = std::max(best, v - prev);
        prev = v;
    }
    EXPECT_EQ(max_gap(2, 50).gap, best);
    const auto g = max_gap(10, 1'000'000);
    EXPECT_GT(g.gap, 0u);
    EXPECT_THROW((void)max_gap(10, 11), DomainError);
}
