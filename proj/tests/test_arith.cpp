#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "murmur/arith.hpp"
#include "murmur/errors.hpp"
#include "murmur/oracles.hpp"

using namespace murmur;

TEST(Sieve, SmallTables) {
    EXPECT_EQ(sieve_primes(10).primes, (std::vector<i64>{2, 3, 5, 7}));
    EXPECT_TRUE(sieve_primes(1).primes.empty());
    EXPECT_TRUE(sieve_primes(0).primes.empty());
}

TEST(Sieve, CountMatchesTrialDivision) {
    for (i64 limit : {100, 1000, 65536, 100003}) {
        const auto table = sieve_primes(limit);
        std::size_t count = 0;
        for (i64 n = 2; n <= limit; ++n) count += oracle::is_prime_trial(n);
        EXPECT_EQ(table.primes.size(), count) << limit;
        EXPECT_EQ(table.limit, limit);
    }
    EXPECT_EQ(sieve_primes(100).primes.size(), 25u);
}

TEST(Sieve, EveryEntryPrimeAndAscending) {
    const auto table = sieve_primes(200000);
    for (std::size_t i = 0; i < table.primes.size(); ++i) {
        if (i) {
            ASSERT_LT(table.primes[i - 1], table.primes[i]);
        }
        if (i) ASSERT_LT(table.primes[i - 1], table.primes[i]);
    }
}

TEST(Sieve, MemoryBudgetIsEnforced) { EXPECT_THROW(sieve_primes(1000000, 1000), ResourceError); }

TEST(Kronecker, SpecExamples) {
    EXPECT_EQ(kronecker(1, 1), 1);
    EXPECT_EQ(kronecker(5, 3), -1);
    EXPECT_EQ(kronecker(12, 2), 0);
    EXPECT_EQ(kronecker(5, 2), -1);
}

TEST(Kronecker, Conventions) {
    EXPECT_EQ(kronecker(1, 0), 1);
    EXPECT_EQ(kronecker(-1, 0), 1);
    EXPECT_EQ(kronecker(2, 0), 0);
    EXPECT_EQ(kronecker(-3, -1), -1);
    EXPECT_EQ(kronecker(3, -1), 1);
}

TEST(Kronecker, MatchesEulerCriterionAtOddPrimes) {
    for (i64 p = 3; p <= 200; ++p) {
        if (!oracle::is_prime_trial(p)) continue;
        for (i64 a = -200; a <= 200; ++a) ASSERT_EQ(kronecker(a, p), oracle::legendre_euler(a, p)) << a << " " << p;
    }
}

TEST(Kronecker, MatchesDefinitionEverywhere) {
    for (i64 a = -120; a <= 120; ++a) {
        for (i64 n = -120; n <= 120; ++n) ASSERT_EQ(kronecker(a, n), oracle::kronecker_brute(a, n)) << a << " " << n;
    }
}

TEST(Kronecker, MultiplicativeInDenominator) {
    for (i64 a = -60; a <= 60; ++a) {
        for (i64 m = 1; m <= 60; ++m) {
            for (i64 n = 1; n <= 60; ++n) ASSERT_EQ(kronecker(a, m * n), kronecker(a, m) * kronecker(a, n));
        }
    }
}

TEST(Kronecker, MultiplicativeInNumerator) {
    for (i64 a = -60; a <= 60; ++a) {
        for (i64 b = -60; b <= 60; ++b) {
            for (i64 n = 1; n <= 60; n += 7) ASSERT_EQ(kronecker(a * b, n), kronecker(a, n) * kronecker(b, n));
        }
    }
}

TEST(Multiplicative, SpecExamples) {
    EXPECT_EQ(mobius(6), 1);
    EXPECT_EQ(euler_phi(6), 2);
    EXPECT_EQ(sigma1(6), 12);
    EXPECT_EQ(mobius(1), 1);
    EXPECT_EQ(sigma1(1), 1);
    EXPECT_DOUBLE_EQ(von_mangoldt(8), std::log(2.0));
    EXPECT_EQ(von_mangoldt(6), 0.0);
    EXPECT_EQ(von_mangoldt(1), 0.0);
}

TEST(Multiplicative, ZeroIsADomainError) {
    EXPECT_THROW(mobius(0), DomainError);
    EXPECT_THROW(euler_phi(0), DomainError);
    EXPECT_THROW(sigma1(0), DomainError);
    EXPECT_THROW(von_mangoldt(0), DomainError);
}

TEST(Multiplicative, MatchNaiveLoops) {
    for (i64 n = 1; n <= 3000; ++n) {
        ASSERT_EQ(mobius(n), oracle::mobius_naive(n)) << n;
        ASSERT_EQ(euler_phi(n), oracle::euler_phi_naive(n)) << n;
        ASSERT_EQ(sigma1(n), oracle::sigma1_naive(n)) << n;
    }
}

TEST(Multiplicative, SpfTableAgreesWithTrialFactorization) {
    const SpfTable spf(100000);
    for (i64 n = 1; n <= 100000; n += 37) EXPECT_EQ(spf.factorize(n), factorize(n)) << n;
}

TEST(Multiplicative, VonMangoldtOnPrimePowers) {
    for (i64 p : {2, 3, 5, 7, 11}) {
        i64 q = p;
        for (int k = 1; k <= 5; ++k, q *= p) EXPECT_DOUBLE_EQ(von_mangoldt(q), std::log(static_cast<double>(p)));
    }
    EXPECT_EQ(von_mangoldt(12), 0.0);
}

TEST(LogEta, SpecExamples) {
    EXPECT_EQ(log_eta(1), 0.0);
    EXPECT_NEAR(log_eta(4), std::log(8.0), 1e-14);
    EXPECT_NEAR(log_eta(6), std::log(72.0), 1e-14);
}

TEST(LogEta, DivisorFormulaMatchesLiteralProduct) {
    for (i64 m = 1; m <= 500; ++m) ASSERT_NEAR(log_eta(m), oracle::log_eta_product(m), 1e-10) << m;
}

TEST(Discriminant, SpecExamples) {
    auto check = [](i64 D, i64 d, i64 ell) {
        const auto dec = decompose_discriminant(D);
        EXPECT_EQ(dec.D, D);
        EXPECT_EQ(dec.d, d) << D;
        EXPECT_EQ(dec.ell, ell) << D;
    };
    check(45, 5, 3);
    check(12, 12, 1);
    check(-36, -4, 3);
    check(5, 5, 1);
    check(49, 1, 7);
}

TEST(Discriminant, WrongResidueIsADomainError) {
    EXPECT_THROW(decompose_discriminant(2), DomainError);
    EXPECT_THROW(decompose_discriminant(-5), DomainError);
    EXPECT_THROW(decompose_discriminant(0), DomainError);
}

TEST(Discriminant, MatchesExhaustiveSearch) {
    const SpfTable spf(40000);
    for (i64 D = -40000; D <= 40000; ++D) {
        if (D == 0 || !is_discriminant(D)) continue;
        const auto ref = oracle::decompose_exhaustive(D);
        const auto a = decompose_discriminant(D);
        const auto b = decompose_discriminant(D, spf);
        ASSERT_EQ(a.d, ref.d) << D;
        ASSERT_EQ(a.ell, ref.ell) << D;
        ASSERT_EQ(b.d, ref.d) << D;
        ASSERT_EQ(b.ell, ref.ell) << D;
        ASSERT_EQ(a.d * a.ell * a.ell, D);
    }
}

TEST(Discriminant, FundamentalMatchesDefinition) {
    for (i64 d = -3000; d <= 3000; ++d) {
        if (d == 1) continue;
        ASSERT_EQ(is_fundamental_discriminant(d), oracle::fundamental_brute(d)) << d;
    }
}

TEST(PerfectSquare, Examples) {
    EXPECT_EQ(perfect_square_root(49), std::optional<i64>(7));
    EXPECT_FALSE(is_perfect_square(48));
    EXPECT_EQ(perfect_square_root(0), std::optional<i64>(0));
    EXPECT_FALSE(is_perfect_square(-4));
    const i64 big = 3037000499LL;
    EXPECT_EQ(perfect_square_root(big * big), std::optional<i64>(big));
    EXPECT_FALSE(is_perfect_square(big * big - 1));
}

TEST(CheckedArithmetic, OverflowThrows) {
    EXPECT_THROW(checked_mul(std::numeric_limits<i64>::max() / 2, 3), ResourceError);
    EXPECT_THROW(checked_add(std::numeric_limits<i64>::max(), 1), ResourceError);
    EXPECT_EQ(checked_mul(-4, 25), -100);
}
