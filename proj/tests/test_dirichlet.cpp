#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <thread>

#include <unistd.h>

#include "murmur/dirichlet.hpp"
#include "murmur/oracles.hpp"

using namespace murmur;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("murmur_test_" + name + "_" + std::to_string(::getpid()));
}

}  // namespace

TEST(PsiD, Examples) {
    EXPECT_EQ(psi_D_eval(CharacterPsiD(5), 2), -1);
    EXPECT_EQ(psi_D_eval(CharacterPsiD(45), 3), 1);
    EXPECT_EQ(psi_D_eval(CharacterPsiD(5), 5), 0);
    EXPECT_THROW(psi_D_eval(CharacterPsiD(5), 0), DomainError);
}

TEST(PsiD, FundamentalCaseIsKronecker) {
    for (i64 d : {-23, -4, 5, 8, 12, 13, 21}) {
        for (i64 n = 1; n <= 100; ++n) EXPECT_EQ(psi_D_eval(CharacterPsiD(d), n), kronecker(d, n));
    }
}

TEST(PsiD, MultiplicativeAwayFromEll) {
    for (i64 D = -200; D <= 200; ++D) {
        if (D == 0 || !is_discriminant(D)) continue;
        const CharacterPsiD chi(D);
        for (i64 a = 1; a <= 50; ++a) {
            if (std::gcd(a, chi.dec.ell) != 1) continue;
            for (i64 b = 1; b <= 50; ++b) {
                if (std::gcd(b, chi.dec.ell) != 1 || std::gcd(a, b) != 1) continue;
                ASSERT_EQ(psi_D_eval(chi, a * b), psi_D_eval(chi, a) * psi_D_eval(chi, b)) << D << " " << a << " " << b;
            }
        }
    }
}

TEST(LFundamental, ClassNumberValues) {
    EXPECT_NEAR(l_one_fundamental(-4, 1e-9), std::numbers::pi / 4.0, 1e-9);
    EXPECT_NEAR(l_one_fundamental(5, 1e-9), 0.4304089, 1e-7);
    EXPECT_NEAR(l_one_fundamental(8, 1e-9), 0.6232252, 1e-7);
    EXPECT_NEAR(l_one_fundamental(-3, 1e-9), 0.6045998, 1e-7);
    for (i64 d : {5, 8, 12, 13, -3, -4, -7, -8}) {
        const double ref = oracle::l_one_class_number(d);
        EXPECT_NEAR(l_one_fundamental(d, 1e-8), ref, 1e-6 * ref) << d;
    }
}

TEST(LFundamental, RejectsOneAndNonFundamental) {
    EXPECT_THROW(l_one_fundamental(1), DomainError);
    EXPECT_THROW(l_one_fundamental(45), DomainError);
    EXPECT_THROW(l_one_fundamental(-16), DomainError);
}

TEST(LFundamental, MeetsRequestedAccuracyAgainstDirectSeries) {
    for (i64 d : {-23, 21, -104, 229, -1003, 1997}) {
        const double ref = oracle::l_one_direct(d, 2000000);
        EXPECT_NEAR(l_one_fundamental(d, 1e-6), ref, 1e-4) << d;
    }
}

TEST(LGeneral, Examples) {
    LValueCache cache(1e-9);
    EXPECT_DOUBLE_EQ(l_one_general(5, cache), l_one_fundamental(5, 1e-9));
    EXPECT_NEAR(l_one_general(45, cache), 5.0 / 3.0 * l_one_fundamental(5, 1e-9), 1e-12);
    EXPECT_NEAR(l_one_general(45, cache), 0.7173482, 1e-7);
    EXPECT_NEAR(l_one_general(-16, cache), 1.5 * std::numbers::pi / 4.0, 1e-9);
    EXPECT_THROW(l_one_general(49, cache), DomainError);
    EXPECT_THROW(l_one_general(16, cache), DomainError);
}

TEST(LGeneral, MatchesDirectAveragedSeries) {
    LValueCache cache(1e-9);
    for (i64 D : {45, -16, 40, 72, -63, 180}) {
        const double ref = oracle::l_one_direct(D, 1000000);
        EXPECT_NEAR(l_one_general(D, cache), ref, 1e-3 * ref) << D;
    }
}

TEST(Cache, WarmAndColdAreBitIdentical) {
    LValueCache cold(1e-6), warm(1e-6);
    for (i64 D = 5; D < 400; D += 4) {
        if (is_perfect_square(D)) continue;
        warm.get(decompose_discriminant(D).d);
    }
    for (i64 D = 5; D < 400; D += 4) {
        if (is_perfect_square(D)) continue;
        EXPECT_EQ(l_one_general(D, cold), l_one_general(D, warm)) << D;
    }
    EXPECT_GT(warm.hits(), 0u);
}

TEST(Cache, ConcurrentRequestsComputeOnce) {
    LValueCache cache(1e-6);
    std::vector<std::jthread> threads;
    std::vector<double> values(8);
    for (int i = 0; i < 8; ++i) {
        threads.emplace_back([&, i] { values[static_cast<std::size_t>(i)] = cache.get(-1000003); });
    }
    threads.clear();
    for (double v : values) EXPECT_EQ(v, values[0]);
    EXPECT_EQ(cache.misses(), 1u);
    EXPECT_EQ(cache.size(), 1u);
}

TEST(Cache, SaveLoadRoundTrip) {
    const auto path = temp_file("cache_roundtrip");
    LValueCache a(1e-6);
    for (i64 d : {-3, -4, 5, 8, -23, 1997}) a.get(d);
    a.save(path);
    LValueCache b(1e-6);
    EXPECT_EQ(b.load(path), 6u);
    EXPECT_EQ(a.snapshot(), b.snapshot());

    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, LValueCache::kHeader);
    std::filesystem::remove(path);
}

TEST(Cache, ForeignPrecisionRowsAreKeptButNotUsed) {
    const auto path = temp_file("cache_foreign");
    {
        LValueCache a(1e-4);
        a.get(5);
        a.save(path);
    }
    LValueCache b(1e-6);
    EXPECT_EQ(b.load(path), 0u);
    b.get(8);
    b.save(path);
    LValueCache c(1e-4);
    EXPECT_EQ(c.load(path), 1u);
    EXPECT_TRUE(c.find(5).has_value());
    EXPECT_FALSE(c.find(8).has_value());
    std::filesystem::remove(path);
}

TEST(Cache, MalformedFilesReportTheLine) {
    const auto path = temp_file("cache_bad");
    {
        std::ofstream out(path);
        out << LValueCache::kHeader << "\n5,0.43,1e-06\nnot a row\n";
    }
    LValueCache c(1e-6);
    try {
        c.load(path);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.index(), 3u);
    }
    {
        std::ofstream out(path);
        out << "wrong header\n";
    }
    EXPECT_THROW(c.load(path), ParseError);
    {
        std::ofstream out(path);
        out << LValueCache::kHeader << "\n45,0.7,1e-06\n";
    }
    EXPECT_THROW(c.load(path), ParseError);
    std::filesystem::remove(path);
}

TEST(PsiBar, Examples) {
    for (i64 t = -5; t <= 5; ++t) EXPECT_EQ(psi_bar_t(t, 1), 1.0);
    EXPECT_DOUBLE_EQ(psi_bar_t(0, 2), 0.5);
}

TEST(PsiBar, TwoSignFormsAgreeExactly) {
    for (i64 t = 0; t <= 10; ++t) {
        for (i64 m = 1; m <= 20; ++m) {
            ASSERT_EQ(psi_bar_t_numerator(t, m, +1), psi_bar_t_numerator(t, m, -1)) << t << " " << m;
        }
    }
}

TEST(PsiBar, ClosedFormMatchesEnumeration) {
    for (i64 t = -12; t <= 12; ++t) {
        for (i64 m = 1; m <= 64; ++m) ASSERT_NEAR(psi_bar_fast(t, m), psi_bar_t(t, m), 1e-13) << t << " " << m;
    }
    for (i64 t : {0, 1, 2, 3, 6}) {
        for (i64 m : {125, 243, 343, 128}) EXPECT_NEAR(psi_bar_fast(t, m), psi_bar_t(t, m), 1e-13) << t << " " << m;
    }
}

TEST(LAvg, Examples) {
    EXPECT_DOUBLE_EQ(l_one_avg(0, 1), 1.0);
    EXPECT_DOUBLE_EQ(l_one_avg(0, 2), 1.25);
}

TEST(LAvg, TruncationsStabilise) {
    for (i64 t = 1; t <= 10; ++t) EXPECT_LT(std::abs(l_one_avg(t, 4000) - l_one_avg(t, 8000)), 5e-3) << t;
}

TEST(LAvg, CesaroSeriesApproachesEulerProduct) {
    const auto primes = sieve_primes(1000000);
    for (i64 t : {1, 3, 5, 7}) {
        EXPECT_NEAR(l_one_avg(t, 400000), l_one_avg_euler(t, primes), 2e-3) << t;
    }
}
