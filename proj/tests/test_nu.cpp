#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "murmur/nu.hpp"
#include "murmur/oracles.hpp"

using namespace murmur;

namespace {
const double kSixOverPi2 = 6.0 / (std::numbers::pi * std::numbers::pi);
}

TEST(Nu, NarrowWindowAroundOne) {
    const double v = nu(IntervalE(0.99, 1.01), 1e-7);
    EXPECT_NEAR(v / kSixOverPi2, 1.0, 1e-4);
}

TEST(Nu, BruteForceDiffersByTheQTail) {
    // pairs with q > Q have density (|E|/2) mu^2/(phi sigma) per q, summing to about (|E|/2) C/Q
    const i64 Q = 1000;
    for (const IntervalE E : {IntervalE(0.99, 1.01), IntervalE(0.2, 0.7), IntervalE(0.0, 2.0)}) {
        const double tail = kSixOverPi2 * 0.5 * E.length() * kCarefreeConstant / static_cast<double>(Q);
        const double gap = nu(E, 1e-8) - oracle::nu_brute(E, Q, 100000);
        EXPECT_NEAR(gap, tail, 0.05 * tail + 1e-7) << E.lo << " " << E.hi;
    }
}

TEST(Nu, CarefreeConstantMatchesEulerProduct) {
    const auto primes = sieve_primes(2000000);
    double prod = 1.0;
    for (i64 p : primes.primes) prod *= 1.0 - 1.0 / (static_cast<double>(p) * static_cast<double>(p + 1));
    EXPECT_NEAR(prod, kCarefreeConstant, 1e-6);
}

TEST(Nu, HalfWeightAtEndpoint) {
    EXPECT_NEAR(nu(IntervalE(1.0, 1.01), 1e-7) / (0.5 * kSixOverPi2), 1.0, 1e-4);
}

TEST(Nu, TinyIntervalNearZero) {
    const double v = nu(IntervalE(0.0, 1e-8), 1e-6);
    EXPECT_GE(v, 0.0);
    EXPECT_LT(v, 1e-8);
}

TEST(Nu, Additivity) {
    const double tol = 1e-7;
    const double pts[] = {0.5, 1.0, 1.5, 2.0};
    for (double a : pts) {
        for (double b : pts) {
            if (!(a < b)) continue;
            const double sum = nu(IntervalE(0.0, a), tol) + nu(IntervalE(a, b), tol);
            EXPECT_NEAR(sum, nu(IntervalE(0.0, b), tol), 4 * tol) << a << " " << b;
        }
    }
}

TEST(Nu, EndpointHalving) {
    const double tol = 1e-7;
    // q^2/a^2 = 1/4 from (q, a) = (1, 2) only, with weight (a/q)^{-3} = 1/8
    const double boundary = kSixOverPi2 / 8.0;
    const double just_below = nu(IntervalE(0.0, 0.25 - 1e-10), tol);
    EXPECT_NEAR(just_below + 0.5 * boundary, nu(IntervalE(0.0, 0.25), tol), 4 * tol);
}

TEST(Nu, Monotone) {
    double prev = 0.0;
    for (int k = 1; k <= 10; ++k) {
        const double v = nu(IntervalE(0.0, 0.2 * k), 1e-6);
        EXPECT_GE(v, prev);
        prev = v;
    }
}

TEST(Nu, ToleranceConsistency) {
    const IntervalE E(0.0, 2.0);
    EXPECT_NEAR(nu(E, 1e-6), nu(E, 1e-8), 2e-6);
    EXPECT_THROW(nu(E, 0.0), DomainError);
    EXPECT_THROW(nu(E, -1.0), DomainError);
}

TEST(Nu, PartialSumsMatchBruteForce) {
    const IntervalE E(0.3, 1.7);
    EXPECT_NEAR(nu_partial(E, 200, 5000), oracle::nu_brute(E, 200, 5000), 1e-12);
}

TEST(Interval, Validation) {
    EXPECT_THROW(IntervalE(-0.1, 1.0), DomainError);
    EXPECT_THROW(IntervalE(1.0, 1.0), DomainError);
    EXPECT_THROW(IntervalE(0.0, INFINITY), DomainError);
}
