#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "murmur/oracles.hpp"
#include "murmur/quadrature.hpp"
#include "murmur/special.hpp"
#include "murmur/testfn.hpp"

using namespace murmur;

namespace {

const TestFunctionSpec kSmall{100.0, 10.0, 2.0, Bump::autocorr};
const TestFunctionSpec kWindow{600.0, 40.0, 8.0, Bump::autocorr};

}  // namespace

TEST(Quadrature, ClosedForms) {
    QuadratureSpec q;
    EXPECT_NEAR(quad([](double u) { return u; }, 0.0, 1.0, q), 0.5, 1e-15);
    q.osc_freq = 50.0;
    EXPECT_NEAR(quad([](double u) { return std::cos(50.0 * u); }, -1.0, 1.0, q), 2.0 * std::sin(50.0) / 50.0, 1e-13);
}

TEST(Quadrature, LogEndpointMatchesRefinedOracle) {
    QuadratureSpec q;
    auto f = [](double u) { return std::log(2.0 * std::sinh(0.5 * u)); };
    const double v = quad_log_endpoint(f, 0.0, 1.0, q);
    // int_0^1 log(2 sinh(u/2)) du = int_0^1 log u du + int_0^1 log(2 sinh(u/2)/u) du
    const double smooth = gl_panels([](double u) { return std::log(2.0 * std::sinh(0.5 * u) / u); }, 1e-300, 1.0, 256, 16);
    EXPECT_NEAR(v, -1.0 + smooth, 1e-9);
}

TEST(Quadrature, NonConvergenceCarriesEstimates) {
    QuadratureSpec q;
    q.max_refinements = 1;
    q.abs_eps = 1e-300;
    q.rel_eps = 0.0;
    try {
        quad([](double u) { return std::sin(1e4 * u); }, 0.0, 1.0, q);
        FAIL() << "expected NumericError";
    } catch (const NumericError& e) {
        EXPECT_NE(e.previous(), e.last());
    }
}

TEST(Quadrature, GaussLegendreIntegratesPolynomialsExactly) {
    for (int n : {8, 16, 24, 32, 12}) {
        const auto& r = gauss_legendre(n);
        double s = 0.0;
        for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * std::pow(r.nodes[i], 2 * n - 2);
        EXPECT_NEAR(s, 2.0 / (2.0 * n - 1.0), 1e-14) << n;
    }
}

TEST(Spec, ValidationNamesTheConstraint) {
    auto msg = [](TestFunctionSpec s) {
        try {
            s.validate();
        } catch (const DomainError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    EXPECT_NE(msg({100, 10, 1.0}).find("h > 1"), std::string::npos);
    EXPECT_NE(msg({100, 10, 12}).find("h < H"), std::string::npos);
    EXPECT_NE(msg({20, 15, 6}).find("R - H > h"), std::string::npos);
    EXPECT_EQ(msg(kSmall), "");
}

TEST(WHat, Basics) {
    for (Bump b : {Bump::autocorr, Bump::exp}) {
        EXPECT_EQ(w_hat(b, 0.0), 1.0);
        EXPECT_EQ(w_hat(b, 1.0), 0.0);
        EXPECT_EQ(w_hat(b, -0.3), w_hat(b, 0.3));
    }
}

TEST(WHat, MonotoneOnUnitInterval) {
    for (Bump b : {Bump::autocorr, Bump::exp}) {
        double prev = 1.0;
        for (int k = 1; k <= 2000; ++k) {
            const double v = w_hat(b, k / 2000.0);
            ASSERT_LE(v, prev) << k;
            prev = v;
        }
    }
}

TEST(WHat, TablesMatchDirectIntegral) {
    for (double t : {0.01, 0.1, 0.25, 0.5, 0.7, 0.9, 0.97}) {
        EXPECT_NEAR(w_hat(Bump::autocorr, t), w_hat_direct(Bump::autocorr, t), 1e-11) << t;
    }
}

TEST(WHat, DerivativeMatchesFiniteDifferences) {
    for (Bump b : {Bump::autocorr, Bump::exp}) {
        for (double t : {-0.8, -0.4, 0.05, 0.3, 0.6, 0.85}) {
            const double fd = oracle::derivative([&](double u) { return w_hat(b, u); }, t, 1e-4);
            EXPECT_NEAR(w_hat_prime(b, t), fd, 1e-7) << bump_name(b) << " " << t;
        }
    }
}

TEST(BigG, Basics) {
    EXPECT_DOUBLE_EQ(big_g(kSmall, 0.0), 2.0 * kSmall.H / std::numbers::pi);
    EXPECT_EQ(big_g(kSmall, 1.0 / kSmall.h), 0.0);
    for (double t : {0.013, 0.11, 0.3, 0.49}) EXPECT_EQ(big_g(kSmall, -t), big_g(kSmall, t));
}

TEST(BigG, ExactlyZeroOutsideSupport) {
    for (const auto& s : {kSmall, kWindow, TestFunctionSpec{3000, 100, 15, Bump::exp}}) {
        for (int k = 0; k <= 100; ++k) {
            const double t = s.support() * (1.0 + k / 10.0);
            ASSERT_EQ(big_g(s, t), 0.0);
            ASSERT_EQ(big_g(s, -t), 0.0);
            ASSERT_EQ(big_g_prime(s, t), 0.0);
        }
    }
}

TEST(BigG, ContinuousThroughZero) {
    EXPECT_NEAR(big_g(kSmall, 1e-9), big_g(kSmall, 0.0), 1e-9);
    EXPECT_NEAR(big_g(kSmall, -1e-7), big_g(kSmall, 0.0), 1e-6);
}

TEST(BigGPrime, MatchesFiniteDifferences) {
    EXPECT_EQ(big_g_prime(kSmall, 0.0), 0.0);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        const double t = -0.49 + 0.98 * k / 99.0;
        const double fd = (big_g(kSmall, t + 1e-6) - big_g(kSmall, t - 1e-6)) / 2e-6;
        worst = std::max(worst, std::abs(big_g_prime(kSmall, t) - fd));
    }
    EXPECT_LE(worst, 1e-5);
    const double fd = (big_g(kSmall, 0.01 + 1e-6) - big_g(kSmall, 0.01 - 1e-6)) / 2e-6;
    EXPECT_NEAR(big_g_prime(kSmall, 0.01), fd, 1e-5);
}

TEST(W, IntegratesToOne) {
    QuadratureSpec q;
    q.max_panel = 0.5;
    const double integral = 2.0 * quad([](double x) { return w_eval(Bump::exp, x); }, 0.0, 60.0, q);
    EXPECT_NEAR(integral, 1.0, 1e-6);
}

TEST(W, EvenAndNonnegativeForAutocorr) {
    for (double x : {0.3, 1.7, 3.7, 9.1}) EXPECT_DOUBLE_EQ(w_eval(Bump::autocorr, -x), w_eval(Bump::autocorr, x));
    EXPECT_GE(w_eval(Bump::autocorr, 3.7), 0.0);
    double lowest = 1.0;
    for (int k = 0; k <= 500; ++k) lowest = std::min(lowest, w_eval(Bump::autocorr, 0.1 * k));
    EXPECT_GE(lowest, -1e-9);
}

TEST(W, SquareRouteAgrees) {
    for (double x : {0.0, 0.4, 1.3, 2.9, 6.0}) {
        EXPECT_NEAR(w_eval(Bump::autocorr, x), w_eval_autocorr_square(x), 1e-10) << x;
    }
}

TEST(F, CentreAndOrigin) {
    EXPECT_NEAR(f_eval(kWindow, 0.0), 0.0, 1e-6);
    const double centre = f_eval(kWindow, kWindow.R / (2.0 * std::numbers::pi));
    EXPECT_GT(centre, 0.5);
    EXPECT_LT(centre, 1.0);
    // with H much wider than h the window is essentially an indicator
    const TestFunctionSpec wide{3000.0, 1000.0, 2.0, Bump::autocorr};
    EXPECT_NEAR(f_eval(wide, wide.R / (2.0 * std::numbers::pi)), 1.0, 1e-3);
    EXPECT_NEAR(f_eval(wide, (wide.R + 2.0 * wide.H) / (2.0 * std::numbers::pi)), 0.0, 1e-3);
}

TEST(F, TwoRoutesAgree) {
    for (const auto& s : {kSmall, kWindow}) {
        for (int k = 0; k < 20; ++k) {
            const double x = (s.R - 2.0 * s.H + k * 4.0 * s.H / 19.0) / (2.0 * std::numbers::pi);
            ASSERT_NEAR(f_eval_convolution(s, x), f_eval_fourier(s, x), 1e-6) << x;
        }
    }
    EXPECT_NEAR(f_eval_convolution(kWindow, 0.0), f_zero(kWindow), 1e-6);
}

TEST(F, ImaginaryPointForms) {
    for (const auto& s : {kSmall, kWindow}) {
        const double a = f_at_i_over_4pi(s);
        EXPECT_NEAR(a, f_at_i_over_4pi_exp(s), 1e-10);
        double gmax = 0.0;
        for (int k = 0; k <= 1000; ++k) gmax = std::max(gmax, std::abs(big_g(s, s.support() * k / 1000.0)));
        EXPECT_LE(std::abs(a), 2.0 / s.h * gmax * std::cosh(0.5 / s.h));
        TestFunctionSpec fine = s;
        fine.quad_eps = 1e-13;
        EXPECT_NEAR(a, f_at_i_over_4pi(fine), 1e-8);
    }
}

TEST(Digamma, ClassicalValues) {
    const double g = std::numbers::egamma;
    EXPECT_NEAR(digamma(1.0).real(), -g, 1e-13);
    EXPECT_NEAR(digamma(0.5).real(), -g - 2.0 * std::log(2.0), 1e-13);
    EXPECT_NEAR(digamma(0.25).real(), -g - std::numbers::pi / 2.0 - 3.0 * std::log(2.0), 1e-12);
    EXPECT_THROW(digamma(0.0), DomainError);
    EXPECT_THROW(digamma(-3.0), DomainError);
}

TEST(Digamma, MatchesLogGammaDifferenceQuotient) {
    const cplx z(5.5, 3.0);
    const cplx fd = (log_gamma(z + 1e-3) - log_gamma(z - 1e-3)) / 2e-3;
    EXPECT_LT(std::abs(fd - digamma(z)), 1e-6);
    EXPECT_NEAR(log_gamma(cplx(5.0, 0.0)).real(), std::log(24.0), 1e-13);
}
