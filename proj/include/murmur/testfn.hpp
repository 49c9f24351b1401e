#pragma once

// The smoothed window pair (F, G):
//   G(t) = 2 cos(Rt) sin(Ht) / (pi t) * What(t h),   supported on [-1/h, 1/h]
//   F(x) = (1_[(-R-H)/2pi, (-R+H)/2pi] + 1_[(R-H)/2pi, (R+H)/2pi]) * W_h,  W_h(x) = W(x/h)/h
// with an explicit bump What (Fourier transform of W) supported on [-1, 1].

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "murmur/chebyshev.hpp"
#include "murmur/errors.hpp"
#include "murmur/quadrature.hpp"

namespace murmur {

enum class Bump {
    autocorr,  // (b*b)/(b*b)(0), b(t) = exp(-1/(1-4t^2)) on |t| < 1/2; W = |b^|^2 / |b|^2 >= 0
    exp,       // exp(1 - 1/(1-t^2))
};

inline Bump parse_bump(const std::string& s) {
    if (s == "autocorr") return Bump::autocorr;
    if (s == "exp") return Bump::exp;
    throw DomainError("unknown bump '" + s + "' (expected autocorr or exp)");
}

inline const char* bump_name(Bump b) { return b == Bump::autocorr ? "autocorr" : "exp"; }

struct TestFunctionSpec {
    double R = 0.0;
    double H = 0.0;
    double h = 0.0;
    Bump bump = Bump::autocorr;
    double quad_eps = 1e-10;

    /// Throws DomainError naming the violated constraint.
    void validate() const {
        if (!(R > 0.0) || !(H > 0.0)) throw DomainError("window requires R > 0 and H > 0");
        if (!(h > 1.0)) throw DomainError("smoothing parameter must satisfy h > 1 (got h = " + std::to_string(h) + ")");
        if (!(h < H)) {
            throw DomainError("smoothing must be narrower than the window: h < H (got h = " + std::to_string(h) +
                              ", H = " + std::to_string(H) + ")");
        }
        if (!(R - H > h)) {
            throw DomainError("window must clear the origin by more than h: R - H > h (got R - H = " +
                              std::to_string(R - H) + ", h = " + std::to_string(h) + ")");
        }
        if (!(quad_eps > 0.0)) throw DomainError("quad_eps must be positive");
    }

    double support() const noexcept { return 1.0 / h; }
};

namespace detail {

inline double log_b(double x) {
    const double q = 1.0 - 4.0 * x * x;
    return q > 0.0 ? -1.0 / q : -std::numeric_limits<double>::infinity();
}

inline double log_b_prime(double x) {
    const double q = 1.0 - 4.0 * x * x;
    return -8.0 * x / (q * q);
}

struct AutocorrMoments {
    double log_a;   // log (b*b)(t)
    double dlog_a;  // (b*b)'(t) / (b*b)(t)
};

/// (b*b)(t) and its logarithmic derivative by quadrature in log space, for 0 <= t < 1.
/// With s = t/2 + y the integrand is exp(log b(t/2+y) + log b(t/2-y)), symmetric in y
/// and maximal at y = 0.
inline AutocorrMoments autocorr_moments(double t, long panels = 64) {
    const double half_t = 0.5 * t;
    const double L = 0.5 * (1.0 - t);
    const double e0 = 2.0 * log_b(half_t);
    const auto& rule = gauss_legendre(16);
    const double width = L / static_cast<double>(panels);
    CompensatedSum mass, moment;
    for (long k = 0; k < panels; ++k) {
        const double mid = (static_cast<double>(k) + 0.5) * width;
        double m = 0.0, d = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double y = mid + 0.5 * width * rule.nodes[i];
            const double w = std::exp(log_b(half_t + y) + log_b(half_t - y) - e0);
            if (w == 0.0) continue;
            m += rule.weights[i] * w;
            d += rule.weights[i] * w * (log_b_prime(half_t - y) + log_b_prime(half_t + y));
        }
        mass += m * 0.5 * width;
        moment += d * 0.5 * width;
    }
    return {e0 + std::log(2.0 * mass.value()), moment.value() / (2.0 * mass.value())};
}

/// Beyond this point What < e^{-900}; it is returned as 0.
inline constexpr double kAutocorrCut = 1.0 - 1e-3;

/// Tables in z = -log(1 - t) of phi/z and chi/z, where phi = (1-t) log What(t) and
/// chi = (1-t)^2 (log What)'(t). Both stay bounded as t -> 1 and vanish at z = 0; the
/// division by z makes that zero exact after interpolation.
struct AutocorrTables {
    double log_a0;
    PiecewiseChebyshev phi;
    PiecewiseChebyshev chi;

    AutocorrTables() : log_a0(autocorr_moments(0.0).log_a) {
        const double zmax = -std::log1p(-kAutocorrCut);
        phi = PiecewiseChebyshev(
            [&](double z) {
                const double t = -std::expm1(-z);
                return std::exp(-z) * (autocorr_moments(t).log_a - log_a0) / z;
            },
            0.0, zmax, 48, 17);
        chi = PiecewiseChebyshev(
            [&](double z) {
                const double t = -std::expm1(-z);
                return std::exp(-2.0 * z) * autocorr_moments(t).dlog_a / z;
            },
            0.0, zmax, 48, 17);
    }
};

inline const AutocorrTables& autocorr_tables() {
    static const AutocorrTables tables;
    return tables;
}

}  // namespace detail

/// What(t) evaluated straight from the defining integral. Slow; used as a reference.
inline double w_hat_direct(Bump bump, double t) {
    const double a = std::abs(t);
    if (a >= 1.0) return 0.0;
    if (bump == Bump::exp) return std::exp(1.0 - 1.0 / (1.0 - a * a));
    const auto m0 = detail::autocorr_moments(0.0, 128);
    return std::exp(detail::autocorr_moments(a, 128).log_a - m0.log_a);
}

inline double w_hat(Bump bump, double t) {
    const double a = std::abs(t);
    if (a == 0.0) return 1.0;
    if (a >= 1.0) return 0.0;
    if (bump == Bump::exp) return std::exp(1.0 - 1.0 / (1.0 - a * a));
    if (a >= detail::kAutocorrCut) return 0.0;
    const auto& tab = detail::autocorr_tables();
    const double z = -std::log1p(-a);
    return std::exp(z * tab.phi(z) / (1.0 - a));
}

inline double w_hat_prime(Bump bump, double t) {
    const double a = std::abs(t);
    if (a == 0.0 || a >= 1.0) return 0.0;
    const double sign = t < 0.0 ? -1.0 : 1.0;
    if (bump == Bump::exp) {
        const double q = 1.0 - a * a;
        return sign * std::exp(1.0 - 1.0 / q) * (-2.0 * a / (q * q));
    }
    if (a >= detail::kAutocorrCut) return 0.0;
    const auto& tab = detail::autocorr_tables();
    const double z = -std::log1p(-a);
    const double one_minus = 1.0 - a;
    const double value = std::exp(z * tab.phi(z) / one_minus);
    return sign * value * z * tab.chi(z) / (one_minus * one_minus);
}

inline double w_hat(const TestFunctionSpec& s, double t) { return w_hat(s.bump, t); }

namespace detail {

/// sin(Ht)/t and its derivative, with the removable point handled by series.
inline void sinc_pair(double H, double t, double& s, double& ds) {
    const double x = H * t;
    if (std::abs(x) < 1e-2) {
        const double x2 = x * x;
        s = H * (1.0 - x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0 * (1.0 - x2 / 72.0))));
        // d/dt [sin(Ht)/t] = H^2 * sum_{k>=1} (-1)^k 2k x^{2k-1} / (2k+1)!
        ds = H * H * x * (-1.0 / 3.0 + x2 * (1.0 / 30.0 - x2 * (1.0 / 840.0 - x2 / 45360.0)));
        return;
    }
    const double sn = std::sin(x), cs = std::cos(x);
    s = sn / t;
    ds = (x * cs - sn) / (t * t);
}

}  // namespace detail

/// G(t) = 2 cos(Rt) sin(Ht)/(pi t) What(th); G(0) = 2H/pi.
inline double big_g(const TestFunctionSpec& s, double t) {
    if (t == 0.0) return 2.0 * s.H / std::numbers::pi;
    if (std::abs(t) * s.h >= 1.0) return 0.0;
    const double wh = w_hat(s.bump, t * s.h);
    if (wh == 0.0) return 0.0;
    double sinc, dsinc;
    detail::sinc_pair(s.H, t, sinc, dsinc);
    return 2.0 / std::numbers::pi * std::cos(s.R * t) * sinc * wh;
}

inline double big_g_prime(const TestFunctionSpec& s, double t) {
    if (t == 0.0) return 0.0;
    if (std::abs(t) * s.h >= 1.0) return 0.0;
    const double wh = w_hat(s.bump, t * s.h);
    const double dwh = s.h * w_hat_prime(s.bump, t * s.h);
    double sinc, dsinc;
    detail::sinc_pair(s.H, t, sinc, dsinc);
    const double c = std::cos(s.R * t), sn = std::sin(s.R * t);
    return 2.0 / std::numbers::pi * (-s.R * sn * sinc * wh + c * dsinc * wh + c * sinc * dwh);
}

/// Panel layout for integrals of G: quarter period of the top frequency R + H,
/// and at least eight panels across the support.
inline QuadratureSpec g_quadrature(const TestFunctionSpec& s, double extra_freq = 0.0) {
    QuadratureSpec q;
    q.osc_freq = s.R + s.H + extra_freq;
    q.max_panel = s.support() / 8.0;
    q.abs_eps = s.quad_eps;
    return q;
}

/// W(x) = int_{-1}^{1} What(t) e^{2 pi i t x} dt.
inline double w_eval(Bump bump, double x, double abs_eps = 1e-12) {
    QuadratureSpec q;
    q.osc_freq = 2.0 * std::numbers::pi * std::abs(x);
    q.max_panel = 1.0 / 32.0;
    q.abs_eps = abs_eps;
    const double cut = bump == Bump::autocorr ? detail::kAutocorrCut : 1.0;
    return 2.0 * quad([&](double t) { return w_hat(bump, t) * std::cos(2.0 * std::numbers::pi * t * x); }, 0.0, cut, q);
}

inline double w_eval(const TestFunctionSpec& s, double x) { return w_eval(s.bump, x, s.quad_eps); }

/// W(x) for the autocorrelation bump through |b^(x)|^2 / int b^2, which is
/// nonnegative by construction and shares no code with w_eval.
inline double w_eval_autocorr_square(double x, double abs_eps = 1e-13) {
    QuadratureSpec q;
    q.osc_freq = 2.0 * std::numbers::pi * std::abs(x);
    q.max_panel = 1.0 / 64.0;
    q.abs_eps = abs_eps;
    auto b = [](double s) { return std::exp(detail::log_b(s)); };
    const double bhat = 2.0 * quad([&](double s) { return b(s) * std::cos(2.0 * std::numbers::pi * s * x); }, 0.0, 0.5, q);
    QuadratureSpec q0 = q;
    q0.osc_freq = 0.0;
    const double norm = 2.0 * quad([&](double s) { return b(s) * b(s); }, 0.0, 0.5, q0);
    return bhat * bhat / norm;
}

/// F(x) by Fourier inversion of G: 2 int_0^{1/h} G(u) cos(2 pi u x) du.
inline double f_eval_fourier(const TestFunctionSpec& s, double x) {
    const auto q = g_quadrature(s, 2.0 * std::numbers::pi * std::abs(x));
    return 2.0 * quad([&](double u) { return big_g(s, u) * std::cos(2.0 * std::numbers::pi * u * x); }, 0.0,
                      s.support(), q);
}

/// F(x) by convolving the two indicator intervals with W_h, with W taken
/// from the route that does not pass through G.
inline double f_eval_convolution(const TestFunctionSpec& s, double x) {
    const double c = s.R / (2.0 * std::numbers::pi);
    const double w = s.H / (2.0 * std::numbers::pi);
    auto wfun = [&](double z) {
        return s.bump == Bump::autocorr ? w_eval_autocorr_square(z, 1e-14) : w_eval(s.bump, z, 1e-13);
    };
    QuadratureSpec q;
    q.osc_freq = 2.0 * std::numbers::pi;
    q.max_panel = 0.25;
    q.abs_eps = s.quad_eps;
    double total = 0.0;
    for (double center : {-c, c}) {
        total += quad(wfun, (x - center - w) / s.h, (x - center + w) / s.h, q);
    }
    return total;
}

inline double f_eval(const TestFunctionSpec& s, double x) { return f_eval_fourier(s, x); }

/// F(i/4pi) = int G(u) cosh(u/2) du.
inline double f_at_i_over_4pi(const TestFunctionSpec& s) {
    const auto q = g_quadrature(s);
    return 2.0 * quad([&](double u) { return big_g(s, u) * std::cosh(0.5 * u); }, 0.0, s.support(), q);
}

/// The same value through the unsymmetrised form int G(u) e^{-u/2} du.
inline double f_at_i_over_4pi_exp(const TestFunctionSpec& s) {
    const auto q = g_quadrature(s);
    return quad([&](double u) { return big_g(s, u) * std::exp(-0.5 * u); }, -s.support(), s.support(), q);
}

/// F(0) = int G.
inline double f_zero(const TestFunctionSpec& s) {
    const auto q = g_quadrature(s);
    return 2.0 * quad([&](double u) { return big_g(s, u); }, 0.0, s.support(), q);
}

}  // namespace murmur
