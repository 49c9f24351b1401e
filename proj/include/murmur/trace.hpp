#pragma once

// Geometric side of the level-1 Selberg trace formula for Hecke operators T_n,
// itemised by term, plus a specialised evaluator for n = -p.

#include <cmath>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "murmur/arith.hpp"
#include "murmur/dirichlet.hpp"
#include "murmur/errors.hpp"
#include "murmur/quadrature.hpp"
#include "murmur/sum.hpp"
#include "murmur/testfn.hpp"

namespace murmur {

struct GeomBreakdown {
    i64 n = 0;
    double hyperbolic = 0.0;
    double elliptic = 0.0;
    double divisor_log = 0.0;
    double divisor_integral = 0.0;
    double parabolic = 0.0;
    double lambda_sum = 0.0;
    double square_term = 0.0;
    double identity = 0.0;
    double spectral_sum = 0.0;

    /// Sum of every geometric term (equals identity + spectral_sum).
    double total() const {
        CompensatedSum s;
        for (double x : {hyperbolic, elliptic, divisor_log, divisor_integral, parabolic, lambda_sum, square_term}) s += x;
        return s.value();
    }

    void finish() { spectral_sum = total() - identity; }
};

struct TraceOptions {
    /// Skip terms whose G-argument is outside the support. Turning this off
    /// evaluates them anyway (they are exactly zero) and widens every range.
    bool short_circuit = true;
};

class TraceEvaluator {
public:
    /// spf_limit > 0 builds a factor table for decomposing discriminants up to that size.
    TraceEvaluator(const TestFunctionSpec& spec, LValueCache& cache, i64 spf_limit = 0)
        : spec_(spec), cache_(&cache) {
        spec_.validate();
        if (spf_limit > 0) spf_ = std::make_shared<SpfTable>(spf_limit);
        f_zero_ = with_term("F(0)", [&] { return murmur::f_zero(spec_); });
        f_i4pi_ = with_term("F(i/4pi)", [&] { return murmur::f_at_i_over_4pi(spec_); });
        moments_.resize(kMoments);
        const auto q = g_quadrature(spec_);
        for (int k = 0; k < kMoments; ++k) {
            const double a = 0.5 * (2 * k + 1);
            moments_[static_cast<std::size_t>(k)] = with_term("parabolic moments", [&] {
                return quad([&](double v) { return big_g(spec_, v) * std::exp(-a * v); }, -spec_.support(),
                            spec_.support(), q);
            });
        }
    }

    const TestFunctionSpec& spec() const noexcept { return spec_; }
    LValueCache& cache() const noexcept { return *cache_; }
    double f_zero() const noexcept { return f_zero_; }
    double f_i_over_4pi() const noexcept { return f_i4pi_; }

    double g(double u) const { return big_g(spec_, u); }

    // -- hyperbolic range ---------------------------------------------------

    /// G-argument of the class term for D = t^2 - 4n > 0.
    static double hyperbolic_argument(i64 n, i64 t) {
        const double an = static_cast<double>(n < 0 ? -n : n);
        const double x = static_cast<double>(t < 0 ? -t : t) / (2.0 * std::sqrt(an));
        return n < 0 ? 2.0 * std::asinh(x) : 2.0 * std::acosh(x);
    }

    /// Largest |t| with D = t^2 - 4n > 0 and G-argument < 1/h, or -1 if none.
    i64 hyperbolic_t_bound(i64 n) const {
        if (n == 0) throw DomainError("trace formula needs n != 0");
        const double an = static_cast<double>(n < 0 ? -n : n);
        const double lim = spec_.support();
        const double guess = n < 0 ? 2.0 * std::sqrt(an) * std::sinh(0.5 * lim) : 2.0 * std::sqrt(an) * std::cosh(0.5 * lim);
        i64 T = static_cast<i64>(std::floor(guess)) + 1;
        auto ok = [&](i64 t) {
            const i64 D = checked_add(checked_mul(t, t), checked_mul(-4, n));
            return D > 0 && hyperbolic_argument(n, t) < lim;
        };
        while (T >= 0 && !ok(T)) --T;
        return T;
    }

    /// Every t contributing a class term (D > 0, not a square, argument in support).
    std::vector<i64> hyperbolic_t_values(i64 n) const {
        std::vector<i64> out;
        const i64 T = hyperbolic_t_bound(n);
        for (i64 t = -T; t <= T; ++t) {
            const i64 D = t * t - 4 * n;
            if (D > 0 && !is_perfect_square(D) && hyperbolic_argument(n, t) < spec_.support()) out.push_back(t);
        }
        return out;
    }

    // -- general n ------------------------------------------------------------

    GeomBreakdown geometric_side(i64 n, TraceOptions opt = {}) const {
        if (n == 0) throw DomainError("trace formula needs n != 0");
        GeomBreakdown b;
        b.n = n;
        const i64 N = n < 0 ? -n : n;
        const double eps_sign = n < 0 ? -1.0 : 1.0;
        const double lim = spec_.support();
        const double sqrtN = std::sqrt(static_cast<double>(N));

        // class terms
        {
            i64 T = n < 0 ? hyperbolic_t_bound(n)
                          : static_cast<i64>(std::floor(2.0 * sqrtN * std::cosh(0.5 * lim))) + 1;
            if (!opt.short_circuit) T = 2 * std::max<i64>(T, 0) + 5;
            CompensatedSum hyp, ell;
            for (i64 t = -T; t <= T; ++t) {
                const i64 D = checked_add(checked_mul(t, t), checked_mul(-4, n));
                if (D == 0 || is_perfect_square(D)) continue;
                if (D > 0) {
                    const double sD = std::sqrt(static_cast<double>(D));
                    const double at = static_cast<double>(t < 0 ? -t : t);
                    const double arg = std::log((at + sD) * (at + sD) / (4.0 * static_cast<double>(N)));
                    if (opt.short_circuit && std::abs(arg) >= lim) continue;
                    const double gv = g(arg);
                    if (gv == 0.0 && opt.short_circuit) continue;
                    hyp += l_value(D) * gv;
                } else {
                    const double kappa = static_cast<double>(-D) / (4.0 * static_cast<double>(N));
                    ell += l_value(D) * elliptic_integral(kappa);
                }
            }
            b.hyperbolic = hyp.value();
            b.elliptic = ell.value();
        }

        // divisor, parabolic and prime-power terms over pairs ad = n, a > 0
        CompensatedSum dlog, dint, para, lam;
        const auto divs = divisors(N);
        for (i64 a : divs) {
            const i64 d = n / a;
            const double c = std::log(static_cast<double>(a)) - std::log(static_cast<double>(d < 0 ? -d : d));
            const double gc = g(c);
            if (a != d) {
                const i64 diff = a > d ? a - d : d - a;
                if (!opt.short_circuit || std::abs(c) < lim) {
                    dlog += (std::log(std::numbers::pi) + std::log(static_cast<double>(diff)) -
                             log_eta(diff) / static_cast<double>(diff)) * gc;
                    const double ratio = static_cast<double>(a) / static_cast<double>(d < 0 ? -d : d);
                    const double shift = std::abs(std::sqrt(ratio) - eps_sign / std::sqrt(ratio));
                    const double lo = std::abs(c);
                    const double hi = opt.short_circuit ? lim : std::max(lim, lo) + 1.0;
                    if (hi > lo) {
                        dint += 0.5 * with_term("divisor integral", [&] {
                            return quad(
                                [&](double u) {
                                    const double ep = std::exp(0.5 * u), em = std::exp(-0.5 * u);
                                    return g(u) * (ep + eps_sign * em) / (ep - eps_sign * em + shift);
                                },
                                lo, hi, g_quadrature(spec_));
                        });
                    }
                }
            }
            para += gc * std::log(4.0 * std::exp(std::numbers::egamma)) + sinh_difference_integral(c, opt) -
                    0.25 * f_zero_;

            // Lambda(m)/m G(c - 2 log m): m in (e^{(c - 1/h)/2}, e^{(c + 1/h)/2})
            const double m_hi = opt.short_circuit ? std::exp(0.5 * (c + lim)) : std::exp(0.5 * (std::abs(c) + 2.0 * lim)) + 5.0;
            const double m_lo = opt.short_circuit ? std::exp(0.5 * (c - lim)) : 1.0;
            for (i64 m = std::max<i64>(2, static_cast<i64>(std::floor(m_lo))); m <= static_cast<i64>(std::ceil(m_hi)); ++m) {
                const double gm = g(c - 2.0 * std::log(static_cast<double>(m)));
                if (gm == 0.0) continue;
                const double lm = von_mangoldt(m);
                if (lm != 0.0) lam += 2.0 * lm / static_cast<double>(m) * gm;
            }
        }
        b.divisor_log = dlog.value();
        b.divisor_integral = dint.value();
        b.parabolic = para.value();
        b.lambda_sum = lam.value();

        if (n > 0) {
            if (const auto s = perfect_square_root(n)) b.square_term = square_term(*s);
        }
        b.identity = static_cast<double>(sigma1(N)) / sqrtN * f_i4pi_;
        b.finish();
        return b;
    }

    // -- n = -p ----------------------------------------------------------------

    GeomBreakdown trace_minus_p(i64 p) const {
        if (p < 2) throw DomainError("trace_minus_p: p must be prime, got " + std::to_string(p));
        GeomBreakdown b;
        b.n = -p;
        const double pd = static_cast<double>(p);
        const double sp = std::sqrt(pd);
        const double lp = std::log(pd);
        const double lim = spec_.support();

        b.hyperbolic = hyperbolic_minus_p(p);

        const double glp = g(lp);
        if (lp < lim) {
            b.divisor_log = 2.0 * (std::log(std::numbers::pi) + std::log(pd + 1.0) - log_eta(p + 1) / (pd + 1.0)) * glp;
            b.divisor_integral = with_term("divisor integral", [&] {
                return quad(
                    [&](double u) {
                        const double ep = std::exp(0.5 * u), em = std::exp(-0.5 * u);
                        return g(u) * (ep - em) / (ep + em + sp + 1.0 / sp);
                    },
                    lp, lim, g_quadrature(spec_));
            });
        }

        // I(c) for c = +log p vanishes once log p >= 1/h; I(-log p) from the
        // expansion 1/(2 sinh(u/2)) = sum_k e^{-(2k+1)u/2} when log p - 1/h >= 2.
        double para_int;
        if (lp - lim >= 2.0) {
            CompensatedSum s;
            for (int k = 0; k < kMoments; ++k) {
                s += std::exp(-0.5 * (2 * k + 1) * lp) * moments_[static_cast<std::size_t>(k)];
            }
            para_int = s.value();
        } else {
            para_int = sinh_difference_integral(lp, {}) + sinh_difference_integral(-lp, {});
        }
        b.parabolic = 2.0 * std::log(4.0 * std::exp(std::numbers::egamma)) * glp - 0.5 * f_zero_ + para_int;

        CompensatedSum lam;
        const i64 m_lo = std::max<i64>(2, static_cast<i64>(std::floor(std::exp(0.5 * (lp - lim)))));
        const i64 m_hi = static_cast<i64>(std::ceil(std::exp(0.5 * (lp + lim))));
        for (i64 m = m_lo; m <= m_hi; ++m) {
            const double lm2 = 2.0 * std::log(static_cast<double>(m));
            const double gsum = g(lp - lm2) + g(lp + lm2);
            if (gsum == 0.0) continue;
            const double lm = von_mangoldt(m);
            if (lm != 0.0) lam += 2.0 * lm / static_cast<double>(m) * gsum;
        }
        b.lambda_sum = lam.value();

        b.identity = (pd + 1.0) / sp * f_i4pi_;
        b.finish();
        return b;
    }

    double spectral_sum(i64 n) const { return geometric_side(n).spectral_sum; }

    double hyperbolic_only(i64 p) const { return hyperbolic_minus_p(p); }

    /// Class terms with 2 arcsinh(t/(2 sqrt p)) replaced by t/sqrt p:
    /// 2 sqrt p sum_t L(1, psi_{t^2+4p}) cos(Rt/sqrt p) sin(Ht/sqrt p)/(pi t) What(ht/sqrt p).
    double first_order(i64 p) const {
        const double sp = std::sqrt(static_cast<double>(p));
        const i64 T = static_cast<i64>(std::floor(sp * spec_.support()));
        CompensatedSum s;
        for (i64 t = 0; t <= T; ++t) {
            if (t == p - 1) continue;
            const double gv = g(static_cast<double>(t) / sp);
            if (gv == 0.0) continue;
            const double term = l_value(t * t + 4 * p) * gv;
            s += t == 0 ? term : 2.0 * term;
        }
        return s.value();
    }

    /// sum over t != +-(p-1) of L(1, psi_{t^2+4p}) G(2 arcsinh(|t|/(2 sqrt p))).
    double hyperbolic_minus_p(i64 p) const {
        const i64 T = hyperbolic_t_bound(-p);
        const double sp = std::sqrt(static_cast<double>(p));
        CompensatedSum s;
        for (i64 t = 0; t <= T; ++t) {
            if (t == p - 1) continue;
            const double gv = g(2.0 * std::asinh(static_cast<double>(t) / (2.0 * sp)));
            if (gv == 0.0) continue;
            const double term = l_value(checked_add(checked_mul(t, t), checked_mul(4, p))) * gv;
            s += t == 0 ? term : 2.0 * term;
        }
        return s.value();
    }

    /// (sqrt(kappa)/2pi) int G(u) cosh(u/2) / (sinh^2(u/2) + kappa) du.
    double elliptic_integral(double kappa) const {
        auto q = g_quadrature(spec_);
        q.max_panel = std::min(q.max_panel, 0.25 * std::sqrt(kappa));
        const double v = with_term("elliptic integral", [&] {
            return 2.0 * quad(
                             [&](double u) {
                                 const double sh = std::sinh(0.5 * u);
                                 return g(u) * std::cosh(0.5 * u) / (sh * sh + kappa);
                             },
                             0.0, spec_.support(), q);
        });
        return std::sqrt(kappa) / (2.0 * std::numbers::pi) * v;
    }

    /// int_0^inf (G(u + c) - G(c)) / (2 sinh(u/2)) du.
    double sinh_difference_integral(double c, TraceOptions opt) const {
        const double lim = spec_.support();
        const double gc = g(c);
        const auto q = g_quadrature(spec_);
        auto kernel = [](double u) { return 0.5 / std::sinh(0.5 * u); };
        if (gc == 0.0 && opt.short_circuit) {
            // only G(u + c) survives, on u + c in (-1/h, 1/h)
            const double lo = std::max(0.0, -c - lim);
            const double hi = std::max(0.0, lim - c);
            if (hi <= lo) return 0.0;
            return with_term("parabolic integral",
                             [&] { return quad([&](double u) { return g(u + c) * kernel(u); }, lo, hi, q); });
        }
        // beyond U = max(1/h - c, ...) the integrand is -G(c)/(2 sinh(u/2)), whose
        // integral over (U, inf) is log tanh(U/4)
        double U = std::max(lim - c, 0.0);
        if (!opt.short_circuit) U = std::max(U, 0.0) + std::abs(c) + 2.0 * lim;
        if (U <= 0.0) return 0.0;
        const double body = with_term("parabolic integral", [&] {
            return quad([&](double u) { return (g(u + c) - gc) * kernel(u); }, 0.0, U, q);
        });
        return body + gc * std::log(std::tanh(0.25 * U));
    }

    /// Bracketed term present when n = s^2.
    double square_term(i64 s) const {
        const double sd = static_cast<double>(s);
        const double lim = spec_.support();
        const auto q = g_quadrature(spec_);
        const double A = with_term("square term (1/sinh)", [&] {
            return -1.0 / (6.0 * sd) *
                   quad([&](double u) { return big_g_prime(spec_, u) / std::sinh(0.5 * u); }, 0.0, lim, q);
        });
        const double B = (std::log(std::numbers::pi * sd / 2.0) + std::numbers::egamma) * g(0.0);
        const double C = with_term("square term (log sinh)", [&] {
            return -quad_log_endpoint(
                [&](double u) { return std::log(2.0 * std::sinh(0.5 * u)) * big_g_prime(spec_, u); }, 0.0, lim, q);
        });
        return A + B + C;
    }

    double l_value(i64 D) const { return spf_ ? l_one_general(D, *cache_, *spf_) : l_one_general(D, *cache_); }

private:
    static constexpr int kMoments = 24;

    template <class F>
    static double with_term(const char* term, F&& f) {
        try {
            return f();
        } catch (const NumericError& e) {
            throw NumericError(std::string(term) + ": " + e.message(), e.previous(), e.last());
        }
    }

    TestFunctionSpec spec_;
    LValueCache* cache_;
    std::shared_ptr<const SpfTable> spf_;
    double f_zero_ = 0.0;
    double f_i4pi_ = 0.0;
    std::vector<double> moments_;
};

}  // namespace murmur
