#pragma once

// Named oracle comparisons and invariant checks. The CLI's `check` command and
// the acceptance binary both run from this registry.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "murmur/arith.hpp"
#include "murmur/dirichlet.hpp"
#include "murmur/murmuration.hpp"
#include "murmur/nu.hpp"
#include "murmur/oracles.hpp"
#include "murmur/special.hpp"
#include "murmur/testfn.hpp"
#include "murmur/trace.hpp"

namespace murmur {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

struct CheckContext {
    LValueCache* cache = nullptr;  // checked by cache_coherence when set
    unsigned threads = 1;
};

struct CheckDef {
    std::string name;
    int criterion = 0;         // acceptance criterion it belongs to, 0 for none
    bool default_run = true;   // false: only when named explicitly
    std::function<CheckResult(CheckContext&)> run;
};

namespace detail {

template <class... Args>
std::string fmt(const char* f, Args... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

inline double rel_diff(double a, double b) {
    const double s = std::max(std::abs(a), std::abs(b));
    return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

inline CheckResult check_kronecker(CheckContext&) {
    long bad = 0, total = 0;
    std::string first;
    for (i64 a = -200; a <= 200; ++a) {
        for (i64 n = -200; n <= 200; ++n) {
            ++total;
            const int k = kronecker(a, n), o = oracle::kronecker_brute(a, n);
            if (k != o) {
                if (bad++ == 0) first = fmt(" first: (%lld|%lld) = %d vs %d", (long long)a, (long long)n, k, o);
            }
        }
    }
    return {"", bad == 0, fmt("%ld/%ld mismatches", bad, total) + first};
}

inline CheckResult check_log_eta(CheckContext&) {
    double worst = 0.0;
    for (i64 m = 1; m <= 500; ++m) worst = std::max(worst, std::abs(log_eta(m) - oracle::log_eta_product(m)));
    return {"", worst <= 1e-10, fmt("max abs diff %.3e over m <= 500", worst)};
}

inline CheckResult check_decompose(CheckContext&) {
    long bad = 0, total = 0;
    std::string first;
    for (i64 D = -100000; D <= 100000; ++D) {
        if (D == 0 || !is_discriminant(D)) continue;
        ++total;
        const auto a = decompose_discriminant(D);
        const auto b = oracle::decompose_exhaustive(D);
        if (a.d != b.d || a.ell != b.ell) {
            if (bad++ == 0) first = fmt(" first: D = %lld", (long long)D);
        }
    }
    return {"", bad == 0, fmt("%ld/%ld mismatches", bad, total) + first};
}

inline CheckResult check_multiplicative(CheckContext&) {
    long bad = 0;
    std::string first;
    for (i64 n = 1; n <= 10000; ++n) {
        if (mobius(n) != oracle::mobius_naive(n) || euler_phi(n) != oracle::euler_phi_naive(n) ||
            sigma1(n) != oracle::sigma1_naive(n)) {
            if (bad++ == 0) first = fmt(" first: n = %lld", (long long)n);
        }
    }
    return {"", bad == 0, fmt("%ld mismatches over n <= 10000", bad) + first};
}

inline CheckResult check_l_fundamental(CheckContext&) {
    double worst = 0.0;
    for (i64 d : {5, 8, 12, 13, -3, -4, -7, -8}) {
        worst = std::max(worst, rel_diff(l_one_fundamental(d, 1e-9), oracle::l_one_class_number(d)));
    }
    return {"", worst <= 1e-6, fmt("max rel diff %.3e vs class number formula", worst)};
}

inline CheckResult check_l_general(CheckContext&) {
    LValueCache cache(1e-9);
    double worst = 0.0;
    std::string parts;
    for (i64 D : {45, -16, 40, 72}) {
        const double lib = l_one_general(D, cache);
        const double ref = oracle::l_one_direct(D, 1000000);
        worst = std::max(worst, rel_diff(lib, ref));
        parts += fmt(" D=%lld:%.8f/%.8f", (long long)D, lib, ref);
    }
    return {"", worst <= 1e-3, fmt("max rel diff %.3e;", worst) + parts};
}

inline TestFunctionSpec small_spec() { return {600.0, 40.0, 8.0, Bump::autocorr}; }

inline CheckResult check_f_dual(CheckContext&) {
    const auto spec = small_spec();
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
        const double r = spec.R - spec.H - 60.0 + k * (2.0 * spec.H + 120.0) / 19.0;
        const double x = r / (2.0 * std::numbers::pi);
        worst = std::max(worst, std::abs(f_eval_convolution(spec, x) - f_eval_fourier(spec, x)));
    }
    return {"", worst <= 1e-6, fmt("max abs diff %.3e at 20 points", worst)};
}

inline CheckResult check_g_prime(CheckContext&) {
    const auto spec = small_spec();
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
        const double t = -0.95 / spec.h + k * 1.9 / (19.0 * spec.h) + 1e-3;
        const double fd = oracle::derivative([&](double u) { return big_g(spec, u); }, t, 1e-6);
        worst = std::max(worst, std::abs(big_g_prime(spec, t) - fd));
    }
    return {"", worst <= 1e-5, fmt("max abs diff %.3e vs finite differences", worst)};
}

inline CheckResult check_w_nonneg(CheckContext&) {
    double lowest = HUGE_VAL, at = 0.0;
    for (int k = -400; k <= 400; ++k) {
        const double x = 0.05 * k;
        const double w = w_eval(Bump::autocorr, x);
        if (w < lowest) {
            lowest = w;
            at = x;
        }
    }
    return {"", lowest >= -1e-9, fmt("min W = %.3e at x = %.2f on [-20, 20]", lowest, at)};
}

inline CheckResult check_trace_paths(CheckContext&) {
    LValueCache cache(1e-10);
    TraceEvaluator ev(small_spec(), cache);
    double worst = 0.0;
    for (i64 p : {101, 307, 1009, 3001, 7919, 10007, 20011, 40009, 70001, 99991}) {
        if (!oracle::is_prime_trial(p)) return {"", false, fmt("%lld is not prime", (long long)p)};
        worst = std::max(worst, rel_diff(ev.trace_minus_p(p).spectral_sum, ev.geometric_side(-p).spectral_sum));
    }
    return {"", worst <= 1e-8, fmt("max rel diff %.3e over 10 primes", worst)};
}

inline CheckResult check_square_exclusion(CheckContext&) {
    LValueCache cache(1e-6);
    TraceEvaluator ev({60.0, 10.0, 1.1, Bump::autocorr}, cache);
    long bad = 0, nonempty = 0;
    std::string first;
    for (i64 p = 2; p <= 10000; ++p) {
        if (!oracle::is_prime_trial(p)) continue;
        const i64 T = ev.hyperbolic_t_bound(-p);
        std::set<i64> brute, expected, excluded;
        for (i64 t = -T; t <= T; ++t) {
            const i64 D = t * t + 4 * p;
            const auto s = static_cast<i64>(std::llround(std::sqrt(static_cast<long double>(D))));
            if (s * s == D) brute.insert(t);
            if (t == p - 1 || t == -(p - 1)) expected.insert(t);
            excluded.insert(t);
        }
        for (i64 t : ev.hyperbolic_t_values(-p)) excluded.erase(t);
        if (!brute.empty()) ++nonempty;
        std::set<i64> full;
        for (i64 t = -2 * p; t <= 2 * p; ++t) {
            const i64 D = t * t + 4 * p;
            const auto s = static_cast<i64>(std::llround(std::sqrt(static_cast<long double>(D))));
            if (s * s == D) full.insert(t);
        }
        if (brute != expected || excluded != expected || full != std::set<i64>{-(p - 1), p - 1}) {
            if (bad++ == 0) first = fmt(" first: p = %lld", (long long)p);
        }
    }
    return {"", bad == 0, fmt("%ld primes disagree; %ld primes with a square in range", bad, nonempty) + first};
}

inline CheckResult check_weyl(CheckContext& ctx) {
    LValueCache cache(1e-6);
    const TestFunctionSpec spec{2000.0, 80.0, 10.0, Bump::autocorr};
    TraceEvaluator ev(spec, cache);
    (void)ctx;
    const double s = ev.spectral_sum(1);
    const double w = weyl_window(spec.R, spec.H);
    const double rel = std::abs(s - w) / w;
    return {"", rel <= 0.10, fmt("spectral_sum(1) = %.4f, weyl_window = %.4f, rel diff %.3e", s, w, rel)};
}

inline CheckResult check_nu_literal(CheckContext&) {
    const IntervalE E(0.0, 2.0);
    const double v = nu(E, 1e-8);
    const double b = oracle::nu_brute(E, 1000, 100000);
    const double d = std::abs(v - b);
    return {"", d <= 1e-6, fmt("nu = %.10f, brute(q<=1e3, a<=1e5) = %.10f, diff %.3e", v, b, d)};
}

inline CheckResult check_nu_matched(CheckContext&) {
    const IntervalE E(0.0, 2.0);
    const double v = nu_partial(E, 1000, 100000);
    const double b = oracle::nu_brute(E, 1000, 100000);
    const double d = std::abs(v - b);
    return {"", d <= 1e-9, fmt("nu_partial = %.12f, brute = %.12f, diff %.3e (same cutoffs)", v, b, d)};
}

inline CheckResult check_nu_halving(CheckContext&) {
    struct Point {
        i64 q, a;
    };
    double worst = 0.0;
    for (auto [q, a] : {Point{1, 2}, Point{1, 1}, Point{3, 2}}) {
        const double x = static_cast<double>(q * q) / static_cast<double>(a * a);
        const auto f = factorize(q);
        const double phi = static_cast<double>(euler_phi_of(f)), sigma = static_cast<double>(sigma1_of(f));
        const double qd = static_cast<double>(q), ad = static_cast<double>(a);
        const double term = 6.0 / (std::numbers::pi * std::numbers::pi) * qd * qd * qd / (phi * phi * sigma * ad * ad * ad);
        const double lhs = nu(IntervalE(0.0, x - 1e-10), 1e-7) + 0.5 * term;
        worst = std::max(worst, std::abs(lhs - nu(IntervalE(0.0, x), 1e-7)));
    }
    return {"", worst <= 1e-7, fmt("max |nu([0,s]) + term/2 - nu([0,x])| = %.3e", worst)};
}

inline CheckResult check_nu_additivity(CheckContext&) {
    const double pts[] = {0.5, 1.0, 1.5, 2.0};
    double worst = 0.0;
    for (int i = 0; i < 4; ++i) {
        for (int j = i + 1; j < 4; ++j) {
            const double a = nu(IntervalE(0.0, pts[i]), 1e-7) + nu(IntervalE(pts[i], pts[j]), 1e-7);
            worst = std::max(worst, std::abs(a - nu(IntervalE(0.0, pts[j]), 1e-7)));
        }
    }
    return {"", worst <= 1e-7, fmt("max additivity defect %.3e", worst)};
}

inline CheckResult check_prop51(CheckContext&) {
    const auto primes = sieve_primes(1000000);
    const double x = 50.0;
    const auto half = prop51_check(1, 2, 0.0, x, Bump::autocorr, 60, primes);
    const auto four = prop51_check(1, 4, 0.0, x, Bump::autocorr, 60, primes);
    const auto shifted = prop51_check(3, 2, 0.0, x, Bump::autocorr, 60, primes);
    const double w0 = w_eval(Bump::autocorr, 0.0);
    const double expect = x * w0 / 3.0;
    const double rel = std::abs(half.lhs - expect) / expect;
    const bool ok = rel <= 0.1 && std::abs(four.lhs) <= 0.1 * x * w0 && std::abs(half.main_term - expect) <= 1e-9 * expect &&
                    four.main_term == 0.0 && rel_diff(half.lhs, shifted.lhs) <= 1e-12;
    return {"", ok,
            fmt("q=2: lhs %.6f main %.6f rel %.3e; q=4: lhs %.6f (bound %.4f); a->a+q diff %.2e", half.lhs, expect, rel,
                four.lhs, 0.1 * x * w0, rel_diff(half.lhs, shifted.lhs))};
}

inline CheckResult check_digamma(CheckContext&) {
    const double g = std::numbers::egamma;
    const double e1 = std::abs(digamma(1.0) - cplx(-g, 0.0));
    const double e2 = std::abs(digamma(0.5) - cplx(-g - 2.0 * std::log(2.0), 0.0));
    const cplx z(5.5, 3.0);
    const double step = 1e-3;
    const cplx fd = (log_gamma(z + step) - log_gamma(z - step)) / (2.0 * step);
    const double e3 = std::abs(fd - digamma(z));
    return {"", e1 <= 1e-12 && e2 <= 1e-12 && e3 <= 1e-6, fmt("psi(1) %.1e, psi(1/2) %.1e, difference quotient %.1e", e1, e2, e3)};
}

inline constexpr double kConductorOffsetBound = 0.05;

inline CheckResult check_conductor(CheckContext&) {
    double worst = 0.0, prev = 0.0;
    bool monotone = true;
    for (double R = 1000.0; R <= 10000.0; R += 250.0) {
        const double n = conductor(R, 0);
        worst = std::max({worst, std::abs(n - R * R / (4.0 * std::numbers::pi * std::numbers::pi)),
                          std::abs(conductor(R, 1) - R * R / (4.0 * std::numbers::pi * std::numbers::pi))});
        if (n <= prev) monotone = false;
        prev = n;
    }
    return {"", worst <= kConductorOffsetBound && monotone,
            fmt("max |N(R) - R^2/4pi^2| = %.3e on [1e3, 1e4]%s", worst, monotone ? "" : ", not monotone")};
}

inline CheckResult check_cache_coherence(CheckContext& ctx) {
    if (ctx.cache == nullptr) return {"", true, "no cache configured"};
    const auto entries = ctx.cache->snapshot();
    if (entries.empty()) return {"", true, "cache is empty"};
    const double eps = ctx.cache->eps();
    const std::size_t stride = std::max<std::size_t>(1, entries.size() / 64);
    std::size_t i = 0, checked = 0, bad = 0;
    std::string first;
    for (const auto& [d, v] : entries) {
        if (i++ % stride != 0) continue;
        ++checked;
        const double fresh = l_one_fundamental(d, eps);
        if (std::abs(fresh - v) > 2.0 * eps) {
            if (bad++ == 0) first = fmt(" first: d = %lld cached %.12g fresh %.12g", (long long)d, v, fresh);
        }
    }
    return {"", bad == 0, fmt("%zu/%zu sampled entries disagree", bad, checked) + first};
}

inline CheckResult check_determinism(CheckContext& ctx) {
    const TestFunctionSpec spec{300.0, 30.0, 5.0, Bump::autocorr};
    std::vector<double> grid;
    for (int k = 1; k <= 10; ++k) grid.push_back(0.2 * k);
    auto run = [&](unsigned threads, LValueCache& cache) {
        TraceEvaluator ev(spec, cache);
        FigureOptions opt;
        opt.threads = threads;
        opt.nu_tol = 1e-6;
        return figure1(ev, grid, opt);
    };
    LValueCache cold(1e-6), warm(1e-6);
    const auto a = run(1, cold);
    const auto b = run(std::max(2u, ctx.threads), warm);
    const auto c = run(1, warm);
    bool same = a.rows.size() == b.rows.size() && a.rows.size() == c.rows.size();
    for (std::size_t i = 0; same && i < a.rows.size(); ++i) {
        for (const auto* r : {&b.rows[i], &c.rows[i]}) {
            same = same && a.rows[i].lhs_scaled == r->lhs_scaled && a.rows[i].numerator == r->numerator &&
                   a.rows[i].denominator == r->denominator && a.rows[i].nu == r->nu;
        }
    }
    return {"", same, same ? "bit-identical across thread counts and warm cache" : "rows differ"};
}

}  // namespace detail

inline const std::vector<CheckDef>& check_registry() {
    using namespace detail;
    static const std::vector<CheckDef> defs = {
        {"kronecker", 1, true, check_kronecker},
        {"log_eta", 1, true, check_log_eta},
        {"decompose", 1, true, check_decompose},
        {"multiplicative", 1, true, check_multiplicative},
        {"l_fundamental", 2, true, check_l_fundamental},
        {"l_general", 2, true, check_l_general},
        {"f_dual", 3, true, check_f_dual},
        {"g_prime", 3, true, check_g_prime},
        {"w_nonneg", 3, true, check_w_nonneg},
        {"trace_paths", 4, true, check_trace_paths},
        {"square_exclusion", 4, true, check_square_exclusion},
        {"weyl", 5, true, check_weyl},
        {"nu_literal", 6, false, check_nu_literal},
        {"nu_matched", 6, true, check_nu_matched},
        {"nu_halving", 6, true, check_nu_halving},
        {"nu_additivity", 6, true, check_nu_additivity},
        {"prop51", 7, true, check_prop51},
        {"digamma", 0, true, check_digamma},
        {"conductor", 0, true, check_conductor},
        {"cache_coherence", 0, true, check_cache_coherence},
        {"determinism", 0, true, check_determinism},
    };
    return defs;
}

inline CheckResult run_check(const CheckDef& def, CheckContext& ctx) {
    const auto t0 = std::chrono::steady_clock::now();
    CheckResult r;
    try {
        r = def.run(ctx);
    } catch (const std::exception& e) {
        r.passed = false;
        r.detail = std::string("exception: ") + e.what();
    }
    r.name = def.name;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

/// Runs the named checks, or every default check when `only` is empty.
/// Throws DomainError on an unknown name.
inline std::vector<CheckResult> run_checks(const std::vector<std::string>& only, CheckContext& ctx) {
    const auto& defs = check_registry();
    for (const auto& name : only) {
        if (std::none_of(defs.begin(), defs.end(), [&](const CheckDef& d) { return d.name == name; })) {
            throw DomainError("unknown check '" + name + "'");
        }
    }
    std::vector<CheckResult> out;
    for (const auto& def : defs) {
        const bool named = std::find(only.begin(), only.end(), def.name) != only.end();
        if (only.empty() ? def.default_run : named) out.push_back(run_check(def, ctx));
    }
    return out;
}

}  // namespace murmur
