#pragma once

// Prime-weighted averages of the trace formula over windows p/N in E, the
// Weyl-law denominator, and the comparison against nu(E).

#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <mutex>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "murmur/arith.hpp"
#include "murmur/dirichlet.hpp"
#include "murmur/nu.hpp"
#include "murmur/parallel.hpp"
#include "murmur/special.hpp"
#include "murmur/sum.hpp"
#include "murmur/testfn.hpp"
#include "murmur/trace.hpp"

namespace murmur {

/// Analytic conductor exp(psi((1/2+a+iR)/2) + psi((1/2+a-iR)/2)) / pi^2.
inline double conductor(double R, int parity_a = 0) {
    if (!(R > 0.0)) throw DomainError("conductor: R must be positive");
    if (parity_a != 0 && parity_a != 1) throw DomainError("conductor: parity a must be 0 or 1");
    const cplx z(0.5 * (0.5 + parity_a), 0.5 * R);
    return std::exp(2.0 * digamma(z).real()) / (std::numbers::pi * std::numbers::pi);
}

/// Primes p with lo <= p/N <= hi, ascending.
inline std::vector<i64> prime_window(const IntervalE& E, double N, const PrimeTable& table) {
    const double top = N * E.hi;
    if (static_cast<double>(table.limit) < std::floor(top)) {
        throw ResourceError("prime table limit " + std::to_string(table.limit) + " is below the required N*hi = " +
                            std::to_string(static_cast<long long>(std::floor(top))));
    }
    std::vector<i64> out;
    for (i64 p : table.primes) {
        const double r = static_cast<double>(p) / N;
        if (r < E.lo) continue;
        if (r > E.hi) break;
        out.push_back(p);
    }
    return out;
}

/// T^2/12 - 2T log T/pi + (2 - log 2 + log pi) T/pi.
inline double weyl_count(double T) {
    if (!(T > 1.0)) throw DomainError("weyl_count: T must exceed 1");
    return T * T / 12.0 - 2.0 * T * std::log(T) / std::numbers::pi +
           (2.0 - std::log(2.0) + std::log(std::numbers::pi)) * T / std::numbers::pi;
}

inline double weyl_window(double R, double H) {
    if (!(R > H) || !(H > 0.0)) throw DomainError("weyl_window: need R > H > 0");
    return weyl_count(R + H) - weyl_count(R - H);
}

struct PrimeTerm {
    i64 p = 0;
    double log_p = 0.0;
    double spectral = 0.0;  // sum_j F(r_j/2pi) eps_j a_j(p)
    std::string error;      // empty on success
};

using Progress = std::function<void(std::size_t done, std::size_t total)>;

/// spectral_sum(-p) for each prime, in input order. Failures are recorded per prime.
inline std::vector<PrimeTerm> evaluate_primes(const std::vector<i64>& primes, const TraceEvaluator& ev,
                                              unsigned threads = 1, const Progress& progress = {}) {
    std::vector<PrimeTerm> out(primes.size());
    std::atomic<std::size_t> done{0};
    std::mutex progress_mutex;
    parallel_for(
        primes.size(), threads,
        [&](std::size_t i) {
            PrimeTerm& term = out[i];
            term.p = primes[i];
            term.log_p = std::log(static_cast<double>(term.p));
            try {
                term.spectral = ev.trace_minus_p(term.p).spectral_sum;
            } catch (const NumericError& e) {
                term.error = e.what();
                term.spectral = std::numeric_limits<double>::quiet_NaN();
            }
            const std::size_t k = done.fetch_add(1) + 1;
            if (progress && (k % 1024 == 0 || k == primes.size())) {
                std::lock_guard lock(progress_mutex);
                progress(k, primes.size());
            }
        },
        8);
    return out;
}

inline double numerator(const IntervalE& E, const TraceEvaluator& ev, double N, const PrimeTable& table,
                        unsigned threads = 1) {
    const auto terms = evaluate_primes(prime_window(E, N, table), ev, threads);
    CompensatedSum s;
    for (const auto& t : terms) {
        if (!t.error.empty()) throw NumericError("numerator: p = " + std::to_string(t.p) + ": " + t.error, 0.0, 0.0);
        s += t.log_p * t.spectral;
    }
    return s.value();
}

inline double denominator(const IntervalE& E, const TestFunctionSpec& spec, double N, const PrimeTable& table) {
    CompensatedSum s;
    for (i64 p : prime_window(E, N, table)) s += std::log(static_cast<double>(p));
    return s.value() * weyl_window(spec.R, spec.H);
}

struct MurmurationRow {
    double t = 0.0;
    double nu = 0.0;
    double lhs_scaled = 0.0;
    double numerator = 0.0;
    double denominator = 0.0;
    std::string status = "ok";
};

struct MurmurationReport {
    TestFunctionSpec spec;
    IntervalE E;
    double N = 0.0;
    double numerator = 0.0;
    double denominator = 0.0;
    double ratio = 0.0;
    double nu = 0.0;
    std::vector<MurmurationRow> rows;
};

struct FigureOptions {
    unsigned threads = 1;
    int parity_a = 0;
    double nu_tol = 1e-8;
    Progress progress;
};

/// Ratio numerator/denominator for one window E, with nu(E) alongside.
inline MurmurationReport murmuration_ratio(const IntervalE& E, const TraceEvaluator& ev, const FigureOptions& opt = {}) {
    MurmurationReport rep;
    rep.spec = ev.spec();
    rep.E = E;
    rep.N = conductor(ev.spec().R, opt.parity_a);
    const auto table = sieve_primes(static_cast<i64>(std::floor(rep.N * E.hi)) + 1);
    rep.numerator = numerator(E, ev, rep.N, table, opt.threads);
    rep.denominator = denominator(E, ev.spec(), rep.N, table);
    rep.ratio = rep.denominator != 0.0 ? rep.numerator / rep.denominator : std::numeric_limits<double>::quiet_NaN();
    rep.nu = nu(E, opt.nu_tol);
    return rep;
}

/// Rows (t, nu([0,t]), ratio([0,t]) t sqrt(N)) over an ascending grid. Every prime
/// up to N*max(grid) is evaluated once; each row is a prefix of the same ordered
/// sums, so the output does not depend on the thread count.
inline MurmurationReport figure1(const TraceEvaluator& ev, const std::vector<double>& grid, const FigureOptions& opt = {}) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] >= 0.0) || !std::isfinite(grid[i])) throw DomainError("figure grid values must be finite and >= 0");
        if (i > 0 && !(grid[i] > grid[i - 1])) throw DomainError("figure grid must be strictly ascending");
    }
    MurmurationReport rep;
    rep.spec = ev.spec();
    rep.N = conductor(ev.spec().R, opt.parity_a);
    if (grid.empty() || grid.back() == 0.0) throw DomainError("figure grid needs a positive value");
    rep.E = IntervalE(0.0, grid.back());
    const auto table = sieve_primes(static_cast<i64>(std::floor(rep.N * grid.back())) + 1);
    const auto primes = prime_window(rep.E, rep.N, table);
    const auto terms = evaluate_primes(primes, ev, opt.threads, opt.progress);
    const double window = weyl_window(ev.spec().R, ev.spec().H);
    const double sqrtN = std::sqrt(rep.N);
    std::vector<double> nus(grid.size(), 0.0);
    parallel_for(
        grid.size(), opt.threads,
        [&](std::size_t i) {
            if (grid[i] > 0.0) nus[i] = nu(IntervalE(0.0, grid[i]), opt.nu_tol);
        },
        1);

    CompensatedSum num, logs;
    std::string failure;
    std::size_t k = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double t = grid[i];
        while (k < terms.size() && static_cast<double>(terms[k].p) <= t * rep.N) {
            if (!terms[k].error.empty()) {
                if (failure.empty()) failure = "numeric-failure at p=" + std::to_string(terms[k].p);
            } else {
                num += terms[k].log_p * terms[k].spectral;
            }
            logs += terms[k].log_p;
            ++k;
        }
        MurmurationRow row;
        row.t = t;
        row.nu = nus[i];
        row.numerator = num.value();
        row.denominator = logs.value() * window;
        if (k == 0) {
            row.status = "empty-window";
            row.lhs_scaled = std::numeric_limits<double>::quiet_NaN();
        } else {
            row.lhs_scaled = row.numerator / row.denominator * t * sqrtN;
            if (!failure.empty()) row.status = failure;
        }
        rep.rows.push_back(row);
    }
    const auto& last = rep.rows.back();
    rep.numerator = last.numerator;
    rep.denominator = last.denominator;
    rep.ratio = last.denominator != 0.0 ? last.numerator / last.denominator : std::numeric_limits<double>::quiet_NaN();
    rep.nu = last.nu;
    return rep;
}

/// Largest |D| = t^2 + 4p met by the class terms for primes p <= p_max.
inline i64 discriminant_bound(const TestFunctionSpec& spec, double p_max) {
    const double c = std::cosh(0.5 * spec.support());
    return static_cast<i64>(std::ceil(4.0 * p_max * c * c)) + 16;
}

// ---------------------------------------------------------------------------

struct Prop51Result {
    double lhs = 0.0;
    double main_term = 0.0;
    double diff = 0.0;
};

/// lhs = sum_{|t| <= t_max} L(1, psibar_t) cos(2 pi (a/q + theta) t) What(t/x),
/// main = mu(q)^2/(phi(q)^2 sigma(q)) x W(theta x).
inline Prop51Result prop51_check(i64 a, i64 q, double theta, double x, Bump bump, i64 t_max,
                                 const PrimeTable& euler_primes) {
    require_positive(q, "prop51_check q");
    if (std::gcd(a < 0 ? -a : a, q) != 1) throw DomainError("prop51_check: a and q must be coprime");
    if (!(std::abs(theta) < 1.0 / static_cast<double>(q * q))) throw DomainError("prop51_check: need |theta| < 1/q^2");
    if (!(x >= 1.0)) throw DomainError("prop51_check: need x >= 1");
    const double alpha = static_cast<double>(a) / static_cast<double>(q) + theta;
    CompensatedSum lhs;
    for (i64 t = -t_max; t <= t_max; ++t) {
        const double w = w_hat(bump, static_cast<double>(t) / x);
        if (w == 0.0) continue;
        lhs += l_one_avg_euler(t, euler_primes) * std::cos(2.0 * std::numbers::pi * alpha * static_cast<double>(t)) * w;
    }
    const auto f = factorize(q);
    const double mu = mobius_of(f);
    const double phi = static_cast<double>(euler_phi_of(f));
    const double main = mu * mu / (phi * phi * static_cast<double>(sigma1_of(f))) * x * w_eval(bump, theta * x);
    return {lhs.value(), main, lhs.value() - main};
}

}  // namespace murmur
