#pragma once

// The limiting density
//   nu(E) = (6/pi^2) sum*_{q squarefree, (a,q)=1, q^2/a^2 in E} q^3 / (phi(q)^2 sigma(q) a^3)
// where terms with q^2/a^2 on an endpoint of E carry weight 1/2.

#include <algorithm>
#include <boost/math/special_functions/polygamma.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "murmur/arith.hpp"
#include "murmur/errors.hpp"
#include "murmur/sum.hpp"

namespace murmur {

struct IntervalE {
    double lo = 0.0;
    double hi = 0.0;

    IntervalE() = default;
    IntervalE(double l, double h) : lo(l), hi(h) {
        if (!(lo >= 0.0) || !(hi > lo) || !std::isfinite(hi)) {
            throw DomainError("interval E = [" + std::to_string(l) + ", " + std::to_string(h) +
                              "] must satisfy 0 <= lo < hi < inf");
        }
    }

    double length() const noexcept { return hi - lo; }
};

/// prod_p (1 - 1/(p(p+1))), the mean value of mu(q)^2 q^2 / (phi(q) sigma(q)).
inline constexpr double kCarefreeConstant = 0.7044422009991655;

namespace detail {

/// sum_{b = lo}^{hi} b^{-3} for 1 <= lo, hi possibly "infinite" (INT64_MAX).
inline double inverse_cube_range(i64 lo, i64 hi) {
    if (hi < lo) return 0.0;
    constexpr i64 kDirect = 64;
    if (hi - lo < kDirect) {
        double s = 0.0;
        for (i64 b = hi; b >= lo; --b) {
            const double bd = static_cast<double>(b);
            s += 1.0 / (bd * bd * bd);
        }
        return s;
    }
    // sum_{b >= B} b^{-3} = -psi''(B)/2
    auto tail = [](i64 B) { return -0.5 * boost::math::polygamma(2, static_cast<double>(B)); };
    if (hi == std::numeric_limits<i64>::max()) return tail(lo);
    return tail(lo) - tail(hi + 1);
}

inline bool same_ratio(i64 q, i64 a, double x) {
    if (a <= 0 || x <= 0.0) return false;
    const double r = static_cast<double>(q) * static_cast<double>(q) / (static_cast<double>(a) * static_cast<double>(a));
    return std::abs(r - x) <= 1e-14 * x;
}

/// Contribution of one squarefree q with a restricted to a <= a_cap:
/// q^3/(phi^2 sigma) * sum* a^{-3} over (a,q) = 1, q^2/a^2 in E.
inline double nu_q_term(i64 q, const Factorization& f, const IntervalE& E, i64 a_cap) {
    const double qd = static_cast<double>(q);
    // a in [a_min, a_max]:  q/sqrt(hi) <= a <= q/sqrt(lo)
    i64 a_min = std::max<i64>(1, static_cast<i64>(std::ceil(qd / std::sqrt(E.hi))) - 1);
    while (qd * qd > E.hi * static_cast<double>(a_min) * static_cast<double>(a_min) && !same_ratio(q, a_min, E.hi)) ++a_min;
    i64 a_max = a_cap;
    if (E.lo > 0.0) {
        i64 m = static_cast<i64>(std::floor(qd / std::sqrt(E.lo))) + 1;
        while (m > 0 && qd * qd < E.lo * static_cast<double>(m) * static_cast<double>(m) && !same_ratio(q, m, E.lo)) --m;
        a_max = std::min(a_max, m);
    }
    if (a_max < a_min) return 0.0;

    const auto divs = divisors_of(f);
    double inner = 0.0;
    for (i64 e : divs) {
        // mu(e) for squarefree q: (-1)^{number of prime factors of e}
        int mu = 1;
        for (auto [p, k] : f) {
            if (e % p == 0) mu = -mu;
        }
        const double ed = static_cast<double>(e);
        const i64 b_lo = (a_min + e - 1) / e;
        const i64 b_hi = a_max == std::numeric_limits<i64>::max() ? a_max : a_max / e;
        inner += mu / (ed * ed * ed) * inverse_cube_range(b_lo, b_hi);
    }
    // halve endpoint terms
    for (double x : {E.lo, E.hi}) {
        if (x <= 0.0) continue;
        const i64 a = static_cast<i64>(std::llround(qd / std::sqrt(x)));
        if (a >= a_min && a <= a_max && same_ratio(q, a, x) && std::gcd(a, q) == 1) {
            const double ad = static_cast<double>(a);
            inner -= 0.5 / (ad * ad * ad);
        }
    }
    const double phi = static_cast<double>(euler_phi_of(f));
    const double sigma = static_cast<double>(sigma1_of(f));
    return qd * qd * qd / (phi * phi * sigma) * inner;
}

}  // namespace detail

/// nu(E) truncated exactly at q <= Q and a <= A (no tail correction).
inline double nu_partial(const IntervalE& E, i64 Q, i64 A) {
    const SpfTable spf(std::max<i64>(Q, 2));
    CompensatedSum s;
    for (i64 q = 1; q <= Q; ++q) {
        const auto f = spf.factorize(q);
        if (mobius_of(f) == 0) continue;
        s += detail::nu_q_term(q, f, E, A);
    }
    return 6.0 / (std::numbers::pi * std::numbers::pi) * s.value();
}

struct NuResult {
    double value = 0.0;
    i64 q_cutoff = 0;
    double tail_estimate = 0.0;
};

/// nu(E) with every a summed exactly (Hurwitz tails) for q <= Q, and the q > Q tail
/// replaced by its asymptotic (hi - lo)/2 * sum_{q > Q} mu^2/(phi sigma)
/// = (hi - lo)/2 * (C/Q - E(Q)/Q^2), E(Q) the remainder in sum_{q<=Q} mu^2 q^2/(phi sigma) = CQ + E(Q).
/// Q grows like tol^{-2/3}; the error of the tail estimate is far below the tail itself.
inline NuResult nu_detailed(const IntervalE& E, double tol) {
    if (!(tol > 0.0)) throw DomainError("nu: tol must be positive");
    const double qd = std::clamp(2.0 * std::pow(tol, -2.0 / 3.0), 1000.0, 4.0e6);
    const i64 Q = static_cast<i64>(qd);
    const SpfTable spf(Q);
    CompensatedSum s, density;
    for (i64 q = 1; q <= Q; ++q) {
        const auto f = spf.factorize(q);
        if (mobius_of(f) == 0) continue;
        s += detail::nu_q_term(q, f, E, std::numeric_limits<i64>::max());
        const double qq = static_cast<double>(q);
        density += qq * qq / (static_cast<double>(euler_phi_of(f)) * static_cast<double>(sigma1_of(f)));
    }
    const double remainder = density.value() - kCarefreeConstant * qd;
    const double tail = 0.5 * E.length() * (kCarefreeConstant / qd - remainder / (qd * qd));
    const double scale = 6.0 / (std::numbers::pi * std::numbers::pi);
    return {scale * (s.value() + tail), Q, scale * tail};
}

inline double nu(const IntervalE& E, double tol = 1e-8) { return nu_detailed(E, tol).value; }

}  // namespace murmur
