#pragma once

// Slow, independent reference implementations. Every routine here avoids the
// fast paths it is used to check: trial division instead of sieves, Euler's
// criterion instead of quadratic reciprocity, literal products and loops
// instead of closed forms.

#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "murmur/arith.hpp"
#include "murmur/dirichlet.hpp"
#include "murmur/nu.hpp"
#include "murmur/sum.hpp"

namespace murmur::oracle {

inline bool is_prime_trial(i64 n) {
    if (n < 2) return false;
    for (i64 d = 2; d * d <= n; ++d) {
        if (n % d == 0) return false;
    }
    return true;
}

inline std::map<i64, int> factor_trial(i64 n) {
    std::map<i64, int> f;
    for (i64 d = 2; d * d <= n; ++d) {
        while (n % d == 0) {
            ++f[d];
            n /= d;
        }
    }
    if (n > 1) ++f[n];
    return f;
}

inline i64 pow_mod(i64 b, i64 e, i64 m) {
    __int128 r = 1, x = ((b % m) + m) % m;
    while (e > 0) {
        if (e & 1) r = r * x % m;
        x = x * x % m;
        e >>= 1;
    }
    return static_cast<i64>(r);
}

/// Legendre symbol by Euler's criterion a^{(p-1)/2} mod p.
inline int legendre_euler(i64 a, i64 p) {
    const i64 r = pow_mod(a, (p - 1) / 2, p);
    if (r == 0) return 0;
    return r == 1 ? 1 : -1;
}

/// Kronecker symbol from its definition: factor n, Euler's criterion at odd
/// primes, the mod-8 rule at 2, and the sign rule at -1.
inline int kronecker_brute(i64 a, i64 n) {
    if (n == 0) return (a == 1 || a == -1) ? 1 : 0;
    int result = 1;
    if (n < 0) {
        n = -n;
        if (a < 0) result = -result;
    }
    for (auto [p, k] : factor_trial(n)) {
        int s;
        if (p == 2) {
            if (a % 2 == 0) s = 0;
            else {
                const i64 r = ((a % 8) + 8) % 8;
                s = (r == 1 || r == 7) ? 1 : -1;
            }
        } else {
            s = legendre_euler(a, p);
        }
        for (int i = 0; i < k; ++i) result *= s;
    }
    return result;
}

inline int mobius_naive(i64 n) {
    int mu = 1;
    for (i64 d = 2; d <= n; ++d) {
        if (n % d != 0) continue;
        n /= d;
        if (n % d == 0) return 0;
        mu = -mu;
    }
    return mu;
}

inline i64 euler_phi_naive(i64 n) {
    i64 c = 0;
    for (i64 k = 1; k <= n; ++k) {
        if (std::gcd(k, n) == 1) ++c;
    }
    return c;
}

inline i64 sigma1_naive(i64 n) {
    i64 s = 0;
    for (i64 d = 1; d <= n; ++d) {
        if (n % d == 0) s += d;
    }
    return s;
}

/// log prod_{k=1}^{m} gcd(k, m), as a sum of logs.
inline double log_eta_product(i64 m) {
    CompensatedSum s;
    for (i64 k = 1; k <= m; ++k) s += std::log(static_cast<double>(std::gcd(k, m)));
    return s.value();
}

inline bool squarefree_trial(i64 n) {
    if (n < 0) n = -n;
    for (i64 d = 2; d * d <= n; ++d) {
        if (n % (d * d) == 0) return false;
    }
    return true;
}

inline bool fundamental_brute(i64 d) {
    const i64 r = ((d % 4) + 4) % 4;
    if (r == 1) return squarefree_trial(d);
    if (r == 0) {
        const i64 m = d / 4;
        const i64 rm = ((m % 4) + 4) % 4;
        return (rm == 2 || rm == 3) && squarefree_trial(m);
    }
    return false;
}

/// D = d ell^2 by trying every ell with ell^2 | D; exactly one quotient is fundamental
/// (d = 1 for squares).
inline DiscriminantDecomposition decompose_exhaustive(i64 D) {
    const i64 a = D < 0 ? -D : D;
    DiscriminantDecomposition out{D, 0, 0};
    int found = 0;
    for (i64 ell = 1; ell * ell <= a; ++ell) {
        if (a % (ell * ell) != 0) continue;
        const i64 d = D / (ell * ell);
        if (d == 1 || fundamental_brute(d)) {
            out.d = d;
            out.ell = ell;
            ++found;
        }
    }
    if (found != 1) throw std::logic_error("decompose_exhaustive: expected exactly one fundamental quotient");
    return out;
}

/// L(1, chi_d) from the class number formula, for the discriminants with
/// h(d) = 1 used in the checks.
inline double l_one_class_number(i64 d) {
    const double pi = std::numbers::pi;
    switch (d) {
        case 5: return 2.0 * std::log(0.5 * (1.0 + std::sqrt(5.0))) / std::sqrt(5.0);
        case 8: return 2.0 * std::log(1.0 + std::sqrt(2.0)) / std::sqrt(8.0);
        case 12: return 2.0 * std::log(2.0 + std::sqrt(3.0)) / std::sqrt(12.0);
        case 13: return 2.0 * std::log(0.5 * (3.0 + std::sqrt(13.0))) / std::sqrt(13.0);
        case -3: return 2.0 * pi / (6.0 * std::sqrt(3.0));
        case -4: return 2.0 * pi / (4.0 * 2.0);
        case -7: return 2.0 * pi / (2.0 * std::sqrt(7.0));
        case -8: return 2.0 * pi / (2.0 * std::sqrt(8.0));
        default: break;
    }
    throw std::invalid_argument("l_one_class_number: no tabulated value for d = " + std::to_string(d));
}

/// sum psi_D(n)/n, Cesaro-averaged: the mean of the partial sums S_k for X/2 < k <= X.
inline double l_one_direct(i64 D, i64 X) {
    const auto dec = decompose_exhaustive(D);
    CompensatedSum partial, mean;
    for (i64 n = 1; n <= X; ++n) {
        const i64 g = std::gcd(n, dec.ell);
        partial += kronecker(dec.d, n / g) / static_cast<double>(n);
        if (n > X / 2) mean += partial.value();
    }
    return mean.value() / static_cast<double>(X - X / 2);
}

/// nu(E) by enumerating every pair q <= Q, a <= A with exact endpoint tests.
inline double nu_brute(const IntervalE& E, i64 Q, i64 A) {
    CompensatedSum s;
    for (i64 q = 1; q <= Q; ++q) {
        if (!squarefree_trial(q)) continue;
        const auto f = factor_trial(q);
        double phi = 1.0, sigma = 1.0;
        for (auto [p, k] : f) {
            phi *= static_cast<double>(p - 1);
            sigma *= static_cast<double>(p + 1);
        }
        const double w = static_cast<double>(q) * static_cast<double>(q) * static_cast<double>(q) / (phi * phi * sigma);
        const double q2 = static_cast<double>(q) * static_cast<double>(q);
        for (i64 a = 1; a <= A; ++a) {
            const double a2 = static_cast<double>(a) * static_cast<double>(a);
            if (q2 > E.hi * a2) continue;
            if (q2 < E.lo * a2) break;
            if (std::gcd(a, q) != 1) continue;
            const double weight = (q2 == E.hi * a2 || q2 == E.lo * a2) ? 0.5 : 1.0;
            const double ad = static_cast<double>(a);
            s += weight * w / (ad * ad * ad);
        }
    }
    return 6.0 / (std::numbers::pi * std::numbers::pi) * s.value();
}

/// Five-point central difference.
template <class F>
double derivative(F&& f, double x, double step) {
    return (f(x - 2 * step) - 8.0 * f(x - step) + 8.0 * f(x + step) - f(x + 2 * step)) / (12.0 * step);
}

}  // namespace murmur::oracle
