#pragma once

// Exact 64-bit integer primitives: sieves, multiplicative functions,
// Kronecker symbols and discriminant decomposition.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "murmur/errors.hpp"

namespace murmur {

using i64 = std::int64_t;
using u64 = std::uint64_t;

inline i64 checked_mul(i64 a, i64 b) {
    i64 r;
    if (__builtin_mul_overflow(a, b, &r)) {
        throw ResourceError("64-bit overflow in " + std::to_string(a) + " * " + std::to_string(b));
    }
    return r;
}

inline i64 checked_add(i64 a, i64 b) {
    i64 r;
    if (__builtin_add_overflow(a, b, &r)) {
        throw ResourceError("64-bit overflow in " + std::to_string(a) + " + " + std::to_string(b));
    }
    return r;
}

/// floor(sqrt(n)) for n >= 0, exact.
inline i64 isqrt(i64 n) {
    if (n < 0) throw DomainError("isqrt of negative number");
    auto r = static_cast<i64>(std::sqrt(static_cast<double>(n)));
    while (r > 0 && r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

/// Exact root when n is a perfect square (0 included), nothing otherwise.
inline std::optional<i64> perfect_square_root(i64 n) {
    if (n < 0) return std::nullopt;
    const i64 r = isqrt(n);
    if (r * r == n) return r;
    return std::nullopt;
}

inline bool is_perfect_square(i64 n) { return perfect_square_root(n).has_value(); }

// ---------------------------------------------------------------------------
// Primes

/// Default cap on sieve memory (bytes).
inline constexpr std::size_t kDefaultSieveBudget = std::size_t{1} << 31;

struct PrimeTable {
    i64 limit = 0;
    std::vector<i64> primes;  // ascending, every prime <= limit
};

inline PrimeTable sieve_primes(i64 limit, std::size_t memory_budget = kDefaultSieveBudget) {
    if (limit < 0) throw DomainError("sieve_primes: negative limit");
    // one bit per odd number plus ~8/ln(limit) bytes per entry of the output
    const double est = static_cast<double>(limit) / 16.0 +
                       (limit > 2 ? 8.0 * static_cast<double>(limit) / std::log(static_cast<double>(limit)) : 0.0);
    if (est > static_cast<double>(memory_budget)) {
        throw ResourceError("sieve_primes: limit " + std::to_string(limit) + " needs ~" +
                            std::to_string(static_cast<long long>(est)) + " bytes, budget is " +
                            std::to_string(memory_budget));
    }
    PrimeTable table{limit, {}};
    if (limit < 2) return table;
    table.primes.push_back(2);
    const i64 half = (limit - 1) / 2;  // index i <-> odd number 2i+1, i >= 1
    std::vector<bool> composite(static_cast<std::size_t>(half + 1), false);
    for (i64 i = 1; i <= half; ++i) {
        if (composite[static_cast<std::size_t>(i)]) continue;
        const i64 p = 2 * i + 1;
        table.primes.push_back(p);
        for (i64 j = (p * p - 1) / 2; j <= half; j += p) composite[static_cast<std::size_t>(j)] = true;
    }
    return table;
}

/// Prime factorisation as (p, exponent) pairs, ascending in p.
using Factorization = std::vector<std::pair<i64, int>>;

inline Factorization factorize(i64 n) {
    if (n == 0) throw DomainError("factorize(0)");
    n = n < 0 ? -n : n;
    Factorization f;
    auto take = [&](i64 p) {
        int e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        if (e > 0) f.emplace_back(p, e);
    };
    take(2);
    take(3);
    for (i64 p = 5; p * p <= n; p += 6) {
        take(p);
        take(p + 2);
    }
    if (n > 1) f.emplace_back(n, 1);
    return f;
}

/// Smallest-prime-factor table for batch factorisation of integers <= limit.
class SpfTable {
public:
    explicit SpfTable(i64 limit, std::size_t memory_budget = kDefaultSieveBudget) : limit_(limit) {
        if (limit < 1) limit_ = 1;
        if (static_cast<double>(limit_) * 4.0 > static_cast<double>(memory_budget)) {
            throw ResourceError("SpfTable: limit " + std::to_string(limit) + " exceeds memory budget");
        }
        spf_.assign(static_cast<std::size_t>(limit_ + 1), 0);
        for (i64 i = 2; i <= limit_; ++i) {
            if (spf_[static_cast<std::size_t>(i)] != 0) continue;
            spf_[static_cast<std::size_t>(i)] = static_cast<std::uint32_t>(i);
            if (i > limit_ / i) continue;
            for (i64 j = i * i; j <= limit_; j += i) {
                if (spf_[static_cast<std::size_t>(j)] == 0) spf_[static_cast<std::size_t>(j)] = static_cast<std::uint32_t>(i);
            }
        }
    }

    i64 limit() const noexcept { return limit_; }

    i64 smallest_factor(i64 n) const { return spf_[static_cast<std::size_t>(n)]; }

    /// Falls back to trial division when |n| is beyond the table.
    Factorization factorize(i64 n) const {
        if (n == 0) throw DomainError("factorize(0)");
        n = n < 0 ? -n : n;
        if (n > limit_) return murmur::factorize(n);
        Factorization f;
        while (n > 1) {
            const i64 p = spf_[static_cast<std::size_t>(n)];
            int e = 0;
            while (n % p == 0) {
                n /= p;
                ++e;
            }
            f.emplace_back(p, e);
        }
        return f;
    }

private:
    i64 limit_;
    std::vector<std::uint32_t> spf_;
};

// ---------------------------------------------------------------------------
// Multiplicative functions

inline int mobius_of(const Factorization& f) {
    for (auto [p, e] : f) {
        if (e > 1) return 0;
    }
    return (f.size() % 2 == 0) ? 1 : -1;
}

inline i64 euler_phi_of(const Factorization& f) {
    i64 r = 1;
    for (auto [p, e] : f) {
        r *= p - 1;
        for (int k = 1; k < e; ++k) r *= p;
    }
    return r;
}

inline i64 sigma1_of(const Factorization& f) {
    i64 r = 1;
    for (auto [p, e] : f) {
        i64 pk = 1, s = 1;
        for (int k = 1; k <= e; ++k) {
            pk = checked_mul(pk, p);
            s += pk;
        }
        r = checked_mul(r, s);
    }
    return r;
}

inline void require_positive(i64 n, const char* name) {
    if (n < 1) throw DomainError(std::string(name) + ": argument must be >= 1, got " + std::to_string(n));
}

inline int mobius(i64 n) {
    require_positive(n, "mobius");
    return mobius_of(factorize(n));
}

inline i64 euler_phi(i64 n) {
    require_positive(n, "euler_phi");
    return euler_phi_of(factorize(n));
}

inline i64 sigma1(i64 n) {
    require_positive(n, "sigma1");
    return sigma1_of(factorize(n));
}

/// log p when m = p^k (k >= 1), else 0.
inline double von_mangoldt(i64 m) {
    require_positive(m, "von_mangoldt");
    if (m == 1) return 0.0;
    const auto f = factorize(m);
    return f.size() == 1 ? std::log(static_cast<double>(f.front().first)) : 0.0;
}

/// Divisors of |n| in ascending order.
inline std::vector<i64> divisors_of(const Factorization& f) {
    std::vector<i64> ds{1};
    for (auto [p, e] : f) {
        const std::size_t base = ds.size();
        i64 pk = 1;
        for (int k = 1; k <= e; ++k) {
            pk *= p;
            for (std::size_t i = 0; i < base; ++i) ds.push_back(ds[i] * pk);
        }
    }
    std::sort(ds.begin(), ds.end());
    return ds;
}

inline std::vector<i64> divisors(i64 n) { return divisors_of(factorize(n)); }

/// log of prod_{k mod m} gcd(k, m), via sum_{d | m} phi(m/d) log d.
inline double log_eta(i64 m) {
    require_positive(m, "log_eta");
    double s = 0.0;
    for (i64 d : divisors(m)) {
        if (d > 1) s += static_cast<double>(euler_phi(m / d)) * std::log(static_cast<double>(d));
    }
    return s;
}

// ---------------------------------------------------------------------------
// Kronecker symbol

namespace detail {

/// Jacobi symbol (a | n) for odd n >= 1, a >= 0.
inline int jacobi_odd(u64 a, u64 n) {
    a %= n;
    int t = 1;
    while (a != 0) {
        const int tz = __builtin_ctzll(a);
        a >>= tz;
        if ((tz & 1) && ((n & 7) == 3 || (n & 7) == 5)) t = -t;
        if ((a & 3) == 3 && (n & 3) == 3) t = -t;
        std::swap(a, n);
        a %= n;
    }
    return n == 1 ? t : 0;
}

inline u64 mod_nonneg(i64 a, u64 n) {
    const i64 r = a % static_cast<i64>(n);
    return static_cast<u64>(r < 0 ? r + static_cast<i64>(n) : r);
}

}  // namespace detail

/// Kronecker symbol (a | n) with the standard extension:
/// (a|0) = [|a| = 1], (a|-1) = sign(a) (1 for a >= 0), (a|2) from a mod 8.
inline int kronecker(i64 a, i64 n) {
    if (n == 0) return (a == 1 || a == -1) ? 1 : 0;
    int result = 1;
    u64 m;
    if (n < 0) {
        if (a < 0) result = -result;
        m = static_cast<u64>(-(n + 1)) + 1;
    } else {
        m = static_cast<u64>(n);
    }
    const int twos = __builtin_ctzll(m);
    if (twos > 0) {
        if ((a & 1) == 0) return 0;
        const u64 a8 = detail::mod_nonneg(a, 8);
        if ((twos & 1) && (a8 == 3 || a8 == 5)) result = -result;
        m >>= twos;
    }
    if (m == 1) return result;
    return result * detail::jacobi_odd(detail::mod_nonneg(a, m), m);
}

// ---------------------------------------------------------------------------
// Discriminants

struct DiscriminantDecomposition {
    i64 D = 0;    // D = d * ell^2
    i64 d = 0;    // fundamental discriminant (1 when D is a square)
    i64 ell = 1;  // >= 1
};

inline bool is_discriminant(i64 D) {
    const i64 r = ((D % 4) + 4) % 4;
    return D != 0 && (r == 0 || r == 1);
}

inline DiscriminantDecomposition decompose_discriminant_from(i64 D, const Factorization& f) {
    i64 core = D < 0 ? -1 : 1;
    i64 ell = 1;
    for (auto [p, e] : f) {
        for (int k = 0; k < e / 2; ++k) ell *= p;
        if (e % 2) core *= p;
    }
    const i64 r = ((core % 4) + 4) % 4;
    if (r == 2 || r == 3) {
        core *= 4;
        ell /= 2;
    }
    return {D, core, ell};
}

inline void require_discriminant(i64 D) {
    if (!is_discriminant(D)) {
        throw DomainError("not a discriminant (need D != 0, D = 0 or 1 mod 4): " + std::to_string(D));
    }
}

inline DiscriminantDecomposition decompose_discriminant(i64 D) {
    require_discriminant(D);
    return decompose_discriminant_from(D, factorize(D));
}

inline DiscriminantDecomposition decompose_discriminant(i64 D, const SpfTable& spf) {
    require_discriminant(D);
    return decompose_discriminant_from(D, spf.factorize(D));
}

inline bool is_fundamental_discriminant(i64 d) {
    if (d == 1) return true;
    if (!is_discriminant(d)) return false;
    const auto dec = decompose_discriminant(d);
    return dec.ell == 1;
}

}  // namespace murmur
