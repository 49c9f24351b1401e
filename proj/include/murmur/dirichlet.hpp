#pragma once

// Quadratic characters psi_D, the values L(1, psi_d) and L(1, psi_D), the
// averaged characters psibar_t, and a persistent thread-safe cache of L-values.

#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>
#include <optional>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "murmur/arith.hpp"
#include "murmur/chebyshev.hpp"
#include "murmur/errors.hpp"
#include "murmur/sum.hpp"

namespace murmur {

struct CharacterPsiD {
    DiscriminantDecomposition dec;

    explicit CharacterPsiD(i64 D) : dec(decompose_discriminant(D)) {}
    explicit CharacterPsiD(const DiscriminantDecomposition& d) : dec(d) {}
};

/// psi_D(n) = (d | n / gcd(n, ell)).
inline int psi_D_eval(const DiscriminantDecomposition& dec, i64 n) {
    if (n == 0) throw DomainError("psi_D_eval: n must be nonzero");
    const i64 g = std::gcd(n < 0 ? -n : n, dec.ell);
    return kronecker(dec.d, n / g);
}

inline int psi_D_eval(const CharacterPsiD& chi, i64 n) { return psi_D_eval(chi.dec, n); }

// ---------------------------------------------------------------------------
// L(1, psi_d) for fundamental d
//
// From the theta-function functional equation at s = 1:
//   L(1, chi_d) = |d|^{-1/2} sum_{n>=1} chi_d(n) Phi(n sqrt(pi/|d|))
// with
//   Phi(x) = sqrt(pi) erfc(x)/x + E1(x^2)             (d > 0)
//   Phi(x) = pi erfc(x) + sqrt(pi) exp(-x^2)/x          (d < 0).
// Phi is positive and decreasing, so with spacing sqrt(pi/|d|) the tail past
// x_N is at most pi^{-1/2} int_{x_N}^inf Phi, and
//   int_X^inf Phi <= exp(-X^2)/X^3          (d > 0)
//   int_X^inf Phi <= sqrt(pi) exp(-X^2)/X^2 (d < 0).
// The sum stops at the first X where that bound is below target_eps / 2.

namespace detail {

inline double phi_even_exact(double x) {
    return std::sqrt(std::numbers::pi) * std::erfc(x) / x - std::expint(-x * x);
}

inline double phi_odd_exact(double x) {
    return std::numbers::pi * std::erfc(x) + std::sqrt(std::numbers::pi) * std::exp(-x * x) / x;
}

inline constexpr double kPhiSmall = 1e-3;
inline constexpr double kPhiMid = 0.25;
inline constexpr double kPhiMax = 7.5;

/// Phi tabulated on [kPhiMid, kPhiMax] in x and on [kPhiSmall, kPhiMid] in log x.
class PhiTable {
public:
    template <class F>
    explicit PhiTable(F f)
        : outer_(f, kPhiMid, kPhiMax, 96, 15),
          inner_([&](double s) { return f(std::exp(s)); }, std::log(kPhiSmall), std::log(kPhiMid), 24, 15),
          exact_(f) {}

    double operator()(double x) const {
        if (x >= kPhiMid) return x >= kPhiMax ? exact_(x) : outer_(x);
        if (x >= kPhiSmall) return inner_(std::log(x));
        return exact_(x);
    }

private:
    PiecewiseChebyshev outer_, inner_;
    double (*exact_)(double);
};

inline const PhiTable& phi_even_table() {
    static const PhiTable t(&phi_even_exact);
    return t;
}

inline const PhiTable& phi_odd_table() {
    static const PhiTable t(&phi_odd_exact);
    return t;
}

/// Smallest X with pi^{-1/2} * tail_integral(X) <= eps.
inline double phi_cutoff(bool odd, double eps) {
    auto bound = [odd](double X) {
        const double e = std::exp(-X * X);
        return odd ? e / (X * X) : e / (X * X * X * std::sqrt(std::numbers::pi));
    };
    double lo = 0.5, hi = kPhiMax;
    if (bound(hi) > eps) return hi;
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (bound(mid) > eps ? lo : hi) = mid;
    }
    return hi;
}

/// Shared smallest-prime-factor table for character evaluation.
inline const SpfTable& character_spf() {
    static const SpfTable t(i64{1} << 20);
    return t;
}

}  // namespace detail

/// Number of character terms used for L(1, chi_d) at the given accuracy.
inline i64 l_one_terms(i64 d, double target_eps) {
    const double X = detail::phi_cutoff(d < 0, 0.5 * target_eps);
    const double ad = static_cast<double>(d < 0 ? -d : d);
    return static_cast<i64>(std::ceil(X * std::sqrt(ad / std::numbers::pi)));
}

inline double l_one_fundamental(i64 d, double target_eps = 1e-6) {
    if (d == 1) throw DomainError("l_one_fundamental: d = 1 gives zeta(1), which diverges");
    if (!(target_eps > 0.0)) throw DomainError("l_one_fundamental: target_eps must be positive");
    if (!is_fundamental_discriminant(d)) {
        throw DomainError("l_one_fundamental: " + std::to_string(d) + " is not a fundamental discriminant");
    }
    const bool odd = d < 0;
    const double ad = static_cast<double>(odd ? -d : d);
    const double step = std::sqrt(std::numbers::pi / ad);
    const i64 N = l_one_terms(d, target_eps);
    const auto& phi = odd ? detail::phi_odd_table() : detail::phi_even_table();
    const auto& spf = detail::character_spf();

    thread_local std::vector<signed char> chi;
    chi.assign(static_cast<std::size_t>(N + 1), 0);
    CompensatedSum sum;
    for (i64 n = 1; n <= N; ++n) {
        int c;
        if (n == 1) {
            c = 1;
        } else if (n <= spf.limit()) {
            const i64 p = spf.smallest_factor(n);
            c = (p == n) ? kronecker(d, n) : chi[static_cast<std::size_t>(p)] * chi[static_cast<std::size_t>(n / p)];
        } else {
            c = kronecker(d, n);
        }
        chi[static_cast<std::size_t>(n)] = static_cast<signed char>(c);
        if (c != 0) sum += c * phi(static_cast<double>(n) * step);
    }
    return sum.value() / std::sqrt(ad);
}

/// (1/ell) prod_{p^a || ell} [1 + (p - psi_d(p)) (p^a - 1)/(p - 1)].
inline double l_one_ell_factor(const DiscriminantDecomposition& dec) {
    double f = 1.0 / static_cast<double>(dec.ell);
    for (auto [p, a] : factorize(dec.ell)) {
        double pa = 1.0;
        for (int k = 0; k < a; ++k) pa *= static_cast<double>(p);
        f *= 1.0 + (static_cast<double>(p) - kronecker(dec.d, p)) * (pa - 1.0) / (static_cast<double>(p) - 1.0);
    }
    return f;
}

// ---------------------------------------------------------------------------
// Cache

/// Map fundamental discriminant -> L(1, psi_d) at one declared accuracy.
/// Concurrent readers; each missing key is computed once even under contention.
class LValueCache {
public:
    static constexpr const char* kHeader = "# murmur-lvalue-cache v1";

    explicit LValueCache(double eps = 1e-4) : eps_(eps) {
        if (!(eps > 0.0)) throw DomainError("LValueCache: eps must be positive");
    }

    LValueCache(const LValueCache&) = delete;
    LValueCache& operator=(const LValueCache&) = delete;

    double eps() const noexcept { return eps_; }

    std::optional<double> find(i64 d) const {
        const auto& sh = shard(d);
        std::shared_lock lock(sh.mutex);
        const auto it = sh.values.find(d);
        if (it == sh.values.end()) return std::nullopt;
        return it->second;
    }

    double get(i64 d) {
        auto& sh = shard(d);
        {
            std::shared_lock lock(sh.mutex);
            const auto it = sh.values.find(d);
            if (it != sh.values.end()) {
                hits_.fetch_add(1, std::memory_order_relaxed);
                return it->second;
            }
        }
        std::promise<double> promise;
        std::shared_future<double> future;
        bool owner = false;
        {
            std::unique_lock lock(sh.mutex);
            const auto it = sh.values.find(d);
            if (it != sh.values.end()) return it->second;
            const auto pit = sh.pending.find(d);
            if (pit != sh.pending.end()) {
                future = pit->second;
            } else {
                future = promise.get_future().share();
                sh.pending.emplace(d, future);
                owner = true;
            }
        }
        if (!owner) return future.get();
        try {
            const double v = l_one_fundamental(d, eps_);
            misses_.fetch_add(1, std::memory_order_relaxed);
            {
                std::unique_lock lock(sh.mutex);
                sh.values.emplace(d, v);
                sh.pending.erase(d);
            }
            promise.set_value(v);
            return v;
        } catch (...) {
            {
                std::unique_lock lock(sh.mutex);
                sh.pending.erase(d);
            }
            promise.set_exception(std::current_exception());
            throw;
        }
    }

    /// Overwrites an entry. Intended for loading and for fault-injection tests.
    void insert(i64 d, double value) {
        auto& sh = shard(d);
        std::unique_lock lock(sh.mutex);
        sh.values[d] = value;
    }

    std::size_t size() const {
        std::size_t n = 0;
        for (const auto& sh : shards_) {
            std::shared_lock lock(sh.mutex);
            n += sh.values.size();
        }
        return n;
    }

    std::size_t hits() const noexcept { return hits_.load(); }
    std::size_t misses() const noexcept { return misses_.load(); }

    /// All entries sorted by d.
    std::map<i64, double> snapshot() const {
        std::map<i64, double> out;
        for (const auto& sh : shards_) {
            std::shared_lock lock(sh.mutex);
            out.insert(sh.values.begin(), sh.values.end());
        }
        return out;
    }

    /// Loads rows whose eps matches this cache's eps exactly; other rows are
    /// kept aside and written back by save(). Returns the number of rows used.
    std::size_t load(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) return 0;
        std::string line;
        std::size_t lineno = 1;
        if (!std::getline(in, line) || line != kHeader) {
            throw ParseError("cache file " + path.string() + ": missing header '" + kHeader + "'", 1, "line");
        }
        std::size_t used = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            long long d = 0;
            double value = 0.0, eps = 0.0;
            char tail = 0;
            if (std::sscanf(line.c_str(), "%lld,%lf,%lf%c", &d, &value, &eps, &tail) != 3) {
                throw ParseError("cache file " + path.string() + ": malformed row '" + line + "'", lineno, "line");
            }
            if (d == 1 || !is_fundamental_discriminant(d)) {
                throw ParseError("cache file " + path.string() + ": key " + std::to_string(d) +
                                     " is not a fundamental discriminant",
                                 lineno, "line");
            }
            if (eps == eps_) {
                insert(d, value);
                ++used;
            } else {
                foreign_.push_back(line);
            }
        }
        return used;
    }

    /// Writes every entry (plus preserved rows at other precisions) through a
    /// temporary file and an atomic rename.
    void save(const std::filesystem::path& path) const {
        const auto tmp = path.string() + ".tmp";
        {
            std::FILE* f = std::fopen(tmp.c_str(), "w");
            if (!f) throw ResourceError("cannot write cache file " + tmp);
            std::fprintf(f, "%s\n", kHeader);
            for (const auto& row : foreign_) std::fprintf(f, "%s\n", row.c_str());
            for (const auto& [d, v] : snapshot()) {
                std::fprintf(f, "%lld,%.17g,%.17g\n", static_cast<long long>(d), v, eps_);
            }
            if (std::fclose(f) != 0) throw ResourceError("failed to flush cache file " + tmp);
        }
        std::filesystem::rename(tmp, path);
    }

private:
    struct Shard {
        mutable std::shared_mutex mutex;
        std::unordered_map<i64, double> values;
        std::unordered_map<i64, std::shared_future<double>> pending;
    };

    static constexpr std::size_t kShards = 64;

    Shard& shard(i64 d) { return shards_[static_cast<std::size_t>(static_cast<u64>(d) % kShards)]; }
    const Shard& shard(i64 d) const { return shards_[static_cast<std::size_t>(static_cast<u64>(d) % kShards)]; }

    double eps_;
    std::array<Shard, kShards> shards_;
    std::vector<std::string> foreign_;
    std::atomic<std::size_t> hits_{0}, misses_{0};
};

/// L(1, psi_D) for a nonsquare discriminant D, through the cache.
inline double l_one_general(i64 D, LValueCache& cache) {
    const auto dec = decompose_discriminant(D);
    if (dec.d == 1) throw DomainError("l_one_general: D = " + std::to_string(D) + " is a perfect square");
    return cache.get(dec.d) * l_one_ell_factor(dec);
}

inline double l_one_general(i64 D, LValueCache& cache, const SpfTable& spf) {
    const auto dec = decompose_discriminant(D, spf);
    if (dec.d == 1) throw DomainError("l_one_general: D = " + std::to_string(D) + " is a perfect square");
    return cache.get(dec.d) * l_one_ell_factor(dec);
}

// ---------------------------------------------------------------------------
// Averaged characters psibar_t(m) = phi(m^2)^{-1} sum_{n mod m^2, (n,m)=1} psi_{t^2+4n}(m)

/// Integer numerator of psibar_t(m) over phi(m^2), by direct enumeration of
/// n = 1..m^2. sign = +1 uses D = t^2 + 4n, sign = -1 uses D = t^2 - 4n with n
/// shifted by a multiple of m^2 so that D < 0.
inline i64 psi_bar_t_numerator(i64 t, i64 m, int sign = +1) {
    require_positive(m, "psi_bar_t");
    if (m == 1) return 1;
    const i64 m2 = checked_mul(m, m);
    const i64 shift = sign > 0 ? 0 : m2 * (t * t / (4 * m2) + 1);
    i64 total = 0;
    for (i64 n = 1; n <= m2; ++n) {
        if (std::gcd(n, m) != 1) continue;
        const i64 D = sign > 0 ? t * t + 4 * n : t * t - 4 * (n + shift);
        total += psi_D_eval(decompose_discriminant(D), m);
    }
    return total;
}

inline double psi_bar_t(i64 t, i64 m) {
    require_positive(m, "psi_bar_t");
    if (m == 1) return 1.0;
    return static_cast<double>(psi_bar_t_numerator(t, m)) / static_cast<double>(euler_phi(m) * m);
}

/// Local factor psibar_t(p^k) in closed form (k >= 1).
inline double psi_bar_local(i64 t, i64 p, int k) {
    if (p == 2) {
        if (t % 2 != 0) return (k % 2 == 0) ? 1.0 : -1.0;
        if (t % 4 == 0) return (k % 2 == 1) ? 0.5 : 0.0;
        double v = std::ldexp(1.0, -(2 * k - 1));
        for (int j = 2; j <= 2 * k - 1; j += 2) {
            double val;
            if (j == 2 * k - 2) {
                val = 0.5;
            } else {
                val = ((k - j / 2 - 1) % 2 == 0) ? 0.5 : 0.0;
            }
            v += std::ldexp(val, -j);
        }
        return v;
    }
    if (t % p == 0) return (k % 2 == 0) ? 1.0 : 0.0;
    const double pd = static_cast<double>(p);
    double v = ((k % 2 == 0) ? (pd - 2.0) : -1.0) / (pd - 1.0);
    for (int j = 2; j <= 2 * k - 1; j += 2) {
        if ((k - j / 2) % 2 == 0) v += std::pow(pd, -j);
    }
    v += 1.0 / (std::pow(pd, 2 * k - 1) * (pd - 1.0));
    return v;
}

/// psibar_t(m) through multiplicativity and the local factors.
inline double psi_bar_fast(i64 t, i64 m) {
    require_positive(m, "psi_bar_fast");
    double v = 1.0;
    for (auto [p, k] : factorize(m)) v *= psi_bar_local(t, p, k);
    return v;
}

/// Values psibar_t(m) for m = 0..M (entry 0 unused).
inline std::vector<double> psi_bar_table(i64 t, i64 M) {
    std::vector<double> f(static_cast<std::size_t>(M + 1), 0.0);
    if (M >= 1) f[1] = 1.0;
    const SpfTable spf(std::max<i64>(M, 2));
    for (i64 m = 2; m <= M; ++m) {
        const i64 p = spf.smallest_factor(m);
        i64 r = m;
        int k = 0;
        while (r % p == 0) {
            r /= p;
            ++k;
        }
        f[static_cast<std::size_t>(m)] = f[static_cast<std::size_t>(r)] * psi_bar_local(t, p, k);
    }
    return f;
}

/// Cesaro-smoothed L(1, psibar_t): the mean of the partial sums S_k over M/2 < k <= M.
inline double l_one_avg(i64 t, i64 M) {
    require_positive(M, "l_one_avg");
    const auto f = psi_bar_table(t, M);
    CompensatedSum partial, mean;
    i64 count = 0;
    for (i64 m = 1; m <= M; ++m) {
        partial += f[static_cast<std::size_t>(m)] / static_cast<double>(m);
        if (2 * m > M) {
            mean += partial.value();
            ++count;
        }
    }
    return mean.value() / static_cast<double>(count);
}

/// L(1, psibar_t) through its Euler product, truncated at primes <= P.
/// The series is absolutely convergent and the product tail is O(1/(P log P)),
/// much smaller than the O(M^{-1/2}) error of the truncated series when t has
/// many square factors.
inline double l_one_avg_euler(i64 t, const PrimeTable& primes) {
    double log_prod = 0.0;
    for (i64 p : primes.primes) {
        const double pd = static_cast<double>(p);
        double local = 1.0, pk = 1.0;
        for (int k = 1; k < 64; ++k) {
            pk /= pd;
            if (pk < 1e-18) break;
            local += psi_bar_local(t, p, k) * pk;
        }
        log_prod += std::log(local);
    }
    return std::exp(log_prod);
}

}  // namespace murmur
