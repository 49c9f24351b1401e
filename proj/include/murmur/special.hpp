#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "murmur/errors.hpp"

namespace murmur {

using cplx = std::complex<double>;

namespace detail {

// B_{2k} for k = 1..6
inline constexpr double kBernoulli[6] = {1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0, -691.0 / 2730.0};

inline void check_pole(cplx z, const char* what) {
    if (z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real())) {
        throw DomainError(std::string(what) + ": pole at nonpositive integer " + std::to_string(z.real()));
    }
}

}  // namespace detail

/// Complex digamma: upward recurrence to Re z >= 10, then Stirling through B_12.
inline cplx digamma(cplx z) {
    detail::check_pole(z, "digamma");
    cplx shift = 0.0;
    while (z.real() < 10.0) {
        shift -= 1.0 / z;
        z += 1.0;
    }
    const cplx inv = 1.0 / z;
    const cplx inv2 = inv * inv;
    cplx series = 0.0, pw = inv2;
    for (int k = 1; k <= 6; ++k) {
        series += detail::kBernoulli[k - 1] / (2.0 * k) * pw;
        pw *= inv2;
    }
    return shift + std::log(z) - 0.5 * inv - series;
}

/// Complex log-gamma on the same recurrence/Stirling scheme (principal branch
/// of each log; continuous along paths that avoid the negative real axis).
inline cplx log_gamma(cplx z) {
    detail::check_pole(z, "log_gamma");
    cplx shift = 0.0;
    while (z.real() < 10.0) {
        shift -= std::log(z);
        z += 1.0;
    }
    const cplx inv = 1.0 / z;
    const cplx inv2 = inv * inv;
    cplx series = 0.0, pw = inv;
    for (int k = 1; k <= 6; ++k) {
        series += detail::kBernoulli[k - 1] / (2.0 * k * (2.0 * k - 1.0)) * pw;
        pw *= inv2;
    }
    return shift + (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * std::numbers::pi) + series;
}

}  // namespace murmur
