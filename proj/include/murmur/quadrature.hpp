#pragma once

// Composite Gauss-Legendre quadrature with oscillation-aware panel widths,
// plus helpers for the two endpoint singularities that show up in the
// trace formula: 1/sinh(u/2) (removable after pairing) and log(2 sinh(u/2)).

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "murmur/errors.hpp"
#include "murmur/sum.hpp"

namespace murmur {

struct GaussLegendreRule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;
};

/// n-point rule by Newton iteration on P_n.
inline GaussLegendreRule make_gauss_legendre(int n) {
    GaussLegendreRule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[static_cast<std::size_t>(i)] = -x;
        rule.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
        rule.weights[static_cast<std::size_t>(i)] = w;
        rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
    }
    return rule;
}

/// Shared rule for the common point counts (built once, immutable).
inline const GaussLegendreRule& gauss_legendre(int n) {
    static const std::array<GaussLegendreRule, 4> rules{make_gauss_legendre(8), make_gauss_legendre(16),
                                                       make_gauss_legendre(24), make_gauss_legendre(32)};
    switch (n) {
        case 8: return rules[0];
        case 16: return rules[1];
        case 24: return rules[2];
        case 32: return rules[3];
        default: break;
    }
    thread_local std::vector<GaussLegendreRule> extra;
    for (const auto& r : extra) {
        if (static_cast<int>(r.nodes.size()) == n) return r;
    }
    extra.push_back(make_gauss_legendre(n));
    return extra.back();
}

struct QuadratureSpec {
    double osc_freq = 0.0;  // dominant angular frequency of the integrand
    int panel_rule = 16;    // Gauss-Legendre points per panel
    double abs_eps = 1e-10;
    double rel_eps = 1e-12;  // also accept |change| <= rel_eps * |estimate|
    double max_panel = 0.0;  // optional extra cap on panel width (0 = none)
    int max_refinements = 10;

    /// Widest panel allowed: a quarter period of the dominant oscillation.
    double panel_cap() const {
        double cap = max_panel > 0.0 ? max_panel : HUGE_VAL;
        if (osc_freq > 0.0) cap = std::min(cap, 0.25 * 2.0 * std::numbers::pi / osc_freq);
        return cap;
    }
};

/// Fixed composite rule: `panels` equal panels of an n-point rule.
template <class F>
double gl_panels(F&& f, double a, double b, long panels, int rule_points = 16) {
    if (b <= a || panels <= 0) return 0.0;
    const auto& rule = gauss_legendre(rule_points);
    const double width = (b - a) / static_cast<double>(panels);
    const double half = 0.5 * width;
    CompensatedSum total;
    for (long k = 0; k < panels; ++k) {
        const double mid = a + (static_cast<double>(k) + 0.5) * width;
        double s = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * f(mid + half * rule.nodes[i]);
        total += s * half;
    }
    return total.value();
}

inline long panels_for(double a, double b, const QuadratureSpec& qs) {
    const double cap = qs.panel_cap();
    if (!std::isfinite(cap)) return 1;
    return std::max(1L, static_cast<long>(std::ceil((b - a) / cap)));
}

/// Fixed-cost integral with panel width from the spec. Used in hot loops.
template <class F>
double quad_fixed(F&& f, double a, double b, const QuadratureSpec& qs) {
    if (b <= a) return 0.0;
    return gl_panels(f, a, b, panels_for(a, b, qs), qs.panel_rule);
}

/// Composite Gauss-Legendre with panel doubling until two successive
/// estimates agree to abs_eps (or rel_eps relative). Throws NumericError at the refinement cap.
template <class F>
double quad(F&& f, double a, double b, const QuadratureSpec& qs) {
    if (a > b) throw DomainError("quad: a > b");
    if (a == b) return 0.0;
    long panels = panels_for(a, b, qs);
    double prev = gl_panels(f, a, b, panels, qs.panel_rule);
    for (int r = 0; r < qs.max_refinements; ++r) {
        panels *= 2;
        const double cur = gl_panels(f, a, b, panels, qs.panel_rule);
        if (std::abs(cur - prev) <= std::max(qs.abs_eps, qs.rel_eps * std::abs(cur))) return cur;
        prev = cur;
        if (!std::isfinite(cur)) break;
    }
    throw NumericError("quad: no convergence on [" + std::to_string(a) + ", " + std::to_string(b) + "]", prev,
                       gl_panels(f, a, b, panels * 2, qs.panel_rule));
}

/// Integral over [a, b] of an integrand with an integrable log singularity at a.
/// [a, a + delta] is mapped by u = a + e^v (v down to log(floor)), the rest is
/// integrated normally.
template <class F>
double quad_log_endpoint(F&& f, double a, double b, const QuadratureSpec& qs, double delta = 1e-3,
                         double floor = 1e-30) {
    if (b <= a) return 0.0;
    const double split = std::min(b, a + delta);
    const double vlo = std::log(floor), vhi = std::log(split - a);
    QuadratureSpec inner = qs;
    inner.osc_freq = 0.0;
    inner.max_panel = 0.5;
    auto g = [&](double v) {
        const double e = std::exp(v);
        return f(a + e) * e;
    };
    double total = quad(g, vlo, vhi, inner);
    if (split < b) total += quad(f, split, b, qs);
    return total;
}

}  // namespace murmur
