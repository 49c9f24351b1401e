#pragma once

// Externally exported Maass-form data: spectral parameters, parities and Hecke
// coefficients, read from {"forms": [{"r": .., "parity": .., "a": {"2": .., ...}}]}
// or from the bare array.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include <json.hpp>

#include "murmur/arith.hpp"
#include "murmur/errors.hpp"
#include "murmur/quadrature.hpp"
#include "murmur/sum.hpp"
#include "murmur/testfn.hpp"

namespace murmur {

struct EigenRecord {
    double r = 0.0;
    int parity = 1;
    std::map<i64, double> coeffs;  // n -> a(n), with a(1) = 1

    double coefficient(i64 n) const {
        const auto it = coeffs.find(n);
        if (it == coeffs.end()) {
            throw DomainError("eigen record r = " + std::to_string(r) + " has no coefficient a(" + std::to_string(n) + ")");
        }
        return it->second;
    }
};

inline std::vector<EigenRecord> parse_eigen_table(const nlohmann::json& doc) {
    const bool bare = doc.is_array();
    if (!bare && (!doc.is_object() || !doc.contains("forms") || !doc["forms"].is_array())) {
        throw ParseError("eigen table: top level must be an array or an object with a \"forms\" array", 0);
    }
    const auto& forms = bare ? doc : doc["forms"];
    std::vector<EigenRecord> out;
    std::size_t idx = 0;
    for (const auto& form : forms) {
        auto fail = [&](const std::string& msg) { throw ParseError("eigen table: " + msg, idx); };
        if (!form.is_object()) fail("form is not an object");
        if (!form.contains("r") || !form["r"].is_number()) fail("missing numeric field \"r\"");
        if (!form.contains("parity") || !form["parity"].is_number_integer()) fail("missing integer field \"parity\"");
        if (!form.contains("a") || !form["a"].is_object()) fail("missing object field \"a\"");

        EigenRecord rec;
        rec.r = form["r"].get<double>();
        if (!(rec.r > 0.0) || !std::isfinite(rec.r)) fail("r must be positive");
        const auto parity = form["parity"].get<long long>();
        if (parity != 1 && parity != -1) fail("parity must be +1 or -1");
        rec.parity = static_cast<int>(parity);
        for (const auto& [key, value] : form["a"].items()) {
            std::size_t used = 0;
            long long n = 0;
            try {
                n = std::stoll(key, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != key.size() || n < 1) fail("coefficient key \"" + key + "\" is not a positive integer");
            if (!value.is_number()) fail("coefficient a(" + key + ") is not a number");
            const double a = value.get<double>();
            if (!std::isfinite(a) || std::abs(a) > 10.0) fail("coefficient a(" + key + ") outside the sanity range |a| <= 10");
            rec.coeffs[n] = a;
        }
        const auto one = rec.coeffs.find(1);
        if (one == rec.coeffs.end()) {
            rec.coeffs[1] = 1.0;
        } else if (one->second != 1.0) {
            fail("a(1) must equal 1");
        }
        if (!out.empty()) {
            if (std::abs(rec.r - out.back().r) <= 1e-9) fail("duplicate r = " + std::to_string(rec.r));
            if (rec.r < out.back().r) fail("r values must be ascending");
        }
        out.push_back(std::move(rec));
        ++idx;
    }
    return out;
}

inline std::vector<EigenRecord> load_eigen_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ResourceError("cannot open eigen table " + path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("eigen table " + path + ": malformed JSON: " + e.what(), e.byte, "byte");
    }
    return parse_eigen_table(doc);
}

/// d/dT of the Weyl main term, clamped at zero for small T.
inline double weyl_density(double T) {
    const double d = T / 6.0 - 2.0 * (std::log(T) + 1.0) / std::numbers::pi +
                     (2.0 - std::log(2.0) + std::log(std::numbers::pi)) / std::numbers::pi;
    return std::max(0.0, d);
}

struct DirectSpectralSum {
    double value = 0.0;
    double truncation_mass = 0.0;
    std::string status = "ok";
};

/// Sum over the records of F(r/2pi) a(n), with a(-m) = parity * a(m). The
/// truncation mass integrates |F(r/2pi)| against the Weyl density beyond the
/// largest tabulated r.
inline DirectSpectralSum direct_spectral_sum(i64 n, const TestFunctionSpec& spec, const std::vector<EigenRecord>& records,
                                             double budget = 1e-3) {
    if (n == 0) throw DomainError("direct_spectral_sum needs n != 0");
    spec.validate();
    const i64 m = n < 0 ? -n : n;
    DirectSpectralSum out;
    CompensatedSum s;
    for (const auto& rec : records) {
        const double a = rec.coefficient(m) * (n < 0 ? rec.parity : 1);
        s += f_eval(spec, rec.r / (2.0 * std::numbers::pi)) * a;
    }
    out.value = s.value();

    const double r_top = spec.R + spec.H + 100.0 * std::numbers::pi * spec.h;
    const double r_lo = records.empty() ? 1.0 : records.back().r;
    if (r_lo < r_top) {
        QuadratureSpec qs;
        qs.max_panel = std::max(1.0, spec.h);
        out.truncation_mass = quad_fixed(
            [&](double r) { return std::abs(f_eval(spec, r / (2.0 * std::numbers::pi))) * weyl_density(r); },
            r_lo, r_top, qs);
    }
    if (records.empty()) out.status = "warning: empty table";
    else if (out.truncation_mass > budget) out.status = "warning: truncation mass exceeds budget";
    return out;
}

}  // namespace murmur
