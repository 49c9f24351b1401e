#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "murmur/murmur.hpp"

namespace {

using namespace murmur;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitData = 4;

enum class Format { csv, json };

struct RunConfig {
    double R = 3000.0;
    double H = 100.0;
    double h = 15.0;
    std::string bump = "autocorr";
    double l_eps = 1e-4;
    double quad_eps = 1e-10;
    unsigned threads = 1;
    std::string cache_path;
    std::string output;
    std::string format = "csv";
    int parity_a = 0;
    std::string eigen_table;

    std::vector<double> E;
    std::vector<double> grid;
    double tol = 1e-8;

    std::optional<long long> p;
    std::vector<long long> p_range;
    std::optional<long long> n;

    std::vector<std::string> only;

    TestFunctionSpec spec() const {
        TestFunctionSpec s{R, H, h, parse_bump(bump), quad_eps};
        s.validate();
        return s;
    }

    Format fmt() const {
        if (format == "csv") return Format::csv;
        if (format == "json") return Format::json;
        throw DomainError("--format must be csv or json (got " + format + ")");
    }
};

std::vector<double> expand_grid(const std::vector<double>& g) {
    if (g.size() != 3) throw DomainError("--grid takes start stop step");
    const double a = g[0], b = g[1], step = g[2];
    if (!(step > 0.0) || !(b >= a)) throw DomainError("--grid needs step > 0 and stop >= start");
    const auto count = static_cast<long>(std::floor((b - a) / step + 1e-9)) + 1;
    std::vector<double> out;
    for (long k = 0; k < count; ++k) out.push_back(std::round((a + static_cast<double>(k) * step) * 1e9) / 1e9);
    return out;
}

std::string num(double x) {
    if (std::isnan(x)) return "nan";
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::string fixed3(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.3f", x);
    return buf;
}

/// Rows of named columns, written as CSV or as a JSON array of objects.
class Table {
public:
    explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    void add(std::vector<std::string> cells) { rows_.push_back(std::move(cells)); }

    void write(std::ostream& out, Format f) const {
        if (f == Format::csv) {
            for (std::size_t i = 0; i < columns_.size(); ++i) out << (i ? "," : "") << columns_[i];
            out << '\n';
            for (const auto& r : rows_) {
                for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
                out << '\n';
            }
            return;
        }
        auto doc = nlohmann::json::array();
        for (const auto& r : rows_) {
            nlohmann::json obj;
            for (std::size_t i = 0; i < r.size(); ++i) {
                char* end = nullptr;
                const long long k = std::strtoll(r[i].c_str(), &end, 10);
                if (!r[i].empty() && end && *end == '\0') {
                    obj[columns_[i]] = k;
                    continue;
                }
                const double v = std::strtod(r[i].c_str(), &end);
                if (!r[i].empty() && end && *end == '\0' && std::isfinite(v)) obj[columns_[i]] = v;
                else if (r[i] == "nan") obj[columns_[i]] = nullptr;
                else obj[columns_[i]] = r[i];
            }
            doc.push_back(obj);
        }
        out << doc.dump(2) << '\n';
    }

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
};

void emit(const Table& t, const RunConfig& cfg) {
    const Format f = cfg.fmt();
    if (cfg.output.empty()) {
        t.write(std::cout, f);
        return;
    }
    std::ofstream out(cfg.output);
    if (!out) throw ResourceError("cannot write " + cfg.output);
    t.write(out, f);
}

std::string cache_path(const RunConfig& cfg) {
    if (!cfg.cache_path.empty()) return cfg.cache_path;
    if (const char* env = std::getenv("MURMUR_CACHE")) return env;
    return {};
}

struct CacheSession {
    LValueCache cache;
    std::string path;

    explicit CacheSession(const RunConfig& cfg) : cache(cfg.l_eps), path(cache_path(cfg)) {
        if (!path.empty() && std::filesystem::exists(path)) {
            const auto n = cache.load(path);
            std::cerr << "cache: loaded " << n << " entries from " << path << '\n';
        }
    }

    void save() const {
        if (path.empty()) return;
        cache.save(path);
        std::cerr << "cache: " << cache.size() << " entries saved to " << path << " (hits " << cache.hits()
                  << ", misses " << cache.misses() << ")\n";
    }
};

int cmd_nu(const RunConfig& cfg) {
    if (!(cfg.tol > 0.0)) throw DomainError("--tol must be positive");
    if (!cfg.E.empty()) {
        if (cfg.E.size() != 2) throw DomainError("--E takes lo hi");
        const IntervalE E(cfg.E[0], cfg.E[1]);
        Table t({"lo", "hi", "nu"});
        t.add({num(E.lo), num(E.hi), num(nu(E, cfg.tol))});
        emit(t, cfg);
        return kExitOk;
    }
    const auto grid = expand_grid(cfg.grid.empty() ? std::vector<double>{0.1, 2.0, 0.1} : cfg.grid);
    std::vector<double> values(grid.size(), 0.0);
    parallel_for(
        grid.size(), cfg.threads,
        [&](std::size_t i) {
            if (grid[i] > 0.0) values[i] = nu(IntervalE(0.0, grid[i]), cfg.tol);
        },
        1);
    Table t({"t", "nu"});
    for (std::size_t i = 0; i < grid.size(); ++i) t.add({num(grid[i]), num(values[i])});
    emit(t, cfg);
    return kExitOk;
}

int cmd_trace(const RunConfig& cfg) {
    const auto spec = cfg.spec();
    std::vector<i64> ns;
    bool general = false;
    if (cfg.n) {
        if (*cfg.n == 0) throw DomainError("--n must be nonzero");
        ns.push_back(*cfg.n);
        general = true;
    } else if (cfg.p) {
        if (*cfg.p < 2 || factorize(*cfg.p).size() != 1 || factorize(*cfg.p)[0].second != 1) {
            throw DomainError("--p must be prime (got " + std::to_string(*cfg.p) + ")");
        }
        ns.push_back(*cfg.p);
    } else if (cfg.p_range.size() == 2) {
        if (cfg.p_range[0] > cfg.p_range[1] || cfg.p_range[1] < 2) throw DomainError("--p-range needs lo <= hi, hi >= 2");
        for (i64 p : sieve_primes(cfg.p_range[1]).primes) {
            if (p >= cfg.p_range[0]) ns.push_back(p);
        }
    } else {
        throw DomainError("trace needs --p, --p-range or --n");
    }

    std::vector<EigenRecord> eigen;
    if (!cfg.eigen_table.empty()) eigen = load_eigen_table(cfg.eigen_table);

    CacheSession session(cfg);
    i64 max_abs = 0;
    for (i64 v : ns) max_abs = std::max(max_abs, v < 0 ? -v : v);
    TraceEvaluator ev(spec, session.cache, std::min<i64>(discriminant_bound(spec, static_cast<double>(max_abs)), 1LL << 26));

    struct Row {
        GeomBreakdown b;
        std::string status = "ok";
        std::optional<DirectSpectralSum> direct;
    };
    std::vector<Row> rows(ns.size());
    parallel_for(ns.size(), cfg.threads, [&](std::size_t i) {
        try {
            rows[i].b = general ? ev.geometric_side(ns[i]) : ev.trace_minus_p(ns[i]);
            if (!cfg.eigen_table.empty()) rows[i].direct = direct_spectral_sum(general ? ns[i] : -ns[i], spec, eigen);
        } catch (const NumericError& e) {
            rows[i].status = std::string("numeric-failure: ") + e.what();
            const double nan = std::nan("");
            rows[i].b = GeomBreakdown{general ? ns[i] : -ns[i], nan, nan, nan, nan, nan, nan, nan, nan, nan};
        }
    });

    std::vector<std::string> cols{general ? "n" : "p", "total",    "hyperbolic", "elliptic", "divisor_log", "divisor_int",
                                  "parabolic",        "lambda",   "square",     "identity", "spectral"};
    if (!cfg.eigen_table.empty()) {
        for (const char* c : {"direct_spectral", "truncation_mass", "eigen_status"}) cols.emplace_back(c);
    }
    cols.emplace_back("status");
    Table t(cols);
    bool failed = false;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        const auto& b = rows[i].b;
        std::vector<std::string> cells{std::to_string(ns[i]), num(b.total()),     num(b.hyperbolic), num(b.elliptic),
                                       num(b.divisor_log),   num(b.divisor_integral), num(b.parabolic), num(b.lambda_sum),
                                       num(b.square_term),   num(b.identity),      num(b.spectral_sum)};
        if (!cfg.eigen_table.empty()) {
            const auto& d = rows[i].direct;
            cells.push_back(d ? num(d->value) : "nan");
            cells.push_back(d ? num(d->truncation_mass) : "nan");
            cells.push_back(d ? d->status : "not-evaluated");
        }
        cells.push_back(rows[i].status);
        failed = failed || rows[i].status != "ok";
        t.add(cells);
    }
    emit(t, cfg);
    session.save();
    return failed ? kExitNumeric : kExitOk;
}

int cmd_figure(const RunConfig& cfg) {
    const auto spec = cfg.spec();
    const auto grid = expand_grid(cfg.grid.empty() ? std::vector<double>{0.2, 2.0, 0.1} : cfg.grid);
    CacheSession session(cfg);
    const double N = conductor(spec.R, cfg.parity_a);
    TraceEvaluator ev(spec, session.cache, discriminant_bound(spec, N * grid.back()));

    FigureOptions opt;
    opt.threads = cfg.threads;
    opt.parity_a = cfg.parity_a;
    opt.nu_tol = cfg.tol;
    const auto t0 = std::chrono::steady_clock::now();
    opt.progress = [&](std::size_t done, std::size_t total) {
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::fprintf(stderr, "\rprimes %zu/%zu  %.1fs", done, total, s);
        if (done == total) std::fputc('\n', stderr);
    };
    const auto rep = figure1(ev, grid, opt);

    Table t({"t", "nu", "lhs_scaled", "numerator", "denominator", "N", "R", "H", "h", "status"});
    bool failed = false;
    for (const auto& r : rep.rows) {
        std::fprintf(stderr, "row t=%.4g nu=%.6f lhs_scaled=%.6f %s\n", r.t, r.nu, r.lhs_scaled, r.status.c_str());
        t.add({num(r.t), num(r.nu), num(r.lhs_scaled), num(r.numerator), num(r.denominator), num(rep.N), num(spec.R),
               num(spec.H), num(spec.h), r.status});
        failed = failed || r.status.rfind("numeric-failure", 0) == 0;
    }
    emit(t, cfg);
    session.save();
    return failed ? kExitNumeric : kExitOk;
}

int cmd_check(const RunConfig& cfg) {
    std::vector<std::string> only;
    for (const auto& item : cfg.only) {
        std::stringstream ss(item);
        std::string name;
        while (std::getline(ss, name, ',')) {
            if (!name.empty()) only.push_back(name);
        }
    }
    std::optional<CacheSession> session;
    CheckContext ctx;
    ctx.threads = cfg.threads;
    if (!cache_path(cfg).empty()) {
        session.emplace(cfg);
        ctx.cache = &session->cache;
    }
    const auto results = run_checks(only, ctx);
    Table t({"check", "result", "seconds", "detail"});
    std::vector<std::string> failed;
    for (const auto& r : results) {
        std::string detail = r.detail;
        for (char& c : detail) {
            if (c == ',') c = ';';
        }
        t.add({r.name, r.passed ? "pass" : "fail", fixed3(r.seconds), detail});
        if (!r.passed) failed.push_back(r.name);
    }
    emit(t, cfg);
    if (!failed.empty()) {
        std::cerr << "failed checks:";
        for (const auto& f : failed) std::cerr << ' ' << f;
        std::cerr << '\n';
        return kExitNumeric;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    RunConfig cfg;
    CLI::App app{"Murmuration densities for Maass forms via the trace formula"};
    app.set_help_flag("--help", "Print this help message and exit");
    app.set_config("--config", "", "TOML configuration file; command-line flags take precedence");
    app.require_subcommand(1);
    app.fallthrough();

    app.add_option("--R", cfg.R, "spectral window centre")->capture_default_str();
    app.add_option("--H", cfg.H, "spectral window half-width")->capture_default_str();
    app.add_option("--h", cfg.h, "smoothing parameter")->capture_default_str();
    app.add_option("--bump", cfg.bump, "bump function: autocorr or exp")->capture_default_str();
    app.add_option("--l-eps", cfg.l_eps, "accuracy of cached L(1, chi_d) values")->capture_default_str();
    app.add_option("--quad-eps", cfg.quad_eps, "quadrature tolerance")->capture_default_str();
    app.add_option("--threads", cfg.threads, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--cache", cfg.cache_path, "L-value cache file (default: $MURMUR_CACHE)");
    app.add_option("--output,-o", cfg.output, "write data here instead of stdout");
    app.add_option("--format", cfg.format, "csv or json")->capture_default_str();
    app.add_option("--parity-a", cfg.parity_a, "conductor parity a (0 or 1)")->check(CLI::IsMember({0, 1}))->capture_default_str();
    app.add_option("--eigen-table", cfg.eigen_table, "JSON table of Maass form data for the direct spectral sum");

    auto* nu_cmd = app.add_subcommand("nu", "limiting density nu(E)");
    nu_cmd->add_option("--E", cfg.E, "interval lo hi")->expected(2);
    nu_cmd->add_option("--grid", cfg.grid, "t grid start stop step, rows nu([0,t])")->expected(3);
    nu_cmd->add_option("--tol", cfg.tol, "truncation tolerance")->capture_default_str();

    auto* trace_cmd = app.add_subcommand("trace", "geometric side of the trace formula, term by term");
    trace_cmd->add_option("--p", cfg.p, "prime p, evaluates n = -p");
    trace_cmd->add_option("--p-range", cfg.p_range, "all primes in [lo, hi], n = -p")->expected(2);
    trace_cmd->add_option("--n", cfg.n, "general nonzero n");

    auto* fig_cmd = app.add_subcommand("figure", "nu([0,t]) against the scaled prime average");
    fig_cmd->add_option("--grid", cfg.grid, "t grid start stop step")->expected(3);
    fig_cmd->add_option("--tol", cfg.tol, "nu truncation tolerance")->capture_default_str();

    auto* check_cmd = app.add_subcommand("check", "oracle comparisons and invariants");
    check_cmd->add_option("--only", cfg.only, "comma-separated check names");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (nu_cmd->parsed()) return cmd_nu(cfg);
        if (trace_cmd->parsed()) return cmd_trace(cfg);
        if (fig_cmd->parsed()) return cmd_figure(cfg);
        if (check_cmd->parsed()) return cmd_check(cfg);
    } catch (const DomainError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ParseError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const ResourceError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    }
    return kExitConfig;
}
