#include <CLI11.hpp>
#include <omp.h>

#include <boost/multiprecision/float128.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "operstokes/report.hpp"

using namespace operstokes;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SuiteFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    int n = 2;
    std::optional<int> k, degree;
    std::string poly, config, v0, output;
    int D = 20;
    int trunc_order = 20;
    double radius_tol = 1e-12, ode_tol = 1e-10, radius = 0;
    double fd_step = 1e-4, rank_tol = 1e-4;
    int precision_bits = 53;
    int threads = 0;
    unsigned long long seed = 1;
    bool timing = false;
    int n_max = 12;
    bool corrupt = false;
    bool json = false;
    int samples = 20;
};

using CoeffPair = std::pair<BigRational, BigRational>;

CoeffPair parse_coefficient(const std::string& tok) {
    auto colon = tok.find(':');
    try {
        if (colon == std::string::npos) return {parse_rational(tok), BigRational(0)};
        return {parse_rational(tok.substr(0, colon)), parse_rational(tok.substr(colon + 1))};
    } catch (const std::exception&) {
        throw UsageError("cannot parse coefficient '" + tok + "' (use x or re:im)");
    }
}

std::vector<CoeffPair> split_poly(const std::string& s) {
    std::vector<CoeffPair> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) out.push_back(parse_coefficient(tok));
    return out;
}

// n, d and c_0..c_{d-2} as complex rationals, from the config file or flags.
struct ParsedOper {
    int n = 2, d = 2;
    std::vector<CoeffPair> coeffs;
};

ParsedOper parse_oper(const Options& o) {
    ParsedOper p;
    if (!o.config.empty()) {
        std::ifstream in(o.config);
        if (!in) throw UsageError("cannot open config " + o.config);
        Json j;
        try {
            j = Json::parse(in);
            p.n = j.at("n").get<int>();
            int k = j.at("k").get<int>();
            p.d = k * p.n;
            for (const auto& c : j.value("coefficients", Json::array())) {
                auto part = [](const Json& x) {
                    return x.is_string() ? parse_rational(x.get<std::string>()) : parse_rational(x.dump());
                };
                p.coeffs.emplace_back(part(c.at(0)), part(c.at(1)));
            }
        } catch (const Json::exception& e) {
            throw UsageError(std::string("bad config: ") + e.what());
        }
        if (p.coeffs.empty()) p.coeffs.assign(static_cast<std::size_t>(p.d - 1), {});
        if (p.coeffs.size() != static_cast<std::size_t>(p.d - 1))
            throw UsageError("config needs d-1 coefficients c_0..c_{d-2}");
        return p;
    }
    p.n = o.n;
    if (p.n < 2) throw UsageError("--n must be at least 2");
    auto list = split_poly(o.poly);
    if (o.degree) {
        p.d = *o.degree;
        if (list.size() > static_cast<std::size_t>(p.d))
            throw UsageError("--poly lists more than the " + std::to_string(p.d) + " coefficients below z^d");
        list.resize(static_cast<std::size_t>(p.d));
    } else if (!o.poly.empty()) {
        if (list.size() < 2) throw UsageError("--poly must list at least two coefficients");
        p.d = static_cast<int>(list.size()) - 1;
        if (list.back() != CoeffPair{1, 0}) throw UsageError("leading coefficient of --poly must be 1");
        list.pop_back();
    } else {
        p.d = o.k.value_or(1) * p.n;
        list.assign(static_cast<std::size_t>(p.d), {});
    }
    if (p.d < 1) throw UsageError("degree must be positive");
    if (list.back() != CoeffPair{0, 0}) throw UsageError("coefficient of z^(d-1) must vanish (trace-free normalization)");
    list.pop_back();
    p.coeffs = list;
    if (o.k && p.d != *o.k * p.n)
        throw UsageError("degree " + std::to_string(p.d) + " differs from k*n = " + std::to_string(*o.k * p.n));
    if (p.d % p.n != 0)
        throw UsageError("degree " + std::to_string(p.d) + " is not a multiple of n = " + std::to_string(p.n));
    return p;
}

OperPoint exact_oper(const ParsedOper& p) {
    OperPoint op{p.n, p.d, {}};
    for (const auto& [re, im] : p.coeffs) {
        if (im != 0) throw UsageError("the exact kernel needs real rational coefficients");
        op.coeffs.push_back(re);
    }
    return op;
}

ComplexOperPoint complex_oper(const ParsedOper& p) {
    ComplexOperPoint op{p.n, p.d, {}};
    for (const auto& [re, im] : p.coeffs) op.coeffs.emplace_back(re.get_d(), im.get_d());
    return op;
}

Json oper_json(const ParsedOper& p) {
    Json c = Json::array();
    for (const auto& [re, im] : p.coeffs) c.push_back(Json::array({to_fraction_string(re), to_fraction_string(im)}));
    return {{"n", p.n}, {"k", p.d / p.n}, {"d", p.d}, {"coefficients", c}};
}

StokesSettings stokes_settings(const Options& o) {
    StokesSettings s;
    s.trunc_order = o.trunc_order;
    s.ode_tol = o.ode_tol;
    s.radius_tol = o.radius_tol;
    s.radius = o.radius;
    if (!o.v0.empty()) {
        try {
            s.v0 = parse_rational(o.v0);
        } catch (const std::exception&) {
            throw UsageError("cannot parse --v0 '" + o.v0 + "'");
        }
    }
    if (s.trunc_order < 1 || !(s.ode_tol > 0) || !(s.radius_tol > 0) || s.radius < 0)
        throw UsageError("numeric settings must be positive");
    return s;
}

JacobianSettings jacobian_settings(const Options& o) {
    JacobianSettings j;
    j.stokes = stokes_settings(o);
    j.h = o.fd_step;
    j.rank_tol = o.rank_tol;
    if (!(j.h > 0) || !(j.rank_tol > 0)) throw UsageError("--fd-step and --rank-tol must be positive");
    return j;
}

template <class F>
auto dispatch_precision(int bits, F&& f) {
    if (bits <= 0) throw UsageError("--precision-bits must be positive");
    if (bits <= 53) return f(double{});
    if (bits <= 64) return f((long double){});
    if (bits <= 113) return f(boost::multiprecision::float128{});
    throw UsageError("--precision-bits above 113 is not supported");
}

void emit(const Options& o, const std::string& text) {
    if (o.output.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(o.output);
    if (!out) throw UsageError("cannot write " + o.output);
    out << text;
}

void emit_json(const Options& o, Json doc, double seconds) {
    if (o.timing) doc["seconds"] = seconds;
    emit(o, doc.dump(2) + "\n");
}

double since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void cmd_basis(const Options& o) {
    if (o.n < 2) throw UsageError("--n must be at least 2");
    WeightBasis b(build_sl2(o.n));
    StructureTables t(b);
    std::ostringstream os;
    write_basis_text(os, b, t);
    emit(o, os.str());
}

void cmd_verify(const Options& o) {
    if (o.n_max < 2) throw UsageError("--n-max must be at least 2");
    auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    Json suites = Json::array(), weights = Json::array(), reductions = Json::array();
    std::ostringstream table;
    table << "n   check                                           result  checked\n";
    for (int n = 2; n <= o.n_max; ++n) {
        auto suite = run_lemma_suite(n, o.corrupt);
        ok = ok && suite.passed();
        suites.push_back(lemma_suite_json(suite));
        for (const auto& c : suite.checks)
            table << std::left << std::setw(4) << n << std::setw(48) << c.name << std::setw(8)
                  << (c.passed ? "pass" : "FAIL") << c.checked << '\n';
        if (n <= 6) {
            auto w = weight_expression_check(monomial_oper(n, 1));
            ok = ok && w.passed();
            weights.push_back(weight_report_json(w));
            table << std::setw(4) << n << std::setw(48) << "weight expressions" << std::setw(8)
                  << (w.passed() ? "pass" : "FAIL") << w.expressions.size() << '\n';
        }
    }
    for (auto [n, d] : {std::pair{2, 2}, std::pair{2, 4}, std::pair{3, 3}, std::pair{4, 4}}) {
        if (n > o.n_max) continue;
        auto r = reduction_equivalence(n, d, o.samples, o.seed);
        ok = ok && r.passed();
        reductions.push_back(reduction_json(r));
        table << std::setw(4) << n << std::setw(48) << ("reduction d=" + std::to_string(d)) << std::setw(8)
              << (r.passed() ? "pass" : "FAIL") << r.samples << '\n';
    }
    if (o.json) {
        emit_json(o,
                  {{"n_max", o.n_max},
                   {"corrupt", o.corrupt},
                   {"seed", o.seed},
                   {"passed", ok},
                   {"lemma_suites", suites},
                   {"weight_expressions", weights},
                   {"reduction", reductions}},
                  since(t0));
    } else {
        table << (ok ? "all checks passed\n" : "some checks FAILED\n");
        emit(o, table.str());
    }
    if (!ok) throw SuiteFailure("verification failed");
}

void cmd_kernel(const Options& o) {
    auto p = parse_oper(o);
    if (o.D < 0) throw UsageError("--D must be non-negative");
    auto t0 = std::chrono::steady_clock::now();
    auto rep = solvability(exact_oper(p), o.D);
    Json doc{{"oper", oper_json(p)}, {"solvability", solvability_json(rep)}};
    emit_json(o, doc, since(t0));
}

void cmd_stokes(const Options& o) {
    auto p = parse_oper(o);
    auto s = stokes_settings(o);
    auto t0 = std::chrono::steady_clock::now();
    Json result = dispatch_precision(o.precision_bits, [&](auto tag) {
        using R = decltype(tag);
        auto op = convert_oper<R>(complex_oper(p));
        auto st = monodromy_map<R>(op, s);
        return stokes_json(st, gauge_transform(op).lambda);
    });
    Json settings = settings_json(s);
    settings["precision_bits"] = o.precision_bits;
    emit_json(o, {{"oper", oper_json(p)}, {"settings", settings}, {"stokes", result}}, since(t0));
}

void cmd_jacobian(const Options& o) {
    auto p = parse_oper(o);
    auto s = jacobian_settings(o);
    auto t0 = std::chrono::steady_clock::now();
    auto rep = dispatch_precision(o.precision_bits, [&](auto tag) {
        return jacobian<decltype(tag)>(complex_oper(p), s);
    });
    Json settings = settings_json(s.stokes);
    settings["precision_bits"] = o.precision_bits;
    emit_json(o, {{"oper", oper_json(p)}, {"settings", settings}, {"jacobian", jacobian_json(rep)}}, since(t0));
}

void cmd_crosscheck(const Options& o) {
    auto p = parse_oper(o);
    auto s = jacobian_settings(o);
    auto t0 = std::chrono::steady_clock::now();
    auto rep = kernel_cross_check(exact_oper(p), o.D, s);
    emit_json(o, {{"oper", oper_json(p)}, {"settings", settings_json(s.stokes)}, {"cross_check", cross_check_json(rep)}},
              since(t0));
    if (!rep.agree()) throw SuiteFailure("exact and numeric verdicts disagree");
}

void cmd_layout(const Options& o) {
    if (o.n < 2 || o.k.value_or(1) < 1) throw UsageError("layout needs n >= 2 and k >= 1");
    auto s = stokes_settings(o);
    emit(o, layout_csv(sector_layout(o.n, o.k.value_or(1), s.v0)));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stokes data and isomonodromy checks for cyclic opers y^(n) = p y"};
    app.require_subcommand(1);
    app.fallthrough();
    Options o;

    auto env = [](CLI::Option* opt, const char* name) { return opt->envname(std::string("OPERSTOKES_") + name); };
    env(app.add_option("--n", o.n, "order of the oper"), "N");
    env(app.add_option("--k", o.k, "d = k n"), "K");
    env(app.add_option("--degree", o.degree, "degree d; --poly then lists coefficients below z^d"), "DEGREE");
    env(app.add_option("--poly", o.poly, "ascending coefficients, x or re:im, comma separated"), "POLY");
    env(app.add_option("--config", o.config, "JSON document with n, k, coefficients [[re, im], ...]"), "CONFIG");
    env(app.add_option("--D", o.D, "degree bound for Omega in the kernel"), "D");
    env(app.add_option("--trunc-order", o.trunc_order, "formal truncation order M"), "TRUNC_ORDER");
    env(app.add_option("--radius-tol", o.radius_tol, "asymptotic seeding tolerance"), "RADIUS_TOL");
    env(app.add_option("--radius", o.radius, "fixed seeding radius (0 = adaptive)"), "RADIUS");
    env(app.add_option("--ode-tol", o.ode_tol, "relative integration tolerance"), "ODE_TOL");
    env(app.add_option("--v0", o.v0, "base direction as a rational multiple of pi"), "V0");
    env(app.add_option("--fd-step", o.fd_step, "finite-difference step"), "FD_STEP");
    env(app.add_option("--rank-tol", o.rank_tol, "relative singular value threshold"), "RANK_TOL");
    env(app.add_option("--precision-bits", o.precision_bits, "53, 64 or 113"), "PRECISION_BITS");
    env(app.add_option("--threads", o.threads, "worker threads (0 = OpenMP default)"), "THREADS");
    env(app.add_option("--seed", o.seed, "seed for randomized suites"), "SEED");
    env(app.add_option("--output", o.output, "write to a file instead of stdout"), "OUTPUT");
    app.add_flag("--timing", o.timing, "include wall-clock seconds in JSON output");

    auto* basis = app.add_subcommand("basis", "weight basis and structure constants");
    auto* verify = app.add_subcommand("verify", "exact lemma suites for 2 <= n <= n-max");
    verify->add_option("--n-max", o.n_max, "largest n");
    verify->add_flag("--corrupt", o.corrupt, "flip one structure constant (must fail)");
    verify->add_option("--samples", o.samples, "random samples per reduction check");
    verify->add_flag("--json", o.json, "JSON instead of a table");
    auto* kernel = app.add_subcommand("kernel", "exact isomonodromic tangent dimension");
    auto* stokes = app.add_subcommand("stokes", "Stokes factors and matrices");
    auto* jac = app.add_subcommand("jacobian", "finite-difference Jacobian of the monodromy map");
    auto* cross = app.add_subcommand("crosscheck", "exact kernel against numeric rank");
    auto* layout = app.add_subcommand("layout", "anti-Stokes directions as CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    if (o.threads < 0) {
        std::cerr << "error: --threads must be non-negative\n";
        return 2;
    }
    if (o.threads > 0) omp_set_num_threads(o.threads);

    try {
        if (*basis) cmd_basis(o);
        if (*verify) cmd_verify(o);
        if (*kernel) cmd_kernel(o);
        if (*stokes) cmd_stokes(o);
        if (*jac) cmd_jacobian(o);
        if (*cross) cmd_crosscheck(o);
        if (*layout) cmd_layout(o);
    } catch (const SuiteFailure& e) {
        std::cerr << "failure: " << e.what() << '\n';
        return 1;
    } catch (const NumericalError& e) {
        std::cerr << "non-convergence: " << e.what() << '\n';
        return 3;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
