#include "hill/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "hill/eigensolve.hpp"
#include "hill/error.hpp"
#include "hill/floquet.hpp"
#include "hill/parallel.hpp"
#include "hill/specfun.hpp"
#include "hill/theorems.hpp"
#include "hill/traceform.hpp"

namespace hill::cli {

namespace {

using json = nlohmann::ordered_json;
constexpr double kPi = 3.14159265358979323846;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string num(double v, int digits) {
    if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

// nlohmann's dump writes the shortest round-trip form; floats here always
// carry 17 significant digits.
void write_json(const json& j, std::string& s) {
    switch (j.type()) {
        case json::value_t::object: {
            s += '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) s += ',';
                first = false;
                s += json(it.key()).dump();
                s += ':';
                write_json(it.value(), s);
            }
            s += '}';
            break;
        }
        case json::value_t::array: {
            s += '[';
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) s += ',';
                write_json(j[i], s);
            }
            s += ']';
            break;
        }
        case json::value_t::number_float: {
            const double v = j.get<double>();
            s += std::isfinite(v) ? num(v, 17) : "null";
            break;
        }
        default:
            s += j.dump();
    }
}

std::string to_text(const json& j) {
    std::string s;
    write_json(j, s);
    return s + '\n';
}

json cjson(cplx z) { return {{"re", z.real()}, {"im", z.imag()}}; }

class Csv {
public:
    explicit Csv(std::initializer_list<const char*> header) {
        bool first = true;
        for (const char* h : header) {
            if (!first) text_ += ',';
            first = false;
            text_ += h;
        }
        text_ += '\n';
    }
    Csv& operator<<(double v) { return cell(num(v, 12)); }
    Csv& operator<<(int v) { return cell(std::to_string(v)); }
    Csv& operator<<(const std::string& v) { return cell(v); }
    void end() {
        text_ += '\n';
        fresh_ = true;
    }
    [[nodiscard]] const std::string& text() const { return text_; }

private:
    Csv& cell(const std::string& c) {
        if (!fresh_) text_ += ',';
        fresh_ = false;
        text_ += c;
        return *this;
    }
    std::string text_;
    bool fresh_ = true;
};

enum class Format { Csv, Json };

struct Global {
    std::string potential;
    double tol = kDefaultTol;
    int threads = 0;
    std::string out;
    std::string output;
    std::string config;
};

struct Resolved {
    std::optional<Potential> potential;
    double tol = kDefaultTol;
    std::optional<int> threads;
    std::optional<Format> format;
    std::string output;
};

Potential read_potential(const std::string& spec, const std::string& origin) {
    try {
        return parse_potential(spec);
    } catch (const Error& e) {
        throw UsageError(origin + ": " + e.what());
    }
}

Format read_format(const std::string& s, const std::string& origin) {
    if (s == "csv") return Format::Csv;
    if (s == "json") return Format::Json;
    throw UsageError(origin + ": expected csv or json, got '" + s + "'");
}

Resolved resolve(const Global& g, const CLI::App& app) {
    Resolved r;
    auto given = [&](const char* flag) { return app.get_option(flag)->count() > 0; };
    if (!g.config.empty()) {
        std::ifstream in(g.config);
        if (!in) throw UsageError("--config: cannot read '" + g.config + "'");
        json cfg;
        try {
            cfg = json::parse(in);
        } catch (const json::exception& e) {
            throw UsageError("--config: " + std::string(e.what()));
        }
        if (!cfg.is_object()) throw UsageError("--config: expected a JSON object");
        for (auto it = cfg.begin(); it != cfg.end(); ++it) {
            const std::string& key = it.key();
            const json& v = it.value();
            try {
                if (key == "potential")
                    r.potential = read_potential(v.is_string() ? v.get<std::string>() : v.dump(), "--config potential");
                else if (key == "tol")
                    r.tol = v.get<double>();
                else if (key == "threads")
                    r.threads = v.get<int>();
                else if (key == "out")
                    r.format = read_format(v.get<std::string>(), "--config out");
                else if (key == "output")
                    r.output = v.get<std::string>();
                else
                    throw UsageError("--config: unknown key '" + key + "'");
            } catch (const json::exception& e) {
                throw UsageError("--config: bad value for '" + key + "': " + e.what());
            }
        }
    }
    if (given("--potential")) r.potential = read_potential(g.potential, "--potential");
    if (given("--tol")) r.tol = g.tol;
    if (given("--threads")) r.threads = g.threads;
    if (given("--out")) r.format = read_format(g.out, "--out");
    if (given("--output")) r.output = g.output;

    if (!(r.tol >= 1e-13 && r.tol <= 1e-6)) throw UsageError("--tol: must lie in [1e-13, 1e-6], got " + num(r.tol, 6));
    if (r.threads && *r.threads < 1) throw UsageError("--threads: must be at least 1");
    return r;
}

const Potential& need_potential(const Resolved& r) {
    if (!r.potential) throw UsageError("--potential: required by this subcommand");
    return *r.potential;
}

Format format_or(const Resolved& r, Format fallback) { return r.format.value_or(fallback); }

void json_only(const Resolved& r, const std::string& cmd) {
    if (r.format && *r.format != Format::Json) throw UsageError("--out: '" + cmd + "' only writes json");
}

// --- subcommands -----------------------------------------------------------

struct FloquetArgs {
    double re = 0.0, im = 0.0, x0 = 0.0;
    bool dlambda = false;
};

std::string cmd_floquet(const FloquetArgs& a, const Resolved& r) {
    json_only(r, "floquet eval");
    const auto fd = integrate_fundamental(need_potential(r), cplx(a.re, a.im), a.x0, r.tol, a.dlambda);
    json j{{"lambda", cjson(fd.lambda)}, {"x0", fd.x0},          {"x1", fd.x1},
           {"c", cjson(fd.c_end)},       {"c_prime", cjson(fd.c_prime_end)},
           {"s", cjson(fd.s_end)},       {"s_prime", cjson(fd.s_prime_end)},
           {"wronskian", cjson(fd.wronskian())},
           {"delta", cjson(fd.half_trace())},
           {"steps", fd.steps}};
    if (fd.dlambda) {
        const auto& d = *fd.dlambda;
        j["dlambda"] = {{"c", cjson(d[0])}, {"c_prime", cjson(d[1])}, {"s", cjson(d[2])}, {"s_prime", cjson(d[3])}};
    }
    return to_text(j);
}

struct SpecfunArgs {
    double nu_re = 0.0, nu_im = 0.0, u_re = 0.0, u_im = 0.0;
};

std::string cmd_specfun(const SpecfunArgs& a, const Resolved& r) {
    json_only(r, "specfun eval");
    const cplx nu(a.nu_re, a.nu_im), u(a.u_re, a.u_im);
    json j{{"nu", cjson(nu)}, {"u", cjson(u)}, {"J", cjson(bessel_j(nu, u))}, {"J_prime", cjson(bessel_j_prime(nu, u))}};
    if (std::abs(nu - std::nearbyint(nu.real())) > 0.0) j["Y"] = cjson(bessel_y(nu, u));
    return to_text(j);
}

struct EigArgs {
    std::string kind;
    double x0 = 0.0;
    int count = 0;
};

std::string cmd_eig(const EigArgs& a, const Resolved& r) {
    const Potential& p = need_potential(r);
    const Kind kind = kind_from_string(a.kind);
    std::vector<Eigenvalue> eigs;
    if (kind == Kind::Dirichlet) eigs = dirichlet_eigenvalues(p, a.x0, a.count, r.tol);
    else if (kind == Kind::Neumann) eigs = neumann_eigenvalues(p, a.x0, a.count, r.tol);
    else eigs = periodic_eigenvalues(p, a.count - 1, r.tol);

    if (format_or(r, Format::Csv) == Format::Csv) {
        Csv csv{"kind", "index", "re", "im", "mult", "residual"};
        for (const auto& e : eigs) {
            csv << a.kind << e.index << e.value.real() << e.value.imag() << e.alg_multiplicity << e.residual;
            csv.end();
        }
        return csv.text();
    }
    json list = json::array();
    for (const auto& e : eigs)
        list.push_back({{"index", e.index},
                        {"re", e.value.real()},
                        {"im", e.value.imag()},
                        {"mult", e.alg_multiplicity},
                        {"residual", e.residual},
                        {"flagged", e.flagged}});
    json j{{"kind", a.kind}, {"count", a.count}, {"eigenvalues", list}};
    if (kind != Kind::Periodic) j["x0"] = a.x0;
    return to_text(j);
}

struct BandsArgs {
    std::string region;
    double step = 0.05;
};

SearchBox parse_region(const std::string& s) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            v.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw UsageError("--region: '" + item + "' is not a number");
        }
    }
    if (v.size() != 4) throw UsageError("--region: expected re_lo,re_hi,im_lo,im_hi");
    if (!(v[0] < v[1] && v[2] < v[3])) throw UsageError("--region: need re_lo < re_hi and im_lo < im_hi");
    return SearchBox::from_corners(v[0], v[1], v[2], v[3]);
}

std::string cmd_bands(const BandsArgs& a, const Resolved& r) {
    const SearchBox region = parse_region(a.region);
    if (!(a.step > 0.0)) throw UsageError("--step: must be positive");
    const auto arcs = spectral_arcs(need_potential(r), region, a.step, r.tol);
    if (format_or(r, Format::Csv) == Format::Csv) {
        Csv csv{"arc_id", "re", "im"};
        for (std::size_t i = 0; i < arcs.size(); ++i)
            for (const auto& z : arcs[i].points) {
                csv << int(i) << z.real() << z.imag();
                csv.end();
            }
        return csv.text();
    }
    json list = json::array();
    for (std::size_t i = 0; i < arcs.size(); ++i) {
        json pts = json::array();
        for (const auto& z : arcs[i].points) pts.push_back({z.real(), z.imag()});
        list.push_back({{"id", i}, {"flagged", arcs[i].flagged}, {"points", pts}});
    }
    return to_text(json{{"arcs", list}});
}

struct TraceArgs {
    std::string kind;
    double x = 0.0;
    int grid = 0;
    int terms = 0;
};

std::string cmd_trace(const TraceArgs& a, const Resolved& r, bool single) {
    std::vector<double> xs;
    if (single) xs.push_back(a.x);
    else
        for (int i = 0; i < a.grid; ++i) xs.push_back(i * kPi / a.grid);
    const auto reports = trace_grid(need_potential(r), kind_from_string(a.kind), xs, a.terms, r.tol);

    if (format_or(r, Format::Csv) == Format::Csv) {
        Csv csv{"x", "m", "S_re", "S_im", "err"};
        for (const auto& rep : reports)
            for (int m = 0; m < rep.M; ++m) {
                csv << rep.x << m + 1 << rep.partial_sums[m].real() << rep.partial_sums[m].imag() << rep.errors[m];
                csv.end();
            }
        return csv.text();
    }
    json list = json::array();
    for (const auto& rep : reports) {
        json sums = json::array(), errs = json::array();
        for (int m = 0; m < rep.M; ++m) {
            sums.push_back(cjson(rep.partial_sums[m]));
            errs.push_back(rep.errors[m]);
        }
        list.push_back({{"x", rep.x},
                        {"kind", to_string(rep.kind)},
                        {"M", rep.M},
                        {"target", cjson(rep.target)},
                        {"partial_sums", sums},
                        {"errors", errs},
                        {"final_error", rep.final_error()}});
    }
    return to_text(json{{"reports", list}});
}

struct VerifyArgs {
    std::string suite;
    double K = 1.0;
    int n = 5;
};

json suite_json(const SuiteReport& rep) {
    json checks = json::array();
    for (const auto& c : rep.checks) checks.push_back({{"name", c.name}, {"passed", c.passed}, {"value", c.value}});
    return {{"passed", rep.passed()}, {"checks", checks}};
}

std::string cmd_verify(const VerifyArgs& a, const Resolved& r) {
    json_only(r, "verify");
    json j{{"suite", a.suite}, {"K", a.K}, {"n", a.n}};
    if (a.suite == "localization") {
        const auto rep = check_localization(a.K, a.n, r.tol);
        json clauses = json::object();
        for (const auto& [id, c] : rep.clauses)
            clauses[id] = {{"checked", c.checked}, {"passed", c.passed},   {"margins", c.margins},
                           {"at_endpoint", c.at_endpoint}, {"notes", c.notes}};
        j["clauses"] = clauses;
        if (rep.M1) j["M1"] = *rep.M1;
        if (rep.M2) j["M2"] = *rep.M2;
    } else {
        SuiteReport rep;
        if (a.suite == "symmetry") rep = symmetry_report(a.K, a.n, r.tol);
        else if (a.suite == "multiplicity") rep = multiplicity_report(a.K, a.n, r.tol);
        else rep = sign_report(a.K, a.n, r.tol);
        j.update(suite_json(rep));
    }
    return to_text(j);
}

void emit(const std::string& text, const Resolved& r, std::ostream& out) {
    if (r.output.empty()) {
        out << text;
        return;
    }
    std::ofstream f(r.output, std::ios::binary);
    if (!f) throw UsageError("--output: cannot write '" + r.output + "'");
    f << text;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Spectral analysis of Hill operators with complex periodic potentials", "hill"};
    app.require_subcommand(1);
    app.fallthrough();

    Global g;
    app.add_option("--potential", g.potential, "JSON coefficients, model:K=<re>[+<im>i], or @file");
    app.add_option("--tol", g.tol, "integration tolerance in [1e-13, 1e-6] (default 1e-10)");
    app.add_option("--threads", g.threads, "worker threads (default: HILL_THREADS or hardware)");
    app.add_option("--out", g.out, "output format: csv or json");
    app.add_option("--output", g.output, "write results to this file instead of stdout");
    app.add_option("--config", g.config, "JSON file with potential, tol, threads, out, output");

    auto* floquet = app.add_subcommand("floquet", "fundamental system over one period");
    floquet->require_subcommand(1);
    FloquetArgs fa;
    auto* feval = floquet->add_subcommand("eval", "c, c', s, s' at x0 + pi");
    feval->add_option("--lambda-re", fa.re)->required();
    feval->add_option("--lambda-im", fa.im);
    feval->add_option("--x0", fa.x0);
    feval->add_flag("--with-dlambda", fa.dlambda, "also report d/dlambda");

    auto* specfun = app.add_subcommand("specfun", "special functions");
    specfun->require_subcommand(1);
    SpecfunArgs sa;
    auto* seval = specfun->add_subcommand("eval", "J_nu(u), J'_nu(u) and Y_nu(u)");
    seval->add_option("--nu-re", sa.nu_re)->required();
    seval->add_option("--nu-im", sa.nu_im);
    seval->add_option("--u-re", sa.u_re)->required();
    seval->add_option("--u-im", sa.u_im);

    EigArgs ea;
    auto* eig = app.add_subcommand("eig", "Dirichlet, Neumann or periodic eigenvalues");
    eig->add_option("--kind", ea.kind)->required()->check(CLI::IsMember({"dirichlet", "neumann", "periodic"}));
    eig->add_option("--x0", ea.x0);
    eig->add_option("--count", ea.count)->required()->check(CLI::PositiveNumber);

    BandsArgs ba;
    auto* bands = app.add_subcommand("bands", "spectral arcs {Delta in [-1, 1]}");
    bands->add_option("--region", ba.region, "re_lo,re_hi,im_lo,im_hi")->required();
    bands->add_option("--step", ba.step, "arclength step (default 0.05)");

    TraceArgs ta;
    auto* trace = app.add_subcommand("trace", "Dirichlet or Neumann trace sums");
    trace->add_option("--kind", ta.kind)->required()->check(CLI::IsMember({"dirichlet", "neumann"}));
    auto* tx = trace->add_option("--x", ta.x, "single point");
    auto* tg = trace->add_option("--grid", ta.grid, "n points i*pi/n")->check(CLI::PositiveNumber);
    tx->excludes(tg);
    trace->add_option("--terms", ta.terms, "number of terms M")->required()->check(CLI::PositiveNumber);

    VerifyArgs va;
    auto* verify = app.add_subcommand("verify", "theorem checks for V = K exp(2ix)");
    verify->add_option("--suite", va.suite)->required()->check(
        CLI::IsMember({"localization", "symmetry", "multiplicity", "signs"}));
    verify->add_option("--K", va.K)->required();
    verify->add_option("--n", va.n)->check(CLI::PositiveNumber);

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    struct ThreadRestore {
        int saved = thread_count();
        ~ThreadRestore() { set_thread_count(saved); }
    } restore;
    try {
        const Resolved r = resolve(g, app);
        if (r.threads) set_thread_count(*r.threads);
        std::string text;
        if (feval->parsed()) text = cmd_floquet(fa, r);
        else if (seval->parsed()) text = cmd_specfun(sa, r);
        else if (eig->parsed()) text = cmd_eig(ea, r);
        else if (bands->parsed()) text = cmd_bands(ba, r);
        else if (trace->parsed()) {
            if (tx->count() == 0 && tg->count() == 0) throw UsageError("trace: one of --x or --grid is required");
            text = cmd_trace(ta, r, tx->count() > 0);
        } else if (verify->parsed()) text = cmd_verify(va, r);
        emit(text, r, out);
        return 0;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace hill::cli
