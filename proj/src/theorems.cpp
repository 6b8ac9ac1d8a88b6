#include "hill/theorems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hill/error.hpp"
#include "hill/floquet.hpp"
#include "hill/specfun.hpp"

namespace hill {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kAgree = 1e-7;
constexpr double kEndpoint = 1e-6;
constexpr double kMarginFactor = 10.0;
constexpr double kEps = std::numeric_limits<double>::epsilon();

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(3);
    os << v;
    return os.str();
}

std::vector<cplx> first(const std::vector<Eigenvalue>& e, int n) {
    auto v = expand(e);
    if (int(v.size()) > n) v.resize(n);
    return v;
}

std::vector<cplx> mu_list(const Potential& p, double x0, int n, double tol) {
    return first(dirichlet_eigenvalues(p, x0, n, tol), n);
}

std::vector<cplx> nu_list(const Potential& p, double x0, int n, double tol) {
    return first(neumann_eigenvalues(p, x0, n, tol), n);
}

std::vector<cplx> conjugated(std::vector<cplx> v) {
    for (auto& z : v) z = std::conj(z);
    return v;
}

void check_count(int n) {
    if (n < 1) throw InvalidArgument("eigenvalue count must be at least 1, got " + std::to_string(n));
}

double periodicity_deviation(const Potential& p, double x0, int n, double tol) {
    return std::max(match_distance(mu_list(p, x0, n, tol), mu_list(p, x0 + kPi, n, tol)),
                    match_distance(nu_list(p, x0, n, tol), nu_list(p, x0 + kPi, n, tol)));
}

double pt_deviation(const Potential& p, double x0, int n, double tol) {
    if (!classify_symmetry(p).pt_symmetric)
        throw InvalidArgument("potential is not PT-symmetric (all coefficients must be real)");
    return std::max(match_distance(mu_list(p, kPi - x0, n, tol), conjugated(mu_list(p, x0, n, tol))),
                    match_distance(nu_list(p, kPi - x0, n, tol), conjugated(nu_list(p, x0, n, tol))));
}

double reality_deviation(const Potential& p, int n, double tol) {
    if (!classify_symmetry(p).pt_symmetric)
        throw InvalidArgument("potential is not PT-symmetric (all coefficients must be real)");
    double worst = 0.0;
    for (double x0 : {0.0, kPi / 2}) {
        for (const auto& z : mu_list(p, x0, n, tol)) worst = std::max(worst, std::abs(z.imag()));
        for (const auto& z : nu_list(p, x0, n, tol)) worst = std::max(worst, std::abs(z.imag()));
    }
    return worst;
}

double rotation_deviation(cplx K, double x, int n, double tol) {
    if (K == cplx{}) throw InvalidArgument("rotation covariance needs K != 0");
    const double phi = 0.5 * std::arg(K);
    const Potential rotated = model_potential(K);
    const Potential base = model_potential(std::abs(K));
    return std::max(match_distance(mu_list(rotated, x, n, tol), mu_list(base, x + phi, n, tol)),
                    match_distance(nu_list(rotated, x, n, tol), nu_list(base, x + phi, n, tol)));
}

// Accumulates margins of one clause.  A strict bound passes when its margin
// exceeds ten times its uncertainty.
class ClauseBuilder {
public:
    ClauseBuilder() {
        r_.checked = true;
        r_.passed = true;
    }

    void strict(const std::string& what, double margin, double unc) {
        r_.margins.push_back(margin);
        if (margin > kMarginFactor * (unc + 4 * kEps * std::abs(margin))) return;
        r_.passed = false;
        r_.notes.push_back(what + (margin > 0.0 ? " unresolved" : " violated") + " (margin " + fmt(margin) + ")");
    }

    // A bound that allows equality: margins under kEndpoint are reported
    // separately.
    void weak(const std::string& what, double margin, double unc) {
        if (std::abs(margin) < kEndpoint) {
            r_.at_endpoint.push_back(what + " (margin " + fmt(margin) + ")");
            return;
        }
        strict(what, margin, unc);
    }

    void ordered(const std::string& what, double margin, double unc) {
        r_.margins.push_back(margin);
        if (margin >= -kMarginFactor * unc) return;
        r_.passed = false;
        r_.notes.push_back(what + " violated (margin " + fmt(margin) + ")");
    }

    void fail(const std::string& what) {
        r_.passed = false;
        r_.notes.push_back(what);
    }

    ClauseResult done() { return std::move(r_); }

private:
    ClauseResult r_;
};

// Signed distance of a root above (sign = +1) or below (sign = -1) the level a.
// A root off the real axis violates every real bound by |Im|.
double above(const ModelRoot& r, double a) {
    if (std::abs(r.value.imag()) > kMarginFactor * r.uncertainty) return -std::abs(r.value.imag());
    return r.minus(a).real();
}
double below(const ModelRoot& r, double a) {
    if (std::abs(r.value.imag()) > kMarginFactor * r.uncertainty) return -std::abs(r.value.imag());
    return -r.minus(a).real();
}

std::string label(const char* name, int index, const char* at) {
    return std::string(name) + "_" + std::to_string(index) + "(" + at + ")";
}

std::vector<ModelRoot> refined(double K, double x0, Kind kind, const std::vector<cplx>& values, double tol) {
    std::vector<ModelRoot> out;
    for (const auto& v : values) out.push_back(refine_model_root(K, x0, kind, v, tol));
    return out;
}

}  // namespace

bool SuiteReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

double match_distance(std::vector<cplx> a, std::vector<cplx> b) {
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    auto by_parts = [](cplx x, cplx y) { return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag(); };
    std::sort(a.begin(), a.end(), by_parts);
    std::vector<bool> used(b.size(), false);
    double worst = 0.0;
    for (const auto& z : a) {
        std::size_t best = b.size();
        for (std::size_t k = 0; k < b.size(); ++k)
            if (!used[k] && (best == b.size() || std::abs(b[k] - z) < std::abs(b[best] - z))) best = k;
        used[best] = true;
        worst = std::max(worst, std::abs(b[best] - z));
    }
    return worst;
}

bool check_periodicity(const Potential& p, double x0, int n, double tol) {
    check_count(n);
    return periodicity_deviation(p, x0, n, tol) < kAgree;
}

bool check_pt_symmetry(const Potential& p, double x0, int n, double tol) {
    check_count(n);
    return pt_deviation(p, x0, n, tol) < kAgree;
}

bool check_reality_at_special_points(const Potential& p, int n, double tol) {
    check_count(n);
    return reality_deviation(p, n, tol) < kAgree;
}

bool check_rotation_covariance(cplx K, double x, int n, double tol) {
    check_count(n);
    return rotation_deviation(K, x, n, tol) < kAgree;
}

cplx ModelRoot::minus(double a) const {
    if (!refined) return value - a;
    return (double(n) * n - a) + t * (2.0 * n + t);
}

ModelRoot refine_model_root(cplx K, double x0, Kind kind, cplx lambda, double tol) {
    if (kind == Kind::Periodic) throw InvalidArgument("refine_model_root: kind must be dirichlet or neumann");
    if (K == cplx{}) throw InvalidArgument("refine_model_root: K must be non-zero");

    ModelRoot r;
    r.value = lambda;
    r.uncertainty = 100.0 * tol * (1.0 + std::abs(lambda));
    if (lambda.real() < 0.0) return r;

    // sqrt(lambda) = n + t; the endpoint function is a product of the two
    // reduced Bessel factors of orders +-(n + t).
    const cplx w = -K * std::polar(1.0, 2.0 * x0) / 4.0;
    const cplx nu = std::sqrt(lambda);
    const int n = int(std::nearbyint(nu.real()));
    auto P = [&](cplx t) -> cplx {
        const cplx a = double(n) + t;
        if (kind == Kind::Dirichlet) return bessel_reduced(a, w) * bessel_reduced_near(n, t, w);
        const cplx plus = 0.5 * a * bessel_reduced(a, w) + w * bessel_reduced(a + 1.0, w);
        const cplx minus = -0.5 * a * bessel_reduced_near(n, t, w) + w * bessel_reduced_near(n - 1, t, w);
        return plus * minus;
    };

    cplx t0 = nu - double(n);
    cplx t1 = t0 * (1.0 + 1e-6) + 1e-30;
    cplx f0 = P(t0), f1 = P(t1);
    double step = std::abs(t1 - t0);
    bool converged = false;
    for (int it = 0; it < 60 && !converged; ++it) {
        if (f1 == cplx{}) {
            step = 0.0;
            converged = true;
            break;
        }
        if (f1 == f0) break;
        const cplx t2 = t1 - f1 * (t1 - t0) / (f1 - f0);
        step = std::abs(t2 - t1);
        t0 = t1;
        f0 = f1;
        t1 = t2;
        f1 = P(t1);
        converged = step <= 1e-14 * std::abs(t1);
    }
    if (!converged && step > 1e-10 * std::abs(t1)) {
        warn("refine_model_root: no convergence near lambda = " + fmt(lambda.real()) + "; keeping solver value");
        return r;
    }
    const cplx refined_value = (double(n) + t1) * (double(n) + t1);
    if (std::abs(refined_value - lambda) > 1e-6 * (1.0 + std::abs(lambda)))
        throw ComputationError("refine_model_root: refinement left the solver root near " + fmt(lambda.real()));
    r.value = refined_value;
    r.n = n;
    r.t = t1;
    r.refined = true;
    r.uncertainty = std::abs(2.0 * (double(n) + t1)) * std::max(step, 1e-14 * std::abs(t1));
    return r;
}

LocalizationReport check_localization(double K, int n, double tol) {
    if (!(K > 0.0)) throw InvalidArgument("check_localization: K must be positive");
    check_count(n);
    const Potential p = model_potential(K);
    const int N = int(std::floor(std::sqrt(K)));
    const int n_mu = std::max(n, N);
    const int n_nu = std::max(n, N + 1);

    auto mu0 = refined(K, 0.0, Kind::Dirichlet, mu_list(p, 0.0, n_mu, tol), tol);
    auto nu0 = refined(K, 0.0, Kind::Neumann, nu_list(p, 0.0, n_nu, tol), tol);

    LocalizationReport rep;
    rep.K = K;

    // d_j = j^2 - mu_j(0), e_0 = nu_0(0), e_k = nu_k(0) - k^2
    auto d = [&](int j) { return -mu0[j - 1].minus(double(j) * j).real(); };
    auto du = [&](int j) { return mu0[j - 1].uncertainty; };
    auto e = [&](int k) { return nu0[k].minus(double(k) * k).real(); };
    auto eu = [&](int k) { return nu0[k].uncertainty; };
    auto all_real = [&](const std::vector<ModelRoot>& v, int count) {
        for (int i = 0; i < count; ++i)
            if (std::abs(v[i].value.imag()) > kMarginFactor * v[i].uncertainty) return false;
        return true;
    };

    {
        ClauseBuilder c;
        for (int j = 1; j <= n; ++j) {
            const auto& r = mu0[j - 1];
            c.weak(label("(j-1)^2 <= mu", j, "0"), above(r, double(j - 1) * (j - 1)), r.uncertainty);
            c.weak(label("mu", j, "0") + " <= j^2", below(r, double(j) * j), r.uncertainty);
        }
        rep.clauses["i"] = c.done();
    }
    {
        ClauseBuilder c;
        if (K <= 1.0) {
            const bool real = all_real(mu0, n);
            if (!real) c.fail("non-real Dirichlet eigenvalue at 0");
            double sum = 0.0, sum_unc = 0.0, sum_abs = 0.0;  // over m < j
            for (int j = 1; j <= n && real; ++j) {
                if (j >= 2) c.strict("partial sum before " + label("mu", j, "0"), sum, sum_unc + 4 * kEps * sum_abs);
                const double partial = K / 2 - sum - d(j);
                c.strict(label("sharpened lower bound of mu", j, "0"), partial,
                         sum_unc + du(j) + 4 * kEps * (K + sum_abs + std::abs(d(j))));
                c.strict(label("mu", j, "0") + " < j^2", d(j), du(j) + 4 * kEps * std::abs(d(j)));
                sum += d(j);
                sum_unc += du(j);
                sum_abs += std::abs(d(j));
            }
            rep.clauses["ii"] = c.done();
        } else {
            rep.clauses["ii"] = {};
        }
    }
    if (K > 1.0) {
        ClauseBuilder c;
        double s = 0.0, su = 0.0;
        for (int m = 1; m <= N; ++m) {
            s += d(m);
            su += du(m);
        }
        const double M1 = K - 2 * s;
        rep.M1 = M1;
        c.strict("M1 > 0", M1, 2 * su + 4 * kEps * K);
        for (int j = int(std::ceil(std::sqrt(K) + 1.0)); j <= n; ++j) {
            c.strict(label("j^2 - M1/2 < mu", j, "0"), M1 / 2 - d(j), su + du(j) + 4 * kEps * K);
            c.strict(label("mu", j, "0") + " < j^2", d(j), du(j) + 4 * kEps * std::abs(d(j)));
        }
        rep.clauses["iii"] = c.done();
    } else {
        rep.clauses["iii"] = {};
    }
    {
        ClauseBuilder c;
        for (int k = 0; k < n; ++k) {
            const auto& r = nu0[k];
            c.weak(label("k^2 <= nu", k, "0"), above(r, double(k) * k), r.uncertainty);
            c.weak(label("nu", k, "0") + " <= (k+1)^2", below(r, double(k + 1) * (k + 1)), r.uncertainty);
        }
        rep.clauses["iv"] = c.done();
    }
    if (K <= 1.0) {
        ClauseBuilder c;
        const bool real = all_real(nu0, n);
        if (!real) c.fail("non-real Neumann eigenvalue at 0");
        double sum = 0.0, sum_unc = 0.0, sum_abs = 0.0;  // e_1 .. e_{k-1}
        for (int k = 0; k < n && real; ++k) {
            c.strict(label("k^2 < nu", k, "0"), e(k), eu(k) + 4 * kEps * std::abs(e(k)));
            const double bound = K / 2 - e(0) - sum - e(k);
            c.strict(label("nu", k, "0") + " below the partial-sum bound", bound,
                     eu(0) + sum_unc + eu(k) + 4 * kEps * (K + sum_abs + e(0) + std::abs(e(k))));
            if (k >= 2) c.strict("partial sum before " + label("nu", k, "0"), sum, sum_unc + 4 * kEps * sum_abs);
            if (k >= 1) {
                sum += e(k);
                sum_unc += eu(k);
                sum_abs += std::abs(e(k));
            }
        }
        rep.clauses["v"] = c.done();
    } else {
        rep.clauses["v"] = {};
    }
    if (K > 1.0) {
        ClauseBuilder c;
        double s = 0.0, su = eu(0);
        for (int m = 1; m <= N; ++m) {
            s += e(m);
            su += eu(m);
        }
        const double M2 = K - 2 * e(0) - 2 * s;
        rep.M2 = M2;
        c.strict("M2 > 0", M2, 2 * su + 4 * kEps * K);
        for (int k = int(std::ceil(std::sqrt(K))); k < n; ++k) {
            c.strict(label("k^2 < nu", k, "0"), e(k), eu(k) + 4 * kEps * std::abs(e(k)));
            c.strict(label("nu", k, "0") + " < k^2 + M2/2", M2 / 2 - e(k), su + eu(k) + 4 * kEps * K);
        }
        rep.clauses["vi"] = c.done();
    } else {
        rep.clauses["vi"] = {};
    }

    const double half = kPi / 2;
    {
        auto mu = refined(K, half, Kind::Dirichlet, mu_list(p, half, n, tol), tol);
        ClauseBuilder c;
        for (int j = 1; 2 * j <= n; ++j) {
            const auto& a = mu[2 * j - 2];
            const auto& b = mu[2 * j - 1];
            const double lo = double(2 * j - 1) * (2 * j - 1), hi = double(2 * j) * (2 * j);
            const double mid = (2 * j - 0.5) * (2 * j - 0.5);
            c.strict(label("(2j-1)^2 < mu", 2 * j - 1, "pi/2"), above(a, lo), a.uncertainty);
            c.ordered(label("mu", 2 * j - 1, "pi/2") + " <= " + label("mu", 2 * j, "pi/2"),
                      (b.value - a.value).real(), a.uncertainty + b.uncertainty + 4 * kEps * hi);
            c.strict(label("mu", 2 * j, "pi/2") + " < (2j)^2", below(b, hi), b.uncertainty);
            if (K <= 1.0) {
                c.strict(label("mu", 2 * j - 1, "pi/2") + " < (2j-1/2)^2", below(a, mid), a.uncertainty);
                c.strict(label("(2j-1/2)^2 < mu", 2 * j, "pi/2"), above(b, mid), b.uncertainty);
            }
        }
        rep.clauses["vii"] = c.done();
    }
    {
        auto nu = refined(K, half, Kind::Neumann, nu_list(p, half, n, tol), tol);
        ClauseBuilder c;
        for (int k = 0; 2 * k + 1 < n; ++k) {
            const auto& a = nu[2 * k];
            const auto& b = nu[2 * k + 1];
            const double lo = double(2 * k) * (2 * k), hi = double(2 * k + 1) * (2 * k + 1);
            const double mid = (2 * k + 0.5) * (2 * k + 0.5);
            c.strict(label("(2k)^2 < nu", 2 * k, "pi/2"), above(a, lo), a.uncertainty);
            c.ordered(label("nu", 2 * k, "pi/2") + " <= " + label("nu", 2 * k + 1, "pi/2"),
                      (b.value - a.value).real(), a.uncertainty + b.uncertainty + 4 * kEps * hi);
            c.strict(label("nu", 2 * k + 1, "pi/2") + " < (2k+1)^2", below(b, hi), b.uncertainty);
            if (K <= 0.5) {
                c.strict(label("nu", 2 * k, "pi/2") + " < (2k+1/2)^2", below(a, mid), a.uncertainty);
                c.strict(label("(2k+1/2)^2 < nu", 2 * k + 1, "pi/2"), above(b, mid), b.uncertainty);
            }
        }
        rep.clauses["viii"] = c.done();
    }
    {
        ClauseBuilder c;
        const std::pair<double, const char*> points[] = {{kPi / 6, "pi/6"}, {kPi / 3, "pi/3"}, {2 * kPi / 5, "2pi/5"}};
        for (const auto& [x0, name] : points) {
            for (Kind kind : {Kind::Dirichlet, Kind::Neumann}) {
                const bool dir = kind == Kind::Dirichlet;
                auto roots = refined(K, x0, kind, dir ? mu_list(p, x0, n, tol) : nu_list(p, x0, n, tol), tol);
                for (std::size_t i = 0; i < roots.size(); ++i) {
                    const auto& r = roots[i];
                    const int centre = int(std::nearbyint(std::sqrt(std::max(0.0, r.value.real()))));
                    double dist = std::numeric_limits<double>::infinity();
                    for (int m = std::max(0, centre - 1); m <= centre + 1; ++m)
                        dist = std::min(dist, std::abs(r.minus(double(m) * m)));
                    const auto what = label(dir ? "mu" : "nu", int(i) + (dir ? 1 : 0), name) + " != m^2";
                    c.strict(what, dist, std::max(kEndpoint / kMarginFactor, r.uncertainty));
                }
            }
        }
        rep.clauses["ix"] = c.done();
    }
    return rep;
}

SuiteReport multiplicity_report(double K, int m_max, double tol) {
    if (!(K != 0.0 && std::abs(K) <= 1.0)) throw InvalidArgument("multiplicity check needs 0 < |K| <= 1");
    check_count(m_max);
    const Potential p = model_potential(K);
    const auto target = periodic_target(p, tol);
    SuiteReport rep;
    const int simple = count_zeros(target, {0.0, {0.25, 0.25}});
    rep.checks.push_back({"E_0 algebraic multiplicity", simple == 1, double(simple)});
    for (int m = 1; m <= m_max; ++m) {
        const double E = double(m) * m;
        const std::string tag = "E_" + std::to_string(m);
        const int alg = count_zeros(target, {E, {0.25, 0.25}});
        rep.checks.push_back({tag + " algebraic multiplicity", alg == 2, double(alg)});
        const int geo = geometric_multiplicity(p, E, 0.0, tol);
        rep.checks.push_back({tag + " geometric multiplicity", geo == 1, double(geo)});
        const auto M = monodromy(p, E, 0.0, tol);
        const double sign = (m % 2 == 0) ? 1.0 : -1.0;
        double dist = 0.0;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) dist += std::norm(M.entries[a][b] - (a == b ? sign : 0.0));
        dist = std::sqrt(dist);
        rep.checks.push_back({tag + " |M - (-1)^m I|", dist > 1e-3, dist});
    }
    return rep;
}

bool check_multiplicities(double K, int m_max, double tol) { return multiplicity_report(K, m_max, tol).passed(); }

SuiteReport sign_report(double K, int n_max, double tol) {
    if (!(K > 0.0)) throw InvalidArgument("sign checks need K > 0");
    check_count(n_max);
    (void)tol;
    SuiteReport rep;
    auto add = [&](const std::string& name, double positive) { rep.checks.push_back({name, positive > 0.0, positive}); };
    for (int n = 1; n <= n_max; ++n) {
        const double sign = (n % 2 == 0) ? 1.0 : -1.0;
        add("(-1)^n s(" + std::to_string(n * n) + ", 0, pi) > 0",
            sign * dirichlet_endpoint_model(double(n) * n, K).real());
    }
    for (int n = 1; n <= n_max; ++n) add("f(-" + std::to_string(n) + ") > 0", f_alpha(-double(n), K).real());
    if (K <= 1.0)
        for (int n = 1; n <= n_max; ++n)
            add("f(-" + std::to_string(2 * n) + "+1/2) < 0", -f_alpha(0.5 - 2.0 * n, K).real());
    for (int n = 0; n <= n_max; ++n) add("g(" + std::to_string(n) + ") > 0", g_alpha(double(n), K).real());
    if (K <= 0.5)
        for (int n = 0; n <= n_max; ++n)
            add("g(-" + std::to_string(2 * n) + "-1/2) < 0", -g_alpha(-2.0 * n - 0.5, K).real());
    return rep;
}

bool check_sign_sequences(double K, int n_max, double tol) { return sign_report(K, n_max, tol).passed(); }

SuiteReport symmetry_report(double K, int n, double tol) {
    check_count(n);
    const Potential p = model_potential(K);
    SuiteReport rep;
    auto add = [&](const std::string& name, double dev) { rep.checks.push_back({name, dev < kAgree, dev}); };
    add("periodicity at x0 = 0.3", periodicity_deviation(p, 0.3, n, tol));
    add("PT symmetry at x0 = pi/4", pt_deviation(p, kPi / 4, n, tol));
    add("PT symmetry at x0 = 0.3", pt_deviation(p, 0.3, n, tol));
    add("reality at x0 = 0, pi/2", reality_deviation(p, n, tol));
    if (K != 0.0) add("rotation covariance K -> iK", rotation_deviation(cplx(0.0, K), 0.0, n, tol));
    return rep;
}

SuiteReport interlacing_report(const Potential& p, int m_max, double x0, double tol) {
    if (!classify_symmetry(p).real_valued) throw InvalidArgument("interlacing needs a real-valued potential");
    check_count(m_max);
    const auto E = first(periodic_eigenvalues(p, 2 * m_max, tol), 2 * m_max + 1);
    const auto mu = mu_list(p, x0, m_max, tol);
    const auto nu = nu_list(p, x0, m_max + 1, tol);
    SuiteReport rep;
    auto add = [&](const std::string& name, double margin) { rep.checks.push_back({name, margin >= -kEndpoint, margin}); };
    add("nu_0 <= E_0", (E[0] - nu[0]).real());
    for (int m = 1; m <= m_max; ++m) {
        const std::string lo = "E_" + std::to_string(2 * m - 1), hi = "E_" + std::to_string(2 * m);
        const std::string mus = "mu_" + std::to_string(m), nus = "nu_" + std::to_string(m);
        add(lo + " <= " + mus, (mu[m - 1] - E[2 * m - 1]).real());
        add(mus + " <= " + hi, (E[2 * m] - mu[m - 1]).real());
        add(lo + " <= " + nus, (nu[m] - E[2 * m - 1]).real());
        add(nus + " <= " + hi, (E[2 * m] - nu[m]).real());
    }
    return rep;
}

}  // namespace hill
