// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "hill/eigensolve.hpp"
#include "hill/floquet.hpp"
#include "hill/potential.hpp"
#include "hill/specfun.hpp"
#include "hill/theorems.hpp"
#include "hill/traceform.hpp"
#include "real_scan.hpp"

using namespace hill;

namespace {

constexpr double pi = 3.14159265358979323846;

struct Outcome {
    bool passed = true;
    std::string detail;
};

int failures = 0;

void run(int id, const char* title, double time_limit, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = time_limit <= 0 || secs < time_limit;
    const bool ok = o.passed && in_time;
    if (!ok) ++failures;
    std::printf("%s %2d %s: %s; %.1f s", ok ? "PASS" : "FAIL", id, title, o.detail.c_str(), secs);
    if (time_limit > 0) std::printf(" (limit %.0f s)", time_limit);
    std::printf("\n");
    std::fflush(stdout);
}

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::vector<cplx> lambda_grid() {
    std::vector<cplx> g;
    for (int i = 0; i < 7; ++i)
        for (int j = 0; j < 5; ++j) g.emplace_back(-5.0 + 35.0 * i / 6.0, -5.0 + 10.0 * j / 4.0);
    return g;
}

Potential random_potential(std::mt19937_64& rng, double scale) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::map<int, cplx> c;
    for (int n = -2; n <= 2; ++n) c[n] = scale * cplx(u(rng), u(rng));
    return Potential(c);
}

cplx random_lambda(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> re(-5.0, 30.0), im(-5.0, 5.0);
    return {re(rng), im(rng)};
}

std::string failed_names(const SuiteReport& r) {
    std::string s;
    for (const auto& c : r.checks)
        if (!c.passed) s += (s.empty() ? "" : ", ") + c.name;
    return s;
}

Outcome discriminant_identity() {
    double worst = 0;
    for (double K : {0.5, 1.0, 4.0}) {
        const auto p = model_potential(K);
        for (cplx lam : lambda_grid())
            worst = std::max(worst, std::abs(discriminant(p, lam, 1e-10) - std::cos(pi * std::sqrt(lam))));
    }
    return {worst < 1e-8, "max |Delta - cos(pi sqrt(lambda))| = " + sci(worst)};
}

Outcome bessel_endpoints() {
    double ws = 0, wc = 0;
    for (double K : {0.5, 1.0, 4.0}) {
        const auto p = model_potential(K);
        for (cplx lam : lambda_grid()) {
            auto fd = integrate_fundamental(p, lam, 0.0);
            ws = std::max(ws, std::abs(fd.s_end - dirichlet_endpoint_model(lam, K)));
            wc = std::max(wc, std::abs(fd.c_prime_end - neumann_endpoint_model(lam, K)));
        }
    }
    return {ws < 1e-8 && wc < 1e-8, "max s deviation " + sci(ws) + ", max c' deviation " + sci(wc)};
}

Outcome dirichlet_localization() {
    const double K = 1.0;
    const auto mu = expand(dirichlet_eigenvalues(model_potential(K), 0.0, 8));
    if (mu.size() < 8) return {false, "fewer than 8 Dirichlet eigenvalues"};
    Outcome o;
    double min_margin = INFINITY, max_im = 0;
    std::string small;
    for (int j = 1; j <= 8; ++j) {
        auto r = refine_model_root(K, 0.0, Kind::Dirichlet, mu[j - 1]);
        const double lower = r.minus(j * j - 0.5).real(), upper = -r.minus(j * j).real();
        const double m = std::min(lower, upper);
        max_im = std::max(max_im, std::abs(r.value.imag()));
        min_margin = std::min(min_margin, m);
        if (!(m > 1e-4)) {
            o.passed = false;
            small += (small.empty() ? "" : " ") + std::to_string(j);
        }
    }
    if (max_im >= 1e-7) o.passed = false;
    o.detail = "min margin " + sci(min_margin) + ", max |Im| " + sci(max_im);
    if (!small.empty()) o.detail += ", margin <= 1e-4 for j = " + small;
    return o;
}

Outcome neumann_localization() {
    const double K = 1.0;
    const auto nu = expand(neumann_eigenvalues(model_potential(K), 0.0, 9));
    if (nu.size() < 9) return {false, "fewer than 9 Neumann eigenvalues"};
    std::vector<ModelRoot> r;
    for (int k = 0; k <= 8; ++k) r.push_back(refine_model_root(K, 0.0, Kind::Neumann, nu[k]));
    Outcome o;
    double min_margin = INFINITY, max_im = 0;
    const double nu0 = r[0].value.real();
    auto bound = [&](double m, double unc) {
        min_margin = std::min(min_margin, m);
        if (!(m > 10 * unc)) o.passed = false;
    };
    bound(nu0, r[0].uncertainty);
    bound(0.5 - nu0, r[0].uncertainty);
    for (int k = 1; k <= 8; ++k) {
        const double e = r[k].minus(k * k).real();
        bound(e, r[k].uncertainty);
        bound(0.5 - nu0 - e, r[0].uncertainty + r[k].uncertainty);
    }
    for (const auto& x : r) max_im = std::max(max_im, std::abs(x.value.imag()));
    if (max_im >= 1e-7) o.passed = false;
    o.detail = "min margin " + sci(min_margin) + ", max |Im| " + sci(max_im);
    return o;
}

bool non_increasing_from(const TraceReport& r, int m0, double slack = 1e-9) {
    for (int m = m0; m < r.M; ++m)
        if (r.errors[m] > r.errors[m - 1] + slack) return false;
    return true;
}

Outcome trace_sums() {
    const auto p = model_potential(1.0);
    const auto E = expand(periodic_eigenvalues(p, 60));
    auto d = trace_from_spectra(p, 0.0, Kind::Dirichlet, 30, E, expand(dirichlet_eigenvalues(p, 0.0, 30)));
    auto n = trace_from_spectra(p, 0.0, Kind::Neumann, 30, E, expand(neumann_eigenvalues(p, 0.0, 31)));
    const bool mono = non_increasing_from(d, 5) && non_increasing_from(n, 5);
    return {d.final_error() < 1e-3 && n.final_error() < 1e-3 && mono,
            "|S_30 - 1| Dirichlet " + sci(d.final_error()) + ", Neumann " + sci(n.final_error()) +
                (mono ? ", errors non-increasing from M = 5" : ", error sequence rises after M = 5")};
}

Outcome interleaving() {
    Outcome o;
    auto k1 = check_localization(1.0, 6);
    auto k04 = check_localization(0.4, 6);
    const auto& a = k1.clauses.at("vii");
    const auto& b = k04.clauses.at("vii");
    const auto& c = k04.clauses.at("viii");
    o.passed = a.passed && b.passed && c.passed;
    double m = INFINITY;
    for (const auto* cl : {&a, &b, &c})
        for (double v : cl->margins) m = std::min(m, v);
    o.detail = "min margin " + sci(m);
    for (const auto* cl : {&a, &b, &c})
        for (const auto& note : cl->notes) o.detail += "; " + note;
    return o;
}

Outcome multiplicities() {
    Outcome o;
    int checks = 0;
    for (double K : {0.5, 1.0}) {
        auto r = multiplicity_report(K, 3);
        checks += int(r.checks.size());
        if (!r.passed()) {
            o.passed = false;
            o.detail += "K=" + sci(K) + " failed: " + failed_names(r) + "; ";
        }
    }
    const int g = geometric_multiplicity(Potential(), 1.0);
    if (g != 2) o.passed = false;
    o.detail += std::to_string(checks) + " model checks, V=0 geometric multiplicity at 1 is " + std::to_string(g);
    return o;
}

Outcome symmetry() {
    Outcome o;
    std::vector<std::string> bad;
    for (double K : {0.5, 1.0}) {
        const auto p = model_potential(K);
        for (double x0 : {pi / 4, 0.3})
            if (!check_pt_symmetry(p, x0, 5)) bad.push_back("PT K=" + sci(K) + " x0=" + sci(x0));
        if (!check_reality_at_special_points(p, 5)) bad.push_back("reality K=" + sci(K));
    }
    o.passed = bad.empty();
    o.detail = bad.empty() ? "PT and reality hold" : "failed:";
    for (const auto& s : bad) o.detail += " [" + s + "]";
    return o;
}

cplx j_second(cplx nu, cplx u) {
    return -nu / (u * u) * bessel_j(nu, u) + nu / u * bessel_j_prime(nu, u) - bessel_j_prime(nu + 1.0, u);
}

Outcome properties() {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    double wr = 0, dx = 0, deriv = 0, bes = 0, green = 0;

    for (int k = 0; k < 50; ++k) {
        auto p = random_potential(rng, 1.0);
        cplx lam = random_lambda(rng);
        wr = std::max(wr, std::abs(integrate_fundamental(p, lam, 3 * u01(rng)).wronskian() - 1.0));
    }
    for (int k = 0; k < 20; ++k) {
        auto p = random_potential(rng, 1.0);
        cplx lam = random_lambda(rng);
        cplx d0 = discriminant(p, lam);
        dx = std::max(dx, std::abs(integrate_fundamental(p, lam, 6 * u01(rng) - 3).half_trace() - d0));
    }
    const double h = 1e-5;
    for (int k = 0; k < 5; ++k) {
        auto p = random_potential(rng, 1.0);
        cplx lam = random_lambda(rng);
        const double x0 = u01(rng), x1 = x0 + pi;
        TransportOptions fixed;
        fixed.fixed_steps = 400;
        auto at = [&](double a) { return propagate(p, lam, a, x1, fixed); };
        auto fp = at(x0 + h), fm = at(x0 - h), f0 = at(x0);
        cplx dc = (fp.c_end - fm.c_end) / (2 * h), ds = (fp.s_end - fm.s_end) / (2 * h);
        deriv = std::max(deriv, std::abs(dc - (lam - p.eval(x0)) * f0.s_end) / (1 + std::abs(dc)));
        deriv = std::max(deriv, std::abs(ds + f0.c_end) / (1 + std::abs(ds)));
    }
    std::uniform_real_distribution<double> ur(0.2, 4.0), ui(-1.5, 1.5), nr(-3.0, 3.0);
    for (int k = 0; k < 60; ++k) {
        cplx nu(nr(rng), 0.5 * ui(rng));
        cplx uu(ur(rng), ui(rng));
        cplx J = bessel_j(nu, uu), Jp = bessel_j_prime(nu, uu), Jpp = j_second(nu, uu);
        double scale = std::abs(Jpp) + std::abs(Jp / uu) + std::abs(J) * (1 + std::abs(nu * nu / (uu * uu)));
        bes = std::max(bes, std::abs(Jpp + Jp / uu + (1.0 - nu * nu / (uu * uu)) * J) / scale);
        if (std::abs(nu - std::round(nu.real())) < 0.05) continue;
        cplx w = J * bessel_j_prime(-nu, uu) - Jp * bessel_j(-nu, uu);
        cplx expect = -2.0 * sin_pi(nu) / (pi * uu);
        bes = std::max(bes, std::abs(w - expect) / std::abs(expect));
    }
    std::uniform_real_distribution<double> ux(0.0, pi), uim(0.5, 3.0);
    for (int k = 0; k < 10; ++k) {
        auto p = random_potential(rng, 0.5);
        cplx lam(uim(rng) * 3 - 4.0, uim(rng));
        green = std::max(green, green_identity_residual(p, lam, ux(rng)));
    }
    return {wr < 1e-10 && dx < 1e-8 && deriv < 1e-6 && bes < 1e-9 && green < 1e-6,
            "Wronskian " + sci(wr) + ", x0-shift " + sci(dx) + ", x0-derivatives " + sci(deriv) + ", Bessel " +
                sci(bes) + ", Green " + sci(green)};
}

Outcome real_control() {
    const Potential mathieu({{1, 1.0}, {-1, 1.0}});  // 2 cos 2x
    auto rep = interlacing_report(mathieu, 4);
    Outcome o{rep.passed(), std::to_string(rep.checks.size()) + " interlacing checks"};
    if (!rep.passed()) o.detail += ", failed: " + failed_names(rep);

    auto edges = scan::band_edges(mathieu, -1.0, 25.5, 0.05);
    auto E = expand(periodic_eigenvalues(mathieu, 10));
    double dev = 0;
    if (edges.size() != 11 || E.size() < 11) {
        o.passed = false;
        o.detail += ", scan found " + std::to_string(edges.size()) + " edges";
        return o;
    }
    for (int m = 0; m <= 8; ++m) dev = std::max(dev, std::abs(edges[m] - E[m].real()));
    dev = std::max(dev, std::abs(0.5 * (edges[9] + edges[10]) - E[9].real()));
    auto s = scan::roots([&](double x) { return integrate_fundamental(mathieu, x, 0.0).s_end.real(); }, -1.0, 17.0, 0.05);
    auto mu = expand(dirichlet_eigenvalues(mathieu, 0.0, 4));
    if (s.size() != 4) {
        o.passed = false;
        o.detail += ", scan found " + std::to_string(s.size()) + " Dirichlet roots";
        return o;
    }
    for (int j = 0; j < 4; ++j) dev = std::max(dev, std::abs(s[j] - mu[j].real()));
    if (dev >= 1e-6) o.passed = false;
    o.detail += ", scan deviation " + sci(dev);
    return o;
}

}  // namespace

int main() {
    run(1, "model discriminant identity", 30, discriminant_identity);
    run(2, "ODE-Bessel endpoint cross-validation", 60, bessel_endpoints);
    run(3, "Dirichlet localization K=1", 60, dirichlet_localization);
    run(4, "Neumann localization K=1", 60, neumann_localization);
    run(5, "trace sums K=1 x=0 M=30", 120, trace_sums);
    run(6, "pi/2 interleaving", 90, interleaving);
    run(7, "multiplicities", 60, multiplicities);
    run(8, "symmetry suite", 60, symmetry);
    run(9, "property suites", 60, properties);
    run(10, "real-potential interlacing", 0, real_control);
    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
