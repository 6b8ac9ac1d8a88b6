#include "hill/floquet.hpp"

#include <cmath>
#include <string>

#include "hill/error.hpp"
#include "hill/ode.hpp"

namespace hill {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTolMargin = 1e-2;

void check_tol(double tol) {
    if (!(tol >= 1e-13 && tol <= 1e-6))
        throw InvalidArgument("integration tolerance " + std::to_string(tol) + " outside [1e-13, 1e-6]");
}

template <std::size_t N>
FundamentalData run(const Potential& p, cplx lambda, double x0, double x1,
                    const TransportOptions& opt, std::vector<FundamentalData>* at_checkpoints) {
    // Layout: c, c', s, s' and, for N == 8, their lambda-derivatives.
    auto rhs = [&](double x, const OdeState<N>& y, OdeState<N>& dy) {
        const cplx q = p.eval(x) - lambda;
        dy[0] = y[1];
        dy[1] = q * y[0];
        dy[2] = y[3];
        dy[3] = q * y[2];
        if constexpr (N == 8) {
            dy[4] = y[5];
            dy[5] = q * y[4] - y[0];
            dy[6] = y[7];
            dy[7] = q * y[6] - y[2];
        }
    };
    auto pack = [&](double x, const OdeState<N>& y, long steps) {
        FundamentalData fd;
        fd.lambda = lambda;
        fd.x0 = x0;
        fd.x1 = x;
        fd.c_end = y[0];
        fd.c_prime_end = y[1];
        fd.s_end = y[2];
        fd.s_prime_end = y[3];
        if constexpr (N == 8) fd.dlambda = std::array<cplx, 4>{y[4], y[5], y[6], y[7]};
        fd.steps = steps;
        return fd;
    };

    OdeState<N> y{};
    y[0] = 1.0;
    y[3] = 1.0;
    // Entries grow like exp(pi |Im sqrt(lambda)|); the margin keeps absolute
    // errors of a few-thousand-sized entries below 1e-8 at tol = 1e-10.
    Dop853<N> solver(IntegratorOptions{kTolMargin * opt.tol, 2'000'000, opt.fixed_steps});
    y = solver.integrate(rhs, x0, x1, y, opt.checkpoints, [&](double x, const OdeState<N>& state) {
        if (at_checkpoints) at_checkpoints->push_back(pack(x, state, solver.stats().accepted));
    });
    return pack(x1, y, solver.stats().accepted);
}

}  // namespace

FundamentalData propagate(const Potential& p, cplx lambda, double x0, double x1,
                          const TransportOptions& opt, std::vector<FundamentalData>* at_checkpoints) {
    if (opt.fixed_steps <= 0) check_tol(opt.tol);
    if (opt.with_dlambda) return run<8>(p, lambda, x0, x1, opt, at_checkpoints);
    return run<4>(p, lambda, x0, x1, opt, at_checkpoints);
}

FundamentalData integrate_fundamental(const Potential& p, cplx lambda, double x0, double tol,
                                      bool with_dlambda) {
    TransportOptions opt;
    opt.tol = tol;
    opt.with_dlambda = with_dlambda;
    return propagate(p, lambda, x0, x0 + kPi, opt);
}

Monodromy monodromy(const Potential& p, cplx lambda, double x0, double tol) {
    FundamentalData fd = integrate_fundamental(p, lambda, x0, tol);
    Monodromy m;
    m.entries = {{{fd.c_end, fd.s_end}, {fd.c_prime_end, fd.s_prime_end}}};
    return m;
}

cplx discriminant(const Potential& p, cplx lambda, double tol) {
    return integrate_fundamental(p, lambda, 0.0, tol).half_trace();
}

DiscriminantValue discriminant_with_derivative(const Potential& p, cplx lambda, double x0, double tol) {
    FundamentalData fd = integrate_fundamental(p, lambda, x0, tol, true);
    return {fd.half_trace(), 0.5 * ((*fd.dlambda)[0] + (*fd.dlambda)[3])};
}

FundamentalData constant_potential_fundamental(cplx lambda, cplx shift, double t, bool with_dlambda) {
    const cplx z = lambda - shift;
    cplx c, s, dc, ds;
    if (std::abs(z) * t * t < 1e-2) {
        // c = sum (-z t^2)^n / (2n)!,  s = t sum (-z t^2)^n / (2n+1)!
        const cplx w = -z * t * t;
        cplx term_c = 1.0, term_s = t;
        c = term_c;
        s = term_s;
        dc = 0.0;
        ds = 0.0;
        for (int n = 1; n < 30; ++n) {
            const double dc_den = (2.0 * n - 1) * (2.0 * n), ds_den = (2.0 * n) * (2.0 * n + 1);
            // d/dz w^n = -t^2 n w^(n-1)
            dc += term_c * (-t * t * n / dc_den);
            ds += term_s * (-t * t * n / ds_den);
            term_c *= w / dc_den;
            term_s *= w / ds_den;
            c += term_c;
            s += term_s;
            if (std::abs(term_c) <= 1e-18 * std::abs(c) && std::abs(term_s) <= 1e-18 * std::abs(s)) break;
        }
    } else {
        const cplx k = std::sqrt(z);
        c = std::cos(k * t);
        s = std::sin(k * t) / k;
        dc = -0.5 * t * s;
        ds = (t * c - s) / (2.0 * z);
    }
    FundamentalData fd;
    fd.lambda = lambda;
    fd.x0 = 0.0;
    fd.x1 = t;
    fd.c_end = c;
    fd.s_end = s;
    fd.c_prime_end = -z * s;
    fd.s_prime_end = c;
    if (with_dlambda) fd.dlambda = std::array<cplx, 4>{dc, -s - z * ds, ds, dc};
    return fd;
}

namespace {

// Root of Delta^2 - 1 on the branch described in diagonal_green, continued
// along the segment from a point left of the numerical range of H.
cplx green_root(const Potential& p, cplx lambda, cplx target_sq, double tol) {
    const double shift = std::abs(lambda) + p.l1_norm() + 1.0;
    const cplx start = -shift;
    auto sq_at = [&](cplx mu, cplx* s_out) {
        FundamentalData fd = integrate_fundamental(p, mu, 0.0, tol);
        if (s_out) *s_out = fd.s_end;
        cplx d = fd.half_trace();
        return d * d - 1.0;
    };

    cplx s0;
    cplx root = std::sqrt(sq_at(start, &s0));
    // g = -s / (2 root) must be positive here.
    if ((-s0 / (2.0 * root)).real() < 0.0) root = -root;

    const cplx segment = lambda - start;
    // March t from 0 to 1 choosing the root nearest the previous one; halve
    // the step where the choice is ambiguous.
    double t = 0.0;
    double dt = 1.0 / 32.0;
    while (t < 1.0) {
        double t_next = std::min(1.0, t + dt);
        cplx r = std::sqrt(t_next == 1.0 ? target_sq : sq_at(start + t_next * segment, nullptr));
        double near = std::abs(r - root), far = std::abs(r + root);
        if (far < near) std::swap(near, far), r = -r;
        if (near > 0.3 * far && dt > 1e-6) {
            dt *= 0.5;
            continue;
        }
        root = r;
        t = t_next;
        dt = std::min(1.0 / 32.0, dt * 2.0);
    }
    return root;
}

cplx green_from(const FundamentalData& fd, cplx root) { return -fd.s_end / (2.0 * root); }

// Delta^2 - 1 at lambda, rejecting lambda on or next to the spectrum.
cplx off_spectrum(const FundamentalData& fd, const char* who) {
    const cplx d = fd.half_trace();
    const cplx sq = d * d - 1.0;
    if (std::abs(sq) < 1e-10)
        throw SpectrumProximityError(std::string(who) + ": |Delta^2 - 1| < 1e-10, lambda is at a periodic eigenvalue");
    if (std::abs(d.imag()) <= 1e-10 && std::abs(d.real()) <= 1.0)
        throw SpectrumProximityError(std::string(who) + ": Delta is real in [-1, 1], lambda lies on the spectrum");
    return sq;
}

}  // namespace

cplx diagonal_green(const Potential& p, cplx lambda, double x, double tol) {
    FundamentalData fd = integrate_fundamental(p, lambda, x, tol);
    const cplx sq = off_spectrum(fd, "diagonal_green");
    return green_from(fd, green_root(p, lambda, sq, tol));
}

double green_identity_residual(const Potential& p, cplx lambda, double x, double tol) {
    check_tol(tol);
    FundamentalData centre = integrate_fundamental(p, lambda, x, tol);
    const cplx sq = off_spectrum(centre, "green_identity_residual");
    const cplx root = green_root(p, lambda, sq, tol);

    // Equal-step transports with a shared step count keep the discretisation
    // error smooth in x, which the second difference below relies on.
    TransportOptions fixed;
    fixed.fixed_steps = static_cast<int>(std::max<long>(64, 2 * centre.steps));
    const double h = kGreenFdStep;
    std::array<cplx, 3> g{};
    for (int k = 0; k < 3; ++k) {
        const double xk = x + (k - 1) * h;
        FundamentalData fd = propagate(p, lambda, xk, xk + kPi, fixed);
        cplx dk = fd.half_trace();
        cplx rk = std::sqrt(dk * dk - 1.0);
        if (std::abs(rk - root) > std::abs(rk + root)) rk = -rk;
        g[k] = green_from(fd, rk);
    }
    const cplx gx = (g[2] - g[0]) / (2.0 * h);
    const cplx gxx = (g[2] - 2.0 * g[1] + g[0]) / (h * h);
    const cplx v = p.eval(x);
    return std::abs(-2.0 * gxx * g[1] + gx * gx + 4.0 * (v - lambda) * g[1] * g[1] - 1.0);
}

}  // namespace hill
