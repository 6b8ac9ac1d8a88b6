#include "hill/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>

#include "hill/error.hpp"
#include "hill/parallel.hpp"

namespace hill {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTightHalfWidth = 5e-5;  // tight confirmation box, side 1e-4
constexpr int kMaxQuadPoints = 512;
// Integration tolerance for winding counts over wide boxes.
constexpr double kCountTol = 1e-7;

// ---------------------------------------------------------------------------
// Winding numbers

enum class WindStatus { Ok, BoundaryZero, Quadrature };

struct Winding {
    WindStatus status = WindStatus::Ok;
    int count = 0;
};

std::array<cplx, 4> corners(const SearchBox& b) {
    return {cplx(b.re_lo(), b.im_lo()), cplx(b.re_hi(), b.im_lo()), cplx(b.re_hi(), b.im_hi()),
            cplx(b.re_lo(), b.im_hi())};
}

std::vector<cplx> boundary_points(const SearchBox& b, int n) {
    auto c = corners(b);
    std::vector<cplx> z(4 * static_cast<std::size_t>(n));
    for (int s = 0; s < 4; ++s)
        for (int k = 0; k < n; ++k) z[s * n + k] = c[s] + (c[(s + 1) % 4] - c[s]) * (double(k) / n);
    return z;
}

// Trapezoid rule for (1/2 pi i) \oint f'/f along the rectangle, cross-checked
// by unwrapping the phase of f between consecutive samples.  The count is
// accepted when the integral is within 0.25 of an integer, no phase step
// exceeds pi/3 and both agree.
Winding wind(const TargetFunction& f, const SearchBox& box, int n0 = 64) {
    int n = n0;
    std::vector<cplx> z = boundary_points(box, n);
    std::vector<TargetValue> v(z.size());
    parallel_for(z.size(), [&](std::size_t i) { v[i] = f(z[i]); });

    for (;;) {
        double max_abs = 0.0, min_abs = INFINITY;
        for (const auto& t : v) {
            const double a = std::abs(t.value);
            if (!std::isfinite(a) || !std::isfinite(std::abs(t.derivative))) return {WindStatus::Quadrature, 0};
            max_abs = std::max(max_abs, a);
            min_abs = std::min(min_abs, a);
        }
        if (!(min_abs > 1e-10 * max_abs)) return {WindStatus::BoundaryZero, 0};

        const std::size_t m = z.size();
        cplx integral = 0.0;
        double phase = 0.0, max_step = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const std::size_t j = (i + 1) % m;
            const cplx gi = v[i].derivative / v[i].value, gj = v[j].derivative / v[j].value;
            integral += 0.5 * (gi + gj) * (z[j] - z[i]);
            const double d = std::arg(v[j].value / v[i].value);
            phase += d;
            max_step = std::max(max_step, std::abs(d));
        }
        const double w = (integral / cplx(0.0, 2.0 * kPi)).real();
        const long r = std::lround(w);
        const long r_phase = std::lround(phase / (2.0 * kPi));
        if (std::abs(w - double(r)) < 0.25 && max_step < kPi / 3.0 && r == r_phase)
            return {WindStatus::Ok, static_cast<int>(r)};
        if (2 * n > kMaxQuadPoints) return {max_step >= kPi / 3.0 ? WindStatus::BoundaryZero : WindStatus::Quadrature, 0};

        // Double the sampling, evaluating only the new midpoints.
        std::vector<cplx> zm(m);
        for (std::size_t i = 0; i < m; ++i) zm[i] = 0.5 * (z[i] + z[(i + 1) % m]);
        std::vector<TargetValue> vm(m);
        parallel_for(m, [&](std::size_t i) { vm[i] = f(zm[i]); });
        std::vector<cplx> z2(2 * m);
        std::vector<TargetValue> v2(2 * m);
        for (std::size_t i = 0; i < m; ++i) {
            z2[2 * i] = z[i];
            v2[2 * i] = v[i];
            z2[2 * i + 1] = zm[i];
            v2[2 * i + 1] = vm[i];
        }
        z = std::move(z2);
        v = std::move(v2);
        n *= 2;
    }
}

SearchBox enlarge(const SearchBox& b, int attempt) {
    SearchBox e = b;
    const double f = 1.0 + 0.0137 * attempt;
    e.half_widths = {b.half_widths[0] * f, b.half_widths[1] * f};
    return e;
}

// ---------------------------------------------------------------------------
// Zero isolation

struct NewtonResult {
    cplx value;
    double residual;
    bool converged;
};

// Multiplicity-scaled Newton z <- z - k f/f' from the box centre, confined to
// the box.  Returns the iterate with the smallest residual.
NewtonResult schroder(const TargetFunction& f, const SearchBox& box, int k) {
    cplx z = box.center;
    TargetValue t = f(z);
    NewtonResult best{z, std::abs(t.value), false};
    int no_gain = 0;
    for (int it = 0; it < 60; ++it) {
        if (t.value == 0.0) {
            best.converged = true;
            break;
        }
        if (t.derivative == 0.0) break;
        const cplx dz = double(k) * t.value / t.derivative;
        const cplx next = z - dz;
        if (!box.contains(next) || !std::isfinite(next.real()) || !std::isfinite(next.imag())) break;
        z = next;
        t = f(z);
        const double r = std::abs(t.value);
        if (r < best.residual) {
            best.value = z;
            best.residual = r;
            no_gain = 0;
        } else if (++no_gain >= 3) {
            break;
        }
        if (std::abs(dz) <= 1e-13 * (1.0 + std::abs(z))) {
            best.converged = true;
            break;
        }
    }
    return best;
}

// A double zero of f is a simple zero of f'; secant steps on f' recover the
// digits that Newton on f loses (its precision there is only sqrt(eps)).
cplx polish_on_derivative(const TargetFunction& f, const SearchBox& tight, cplx z0) {
    cplx a = z0, b = z0 + cplx(1e-7, 1e-7) * (1.0 + std::abs(z0)) * 1e-2;
    cplx ga = f(a).derivative, gb = f(b).derivative;
    cplx best = std::abs(ga) <= std::abs(gb) ? a : b;
    double best_abs = std::min(std::abs(ga), std::abs(gb));
    for (int it = 0; it < 30; ++it) {
        if (gb == ga) break;
        const cplx c = b - gb * (b - a) / (gb - ga);
        if (!tight.contains(c) || !std::isfinite(c.real()) || !std::isfinite(c.imag())) break;
        a = b;
        ga = gb;
        b = c;
        gb = f(b).derivative;
        if (std::abs(gb) < best_abs) {
            best_abs = std::abs(gb);
            best = b;
        }
        if (std::abs(b - a) <= 1e-15 * (1.0 + std::abs(b))) break;
    }
    return best;
}

double max_side(const SearchBox& b) { return 2.0 * std::max(b.half_widths[0], b.half_widths[1]); }

// f is used for Newton, polishing and the tight boxes; coarse (a cheaper
// evaluation of the same function) for counting in boxes wider than 1e-2.
void isolate(const TargetFunction& f, const TargetFunction& coarse, const SearchBox& box, int k, int depth,
             std::vector<Zero>& out) {
    if (k <= 0) return;

    NewtonResult nr = schroder(f, box, k);
    if (k == 1 && nr.converged) {
        out.push_back({nr.value, 1, nr.residual, false});
        return;
    }
    if (max_side(box) <= 2.0 * kTightHalfWidth) {
        out.push_back({nr.value, k, nr.residual, !nr.converged && k == 1});
        return;
    }
    {
        SearchBox tight{nr.value, {kTightHalfWidth, kTightHalfWidth}};
        Winding w = wind(f, tight);
        if (w.status == WindStatus::Ok && w.count == k) {
            cplx z = nr.value;
            double res = nr.residual;
            if (k == 2) {
                z = polish_on_derivative(f, tight, z);
                res = std::abs(f(z).value);
            }
            out.push_back({z, k, res, false});
            return;
        }
    }
    if (depth <= 0) {
        std::ostringstream msg;
        msg << "find_zeros: maximum subdivision depth reached near " << box.center << " with " << k
            << " zeros unresolved";
        throw ConvergenceError(msg.str());
    }

    // Split the longer side (both when the box is roughly square) at
    // slightly off-centre lines; other offsets are tried if a line passes
    // too close to a zero.
    static constexpr std::array<double, 6> offsets{0.0123, -0.0371, 0.0617, -0.0853, 0.1109, -0.1301};
    const double w = 2.0 * box.half_widths[0], h = 2.0 * box.half_widths[1];
    const bool split_x = w >= 0.5 * h, split_y = h >= 0.5 * w;
    for (double off : offsets) {
        std::vector<double> xs{box.re_lo()}, ys{box.im_lo()};
        if (split_x) xs.push_back(box.re_lo() + (0.5 + off) * w);
        if (split_y) ys.push_back(box.im_lo() + (0.5 - off) * h);
        xs.push_back(box.re_hi());
        ys.push_back(box.im_hi());
        std::vector<SearchBox> subs;
        for (std::size_t i = 0; i + 1 < xs.size(); ++i)
            for (std::size_t j = 0; j + 1 < ys.size(); ++j)
                subs.push_back(SearchBox::from_corners(xs[i], xs[i + 1], ys[j], ys[j + 1]));
        std::vector<int> counts;
        int total = 0;
        bool ok = true;
        for (const auto& s : subs) {
            Winding wd = wind(max_side(s) > 1e-2 ? coarse : f, s);
            if (wd.status != WindStatus::Ok || wd.count < 0) {
                ok = false;
                break;
            }
            counts.push_back(wd.count);
            total += wd.count;
        }
        if (!ok || total != k) continue;
        for (std::size_t i = 0; i < subs.size(); ++i) isolate(f, coarse, subs[i], counts[i], depth - 1, out);
        return;
    }
    std::ostringstream msg;
    msg << "find_zeros: sub-box counts never matched the parent count " << k << " near " << box.center;
    throw CountMismatchError(msg.str());
}

// Sort by |z|, then by arg z among values whose magnitudes agree to 1e-9.
template <class T, class Get>
void magnitude_sort(std::vector<T>& v, Get get) {
    std::sort(v.begin(), v.end(), [&](const T& a, const T& b) { return std::abs(get(a)) < std::abs(get(b)); });
    std::size_t i = 0;
    while (i < v.size()) {
        std::size_t j = i + 1;
        while (j < v.size() &&
               std::abs(get(v[j])) - std::abs(get(v[j - 1])) <= 1e-9 * std::max(1.0, std::abs(get(v[j - 1]))))
            ++j;
        std::sort(v.begin() + i, v.begin() + j,
                  [&](const T& a, const T& b) { return std::arg(get(a)) < std::arg(get(b)); });
        i = j;
    }
}

// ---------------------------------------------------------------------------
// Eigenvalue drivers

int first_index(Kind k) { return k == Kind::Dirichlet ? 1 : 0; }

// Magnitude order; real potentials (self-adjoint problems with real spectra)
// are numbered in ascending order, which agrees with magnitude order unless
// some eigenvalues are negative.
std::vector<Eigenvalue> number(std::vector<Eigenvalue> list, Kind kind, int wanted, bool ascending) {
    if (ascending)
        std::sort(list.begin(), list.end(),
                  [](const Eigenvalue& a, const Eigenvalue& b) { return a.value.real() < b.value.real(); });
    else
        magnitude_sort(list, [](const Eigenvalue& e) { return e.value; });
    std::vector<Eigenvalue> out;
    int pos = 0;
    for (auto& e : list) {
        if (pos >= wanted) break;
        e.kind = kind;
        e.index = first_index(kind) + pos;
        pos += e.alg_multiplicity;
        out.push_back(e);
    }
    return out;
}

std::vector<Eigenvalue> constant_case(const Potential& p, Kind kind, double x0, int wanted) {
    const cplx c = p.coeff(0);
    const int top = wanted + static_cast<int>(std::ceil(std::sqrt(std::abs(c)))) + 2;
    std::vector<Eigenvalue> list;
    auto add = [&](cplx v, int mult) {
        Eigenvalue e;
        e.value = v;
        e.alg_multiplicity = mult;
        e.x0 = x0;
        list.push_back(e);
    };
    switch (kind) {
        case Kind::Dirichlet:
            for (int j = 1; j <= top; ++j) add(double(j) * j + c, 1);
            break;
        case Kind::Neumann:
            for (int j = 0; j <= top; ++j) add(double(j) * j + c, 1);
            break;
        case Kind::Periodic:
            add(c, 1);
            for (int j = 1; j <= top; ++j) add(double(j) * j + c, 2);
            break;
    }
    return number(std::move(list), kind, wanted, classify_symmetry(p).real_valued);
}

TargetFunction target_for(const Potential& p, Kind kind, double x0, double tol) {
    switch (kind) {
        case Kind::Dirichlet: return dirichlet_target(p, x0, tol);
        case Kind::Neumann: return neumann_target(p, x0, tol);
        case Kind::Periodic: return periodic_target(p, tol);
    }
    return {};
}

// Every eigenvalue of the three boundary problems lies in the numerical range
// of the operator, inside Re >= -S, |Im| <= S with S = sum |v_n|.  The strip
// Im in [-B, B], B = 2(1 + S), is cut into slabs [-B, 1/4], [(m-1/2)^2,
// (m+1/2)^2], ... whose counts are exact by the argument principle.  Slabs are
// added until the wanted number of zeros is found and the last one lies
// left of the covered region.
std::vector<Eigenvalue> solve_kind(const Potential& p, Kind kind, double x0, int wanted, double tol) {
    if (wanted < 1) throw InvalidArgument("eigenvalue count must be >= 1");
    if (p.is_constant()) return constant_case(p, kind, x0, wanted);

    const TargetFunction f = target_for(p, kind, x0, tol);
    const TargetFunction coarse = target_for(p, kind, x0, std::max(tol, kCountTol));
    const bool real_order = classify_symmetry(p).real_valued;
    const double B = 2.0 * (1.0 + p.l1_norm());

    struct Slab {
        SearchBox box;
        int count;
    };
    std::vector<Slab> slabs;
    double left = -B;
    int m = 0, total = 0;

    auto add_slab = [&] {
        const double nominal = (m + 0.5) * (m + 0.5);
        const double room = std::min(1.0, 0.5 * (nominal - left));
        static constexpr std::array<double, 6> shifts{0.0, 0.071, -0.053, 0.137, -0.109, 0.193};
        for (double sh : shifts) {
            const double right = nominal + sh * room;
            SearchBox box = SearchBox::from_corners(left, right, -B, B);
            Winding w = wind(coarse, box);
            if (w.status == WindStatus::Ok && w.count >= 0) {
                slabs.push_back({box, w.count});
                total += w.count;
                left = right;
                ++m;
                return;
            }
        }
        std::ostringstream msg;
        msg << to_string(kind) << " search: could not count zeros in the slab ending near Re = " << nominal;
        throw QuadratureError(msg.str());
    };

    std::vector<Zero> zeros;
    std::size_t solved = 0;
    for (int round = 0; round < 10000; ++round) {
        while (total < wanted) add_slab();
        std::vector<std::vector<Zero>> found(slabs.size() - solved);
        parallel_for(found.size(), [&](std::size_t i) {
            const Slab& s = slabs[solved + i];
            isolate(f, coarse, s.box, s.count, 40, found[i]);
        });
        for (auto& v : found) zeros.insert(zeros.end(), v.begin(), v.end());
        solved = slabs.size();

        if (real_order)
            std::sort(zeros.begin(), zeros.end(),
                      [](const Zero& a, const Zero& b) { return a.value.real() < b.value.real(); });
        else
            magnitude_sort(zeros, [](const Zero& z) { return z.value; });
        int pos = 0;
        double last_mag = 0.0;
        for (const auto& z : zeros) {
            if (pos >= wanted) break;
            pos += z.multiplicity;
            last_mag = std::abs(z.value);
        }
        if (pos >= wanted && last_mag <= left) break;
        add_slab();
    }

    std::vector<Eigenvalue> list;
    for (const auto& z : zeros) {
        Eigenvalue e;
        e.value = z.value;
        e.alg_multiplicity = z.multiplicity;
        e.residual = z.residual;
        e.flagged = z.flagged;
        e.x0 = kind == Kind::Periodic ? 0.0 : x0;
        list.push_back(e);
    }
    return number(std::move(list), kind, wanted, classify_symmetry(p).real_valued);
}

}  // namespace

std::string to_string(Kind k) {
    switch (k) {
        case Kind::Dirichlet: return "dirichlet";
        case Kind::Neumann: return "neumann";
        case Kind::Periodic: return "periodic";
    }
    return "?";
}

Kind kind_from_string(const std::string& s) {
    if (s == "dirichlet") return Kind::Dirichlet;
    if (s == "neumann") return Kind::Neumann;
    if (s == "periodic") return Kind::Periodic;
    throw InvalidArgument("unknown eigenvalue kind '" + s + "' (expected dirichlet, neumann or periodic)");
}

SearchBox SearchBox::from_corners(double re_lo, double re_hi, double im_lo, double im_hi) {
    return {cplx(0.5 * (re_lo + re_hi), 0.5 * (im_lo + im_hi)), {0.5 * (re_hi - re_lo), 0.5 * (im_hi - im_lo)}};
}

TargetFunction dirichlet_target(const Potential& p, double x0, double tol) {
    return [p, x0, tol](cplx lambda) {
        FundamentalData fd = integrate_fundamental(p, lambda, x0, tol, true);
        return TargetValue{fd.s_end, (*fd.dlambda)[2]};
    };
}

TargetFunction neumann_target(const Potential& p, double x0, double tol) {
    return [p, x0, tol](cplx lambda) {
        FundamentalData fd = integrate_fundamental(p, lambda, x0, tol, true);
        return TargetValue{fd.c_prime_end, (*fd.dlambda)[1]};
    };
}

TargetFunction periodic_target(const Potential& p, double tol) {
    return [p, tol](cplx lambda) {
        DiscriminantValue d = discriminant_with_derivative(p, lambda, 0.0, tol);
        return TargetValue{d.value * d.value - 1.0, 2.0 * d.value * d.derivative};
    };
}

int count_zeros(const TargetFunction& f, const SearchBox& box, int quad_points) {
    if (!(box.half_widths[0] > 0 && box.half_widths[1] > 0)) throw InvalidArgument("search box half-widths must be positive");
    if (quad_points < 4) throw InvalidArgument("quad_points must be >= 4");
    WindStatus last = WindStatus::Ok;
    for (int attempt = 0; attempt <= 5; ++attempt) {
        Winding w = wind(f, enlarge(box, attempt), quad_points);
        if (w.status == WindStatus::Ok) return w.count;
        last = w.status;
    }
    std::ostringstream msg;
    msg << "count_zeros: box centred at " << box.center;
    if (last == WindStatus::BoundaryZero) {
        msg << " has a zero on or next to its boundary after 5 perturbations";
        throw BoundaryZeroError(msg.str());
    }
    msg << " gives a non-integral winding number with " << kMaxQuadPoints << " points per side";
    throw QuadratureError(msg.str());
}

std::vector<Zero> find_zeros(const TargetFunction& f, const SearchBox& box, int max_depth) {
    if (max_depth < 0) throw InvalidArgument("max_depth must be >= 0");
    WindStatus last = WindStatus::Ok;
    for (int attempt = 0; attempt <= 5; ++attempt) {
        SearchBox b = enlarge(box, attempt);
        Winding w = wind(f, b);
        if (w.status != WindStatus::Ok) {
            last = w.status;
            continue;
        }
        std::vector<Zero> out;
        isolate(f, f, b, w.count, max_depth, out);
        magnitude_sort(out, [](const Zero& z) { return z.value; });
        return out;
    }
    if (last == WindStatus::BoundaryZero)
        throw BoundaryZeroError("find_zeros: zero on the box boundary after 5 perturbations");
    throw QuadratureError("find_zeros: non-integral winding number");
}

std::vector<Eigenvalue> dirichlet_eigenvalues(const Potential& p, double x0, int n_max, double tol) {
    return solve_kind(p, Kind::Dirichlet, x0, n_max, tol);
}

std::vector<Eigenvalue> neumann_eigenvalues(const Potential& p, double x0, int n_max, double tol) {
    return solve_kind(p, Kind::Neumann, x0, n_max, tol);
}

std::vector<Eigenvalue> periodic_eigenvalues(const Potential& p, int n_max, double tol) {
    if (n_max < 0) throw InvalidArgument("n_max must be >= 0");
    return solve_kind(p, Kind::Periodic, 0.0, n_max + 1, tol);
}

std::vector<cplx> expand(const std::vector<Eigenvalue>& eigs) {
    std::vector<cplx> out;
    for (const auto& e : eigs)
        for (int i = 0; i < e.alg_multiplicity; ++i) out.push_back(e.value);
    return out;
}

int geometric_multiplicity(const Potential& p, cplx E, double x0, double tol) {
    Monodromy m = monodromy(p, E, x0, tol);
    const cplx d = 0.5 * m.trace();
    double sign;
    if (std::abs(d - 1.0) < 1e-8)
        sign = 1.0;
    else if (std::abs(d + 1.0) < 1e-8)
        sign = -1.0;
    else {
        std::ostringstream msg;
        msg << "geometric_multiplicity: " << E << " is not a periodic eigenvalue (Delta = " << d << ")";
        throw InvalidArgument(msg.str());
    }
    double dev = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) dev = std::max(dev, std::abs(m.entries[i][j] - (i == j ? sign : 0.0)));
    return dev < 1e-6 ? 2 : 1;
}

// ---------------------------------------------------------------------------
// Spectral arcs

namespace {

struct ArcTracer {
    const Potential& p;
    const SearchBox& region;
    double step;
    double tol;

    DiscriminantValue at(cplx z) const { return discriminant_with_derivative(p, z, 0.0, tol); }

    static bool in_band(const DiscriminantValue& d) { return std::abs(d.value.real()) <= 1.0 + 1e-9; }

    // Moves z onto Im Delta = 0 along the line z + s * normal.
    std::optional<cplx> correct(cplx z, cplx normal) const {
        double s = 0.0;
        for (int it = 0; it < 12; ++it) {
            DiscriminantValue d = at(z + s * normal);
            const double slope = (d.derivative * normal).imag();
            if (std::abs(d.value.imag()) <= 1e-13 * (1.0 + std::abs(d.value))) return z + s * normal;
            if (slope == 0.0) break;
            const double ds = -d.value.imag() / slope;
            s += ds;
            if (std::abs(s) > step) break;
            if (std::abs(ds) <= 1e-14 * (1.0 + std::abs(z))) return z + s * normal;
        }
        // Bisection fallback on [-step/2, step/2].
        double a = -0.5 * step, b = 0.5 * step;
        double fa = at(z + a * normal).value.imag(), fb = at(z + b * normal).value.imag();
        if (fa * fb > 0.0) return std::nullopt;
        for (int it = 0; it < 60; ++it) {
            const double c = 0.5 * (a + b);
            const double fc = at(z + c * normal).value.imag();
            if ((fc <= 0.0) == (fa <= 0.0)) {
                a = c;
                fa = fc;
            } else {
                b = c;
            }
            if (b - a <= 1e-14 * (1.0 + std::abs(z))) break;
        }
        return z + 0.5 * (a + b) * normal;
    }

    // Point on the chord [inside, outside] where |Re Delta| = 1, pulled back
    // onto the level set.
    cplx band_end(cplx inside, cplx outside) const {
        cplx a = inside, b = outside;
        for (int it = 0; it < 50; ++it) {
            cplx c = 0.5 * (a + b);
            const cplx dir = b - a;
            cplx normal = cplx(0, 1) * dir / std::abs(dir);
            cplx cc = correct(c, normal).value_or(c);
            if (std::abs(at(cc).value.real()) <= 1.0)
                a = cc;
            else
                b = cc;
            if (std::abs(b - a) <= 1e-12 * (1.0 + std::abs(a))) break;
        }
        return a;
    }

    // Last point of [inside, outside] inside the region (linear clip).
    cplx clip(cplx inside, cplx outside) const {
        double t = 1.0;
        auto lim = [&](double from, double to, double lo, double hi) {
            if (to > hi) t = std::min(t, (hi - from) / (to - from));
            if (to < lo) t = std::min(t, (lo - from) / (to - from));
        };
        lim(inside.real(), outside.real(), region.re_lo(), region.re_hi());
        lim(inside.imag(), outside.imag(), region.im_lo(), region.im_hi());
        return inside + t * (outside - inside);
    }

    // Follows the arc from seed in direction dir.  Returns the points after
    // the seed and whether tracing stalled.
    std::pair<std::vector<cplx>, bool> march(cplx seed, cplx dir) const {
        std::vector<cplx> pts;
        cplx prev = seed;
        cplx d = dir / std::abs(dir);
        double h = step;
        const int max_points = 4 * static_cast<int>((2 * region.half_widths[0] + 2 * region.half_widths[1]) / step) + 1000;
        while (static_cast<int>(pts.size()) < max_points) {
            cplx pred = prev + h * d;
            std::optional<cplx> next = correct(pred, cplx(0, 1) * d);
            if (!next || std::abs(*next - prev) > 2.0 * h) {
                h *= 0.5;
                if (h < 1e-3 * step) return {pts, true};
                continue;
            }
            if (!region.contains(*next)) {
                pts.push_back(clip(prev, *next));
                return {pts, false};
            }
            DiscriminantValue dv = at(*next);
            if (!in_band(dv)) {
                pts.push_back(band_end(prev, *next));
                return {pts, false};
            }
            // Closed loop back to the seed.
            if (pts.size() > 2 && std::abs(*next - seed) < 0.75 * step) {
                pts.push_back(seed);
                return {pts, false};
            }
            cplx chord = *next - prev;
            d = chord / std::abs(chord);
            pts.push_back(*next);
            prev = *next;
            h = std::min(step, 2.0 * h);
        }
        return {pts, true};
    }
};

double segment_distance(cplx z, cplx a, cplx b) {
    const cplx ab = b - a;
    const double len2 = std::norm(ab);
    if (len2 == 0.0) return std::abs(z - a);
    const double t = std::clamp(((z - a) * std::conj(ab)).real() / len2, 0.0, 1.0);
    return std::abs(z - (a + t * ab));
}

bool near_traced(cplx z, const std::vector<Polyline>& arcs, double step) {
    for (const auto& arc : arcs) {
        if (arc.points.size() == 1 && std::abs(z - arc.points[0]) < 0.5 * step) return true;
        for (std::size_t i = 0; i + 1 < arc.points.size(); ++i)
            if (segment_distance(z, arc.points[i], arc.points[i + 1]) < 0.5 * step) return true;
    }
    return false;
}

}  // namespace

std::vector<Polyline> spectral_arcs(const Potential& p, const SearchBox& region, double step, double tol) {
    if (!(step > 0.0)) throw InvalidArgument("spectral_arcs: step must be positive");
    if (!(region.half_widths[0] > 0 && region.half_widths[1] > 0))
        throw InvalidArgument("spectral_arcs: region half-widths must be positive");
    ArcTracer tr{p, region, step, tol};

    // Seeds: sign changes (or exact zeros) of Im Delta along a grid of
    // vertical and horizontal lines, refined by bisection.
    const int nx = std::clamp(static_cast<int>(2 * region.half_widths[0] / step), 4, 400);
    const int ny = std::clamp(static_cast<int>(2 * region.half_widths[1] / step), 4, 400);
    auto grid = [&](int i, int j) {
        return cplx(region.re_lo() + 2 * region.half_widths[0] * (i + 0.5) / nx,
                    region.im_lo() + 2 * region.half_widths[1] * j / ny);
    };
    auto grid_h = [&](int i, int j) {
        return cplx(region.re_lo() + 2 * region.half_widths[0] * i / nx,
                    region.im_lo() + 2 * region.half_widths[1] * (j + 0.5) / ny);
    };
    std::vector<std::pair<cplx, cplx>> brackets;  // segments with a sign change
    {
        std::vector<cplx> pts;
        for (int i = 0; i < nx; ++i)
            for (int j = 0; j <= ny; ++j) pts.push_back(grid(i, j));
        const std::size_t nv = pts.size();
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i <= nx; ++i) pts.push_back(grid_h(i, j));
        std::vector<double> im(pts.size());
        parallel_for(pts.size(), [&](std::size_t k) { im[k] = tr.at(pts[k]).value.imag(); });
        for (int i = 0; i < nx; ++i)
            for (int j = 0; j < ny; ++j) {
                std::size_t a = i * (ny + 1) + j;
                if (im[a] == 0.0 || im[a] * im[a + 1] < 0.0) brackets.push_back({pts[a], pts[a + 1]});
            }
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                std::size_t a = nv + j * (nx + 1) + i;
                if (im[a] == 0.0 || im[a] * im[a + 1] < 0.0) brackets.push_back({pts[a], pts[a + 1]});
            }
    }
    std::vector<std::optional<cplx>> seeds(brackets.size());
    parallel_for(brackets.size(), [&](std::size_t k) {
        cplx a = brackets[k].first, b = brackets[k].second;
        double fa = tr.at(a).value.imag(), fb = tr.at(b).value.imag();
        cplx z;
        if (fa == 0.0) {
            z = a;
        } else if (fb == 0.0) {
            z = b;
        } else {
            for (int it = 0; it < 60 && std::abs(b - a) > 1e-14 * (1.0 + std::abs(a)); ++it) {
                cplx c = 0.5 * (a + b);
                double fc = tr.at(c).value.imag();
                if (fc == 0.0) {
                    a = b = c;
                    break;
                }
                if ((fc < 0.0) == (fa < 0.0)) {
                    a = c;
                    fa = fc;
                } else {
                    b = c;
                }
            }
            z = 0.5 * (a + b);
        }
        DiscriminantValue d = tr.at(z);
        if (ArcTracer::in_band(d) && std::abs(d.value.imag()) <= 1e-9 * (1.0 + std::abs(d.value)) &&
            std::abs(d.derivative) > 0.0)
            seeds[k] = z;
    });

    std::vector<Polyline> arcs;
    for (const auto& s : seeds) {
        if (!s || near_traced(*s, arcs, step)) continue;
        const cplx seed = *s;
        DiscriminantValue d = tr.at(seed);
        const cplx tangent = std::conj(d.derivative) / std::abs(d.derivative);
        auto [fwd, stall_f] = tr.march(seed, tangent);
        bool closed = !fwd.empty() && fwd.back() == seed;
        std::vector<cplx> back;
        bool stall_b = false;
        if (!closed) std::tie(back, stall_b) = tr.march(seed, -tangent);
        Polyline line;
        line.points.assign(back.rbegin(), back.rend());
        line.points.push_back(seed);
        line.points.insert(line.points.end(), fwd.begin(), fwd.end());
        line.flagged = stall_f || stall_b;
        // Orient along increasing real part, then imaginary part, so that the
        // output does not depend on where the seed happened to fall.
        const cplx a = line.points.front(), b = line.points.back();
        if (std::make_pair(b.real(), b.imag()) < std::make_pair(a.real(), a.imag()))
            std::reverse(line.points.begin(), line.points.end());
        arcs.push_back(std::move(line));
    }
    return arcs;
}

}  // namespace hill
