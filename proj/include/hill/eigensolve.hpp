#pragma once

#include <array>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "hill/floquet.hpp"
#include "hill/potential.hpp"

namespace hill {

enum class Kind { Dirichlet, Neumann, Periodic };

std::string to_string(Kind k);
Kind kind_from_string(const std::string& s);

/// Axis-aligned rectangle in the complex plane.
struct SearchBox {
    cplx center;
    std::array<double, 2> half_widths{1.0, 1.0};  // (re, im)

    [[nodiscard]] double re_lo() const { return center.real() - half_widths[0]; }
    [[nodiscard]] double re_hi() const { return center.real() + half_widths[0]; }
    [[nodiscard]] double im_lo() const { return center.imag() - half_widths[1]; }
    [[nodiscard]] double im_hi() const { return center.imag() + half_widths[1]; }
    [[nodiscard]] bool contains(cplx z) const {
        return z.real() >= re_lo() && z.real() <= re_hi() && z.imag() >= im_lo() && z.imag() <= im_hi();
    }
    static SearchBox from_corners(double re_lo, double re_hi, double im_lo, double im_hi);
};

struct Eigenvalue {
    cplx value;
    Kind kind = Kind::Dirichlet;
    int index = 0;
    int alg_multiplicity = 1;
    double residual = 0.0;  // |target(value)|
    double x0 = 0.0;
    bool flagged = false;   // Newton stagnated; value is the best iterate
};

/// An entire function together with its derivative.
struct TargetValue {
    cplx value;
    cplx derivative;
};
using TargetFunction = std::function<TargetValue(cplx)>;

/// s(lambda, x0, x0+pi), c'(lambda, x0, x0+pi) and Delta(lambda)^2 - 1.
TargetFunction dirichlet_target(const Potential& p, double x0, double tol = kDefaultTol);
TargetFunction neumann_target(const Potential& p, double x0, double tol = kDefaultTol);
TargetFunction periodic_target(const Potential& p, double tol = kDefaultTol);

/// Number of zeros (with multiplicity) inside box by the argument principle.
/// The box is enlarged slightly and retried (up to 5 times) when f nearly
/// vanishes on the boundary.
int count_zeros(const TargetFunction& f, const SearchBox& box, int quad_points = 64);

struct Zero {
    cplx value;
    int multiplicity = 1;
    double residual = 0.0;
    bool flagged = false;
};

/// All zeros inside box, each cluster of diameter below 1e-4 reported once
/// with its multiplicity.  Sorted by (|z|, arg z).
std::vector<Zero> find_zeros(const TargetFunction& f, const SearchBox& box, int max_depth = 40);

/// The first n_max Dirichlet eigenvalues mu_1.. (index from 1), the first
/// n_max Neumann eigenvalues nu_0.. (index from 0), and E_0..E_{n_max}.
/// Multiple eigenvalues appear once, so a list may be shorter than the
/// requested count; the multiplicities add up to at least that count.
std::vector<Eigenvalue> dirichlet_eigenvalues(const Potential& p, double x0, int n_max, double tol = kDefaultTol);
std::vector<Eigenvalue> neumann_eigenvalues(const Potential& p, double x0, int n_max, double tol = kDefaultTol);
std::vector<Eigenvalue> periodic_eigenvalues(const Potential& p, int n_max, double tol = kDefaultTol);

/// Repeats each value alg_multiplicity times.
std::vector<cplx> expand(const std::vector<Eigenvalue>& eigs);

/// 2 when M(E, x0) = +-I to 1e-6, else 1.  Throws InvalidArgument unless
/// |Delta(E) -+ 1| < 1e-8.
int geometric_multiplicity(const Potential& p, cplx E, double x0 = 0.0, double tol = kDefaultTol);

struct Polyline {
    std::vector<cplx> points;
    bool flagged = false;  // tracing stalled before reaching an end
};

/// Traces {lambda in region : Delta(lambda) real, |Delta| <= 1} with arclength
/// step `step`.
std::vector<Polyline> spectral_arcs(const Potential& p, const SearchBox& region, double step,
                                    double tol = kDefaultTol);

}  // namespace hill
