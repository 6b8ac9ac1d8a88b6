#pragma once

#include <complex>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hill/eigensolve.hpp"
#include "hill/potential.hpp"

namespace hill {

/// A named check and the quantity it was decided on (a margin, a deviation or
/// a count, depending on the check).
struct Check {
    std::string name;
    bool passed = false;
    double value = 0.0;
};

struct SuiteReport {
    std::vector<Check> checks;
    [[nodiscard]] bool passed() const;
};

/// Greedy nearest-neighbour matching of two lists of equal length; returns the
/// largest matched distance (infinity when the lengths differ).
double match_distance(std::vector<cplx> a, std::vector<cplx> b);

/// The first n Dirichlet and Neumann eigenvalues at x0 and x0 + pi agree to 1e-7.
bool check_periodicity(const Potential& p, double x0, int n, double tol = kDefaultTol);

/// mu_j(pi - x0) = conj(mu_j(x0)) and likewise for nu_k, set-wise to 1e-7.
/// Throws InvalidArgument unless p is PT-symmetric.
bool check_pt_symmetry(const Potential& p, double x0, int n, double tol = kDefaultTol);

/// |Im| < 1e-7 for the first n mu_j and nu_k at x0 = 0 and x0 = pi/2.
bool check_reality_at_special_points(const Potential& p, int n, double tol = kDefaultTol);

/// mu_j(K, x) = mu_j(|K|, x + arg(K)/2), likewise nu_k, for the first n values.
bool check_rotation_covariance(cplx K, double x, int n, double tol = kDefaultTol);

/// A Dirichlet or Neumann eigenvalue of V = K exp(2ix) at x0, re-solved from
/// the Bessel representation in the variable sqrt(lambda) = n + t.
struct ModelRoot {
    cplx value;
    int n = 0;
    cplx t;
    double uncertainty = 0.0;  // bound on |value - exact| as used in margins
    bool refined = false;

    /// value - a, keeping full relative accuracy when a is close to n^2.
    [[nodiscard]] cplx minus(double a) const;
};

/// Refines an eigenvalue from the contour solver.  Values with negative real
/// part are returned unrefined with a tolerance-based uncertainty.
ModelRoot refine_model_root(cplx K, double x0, Kind kind, cplx lambda, double tol = kDefaultTol);

struct ClauseResult {
    bool checked = false;
    bool passed = false;
    std::vector<double> margins;
    std::vector<std::string> at_endpoint;  // bounds met within 1e-6
    std::vector<std::string> notes;        // violated or unresolved bounds
};

struct LocalizationReport {
    double K = 0.0;
    std::map<std::string, ClauseResult> clauses;  // "i" .. "ix"
    std::optional<double> M1, M2;
};

/// Evaluates the interval-localization statements for V = K exp(2ix), K > 0,
/// on the first n Dirichlet and Neumann eigenvalues.
LocalizationReport check_localization(double K, int n, double tol = kDefaultTol);

/// For V = K exp(2ix), 0 < |K| <= 1: E_0 = 0 is simple, and E_m = m^2,
/// m = 1..m_max, has algebraic multiplicity 2 and geometric multiplicity 1.
SuiteReport multiplicity_report(double K, int m_max, double tol = kDefaultTol);
bool check_multiplicities(double K, int m_max, double tol = kDefaultTol);

/// Sign statements for s(n^2, 0, pi), f and g of the model potential, each
/// evaluated in the K-range where it is claimed.
SuiteReport sign_report(double K, int n_max, double tol = kDefaultTol);
bool check_sign_sequences(double K, int n_max, double tol = kDefaultTol);

/// Periodicity, PT symmetry, reality and rotation covariance for V = K exp(2ix).
SuiteReport symmetry_report(double K, int n, double tol = kDefaultTol);

/// Real-valued potentials: nu_0 <= E_0 and, for m = 1..m_max, mu_m(x0) and
/// nu_m(x0) in [E_{2m-1}, E_{2m}], all within 1e-6.
SuiteReport interlacing_report(const Potential& p, int m_max, double x0 = 0.0, double tol = kDefaultTol);

}  // namespace hill
