#pragma once

#include <complex>
#include <vector>

#include "hill/eigensolve.hpp"
#include "hill/potential.hpp"

namespace hill {

struct TraceReport {
    double x = 0.0;
    Kind kind = Kind::Dirichlet;
    std::vector<cplx> partial_sums;  // S_1 .. S_M
    cplx target;                     // V(x)
    std::vector<double> errors;      // |S_m - V(x)|
    int M = 0;

    [[nodiscard]] double final_error() const { return errors.back(); }
};

/// S_M = E_0 + sum_{m=1}^M (E_{2m-1} + E_{2m} - 2 mu_m(x)).
TraceReport dirichlet_trace(const Potential& p, double x, int M, double tol = kDefaultTol);

/// S_M = 2 nu_0(x) - E_0 + sum_{m=1}^M (2 nu_m(x) - E_{2m-1} - E_{2m}).
TraceReport neumann_trace(const Potential& p, double x, int M, double tol = kDefaultTol);

/// Both sums evaluated from precomputed spectra: `periodic` must hold at least
/// E_0..E_{2M} and `boundary` at least M (Dirichlet) or M+1 (Neumann) values,
/// each sorted in the solver's order.
TraceReport trace_from_spectra(const Potential& p, double x, Kind kind, int M, const std::vector<cplx>& periodic,
                               const std::vector<cplx>& boundary);

/// Trace reports over a grid of points.  E_m is computed once; the boundary
/// spectra for the grid points are computed in parallel.
std::vector<TraceReport> trace_grid(const Potential& p, Kind kind, const std::vector<double>& grid, int M,
                                    double tol = kDefaultTol);

struct ReconstructedPoint {
    double x;
    cplx value;    // S_M(x)
    double error;  // |S_M(x) - V(x)|
};

/// Dirichlet trace mapped over the grid.
std::vector<ReconstructedPoint> reconstruct_potential(const Potential& p, const std::vector<double>& grid, int M,
                                                      double tol = kDefaultTol);

}  // namespace hill
