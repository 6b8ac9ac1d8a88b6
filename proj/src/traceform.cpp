#include "hill/traceform.hpp"

#include <string>

#include "hill/error.hpp"
#include "hill/parallel.hpp"

namespace hill {

namespace {

void check_terms(int M) {
    if (M < 1) throw InvalidArgument("number of trace terms must be at least 1, got " + std::to_string(M));
}

std::vector<cplx> boundary_spectrum(const Potential& p, Kind kind, double x, int M, double tol) {
    if (kind == Kind::Dirichlet) return expand(dirichlet_eigenvalues(p, x, M, tol));
    return expand(neumann_eigenvalues(p, x, M + 1, tol));
}

}  // namespace

TraceReport trace_from_spectra(const Potential& p, double x, Kind kind, int M, const std::vector<cplx>& periodic,
                               const std::vector<cplx>& boundary) {
    check_terms(M);
    if (kind == Kind::Periodic) throw InvalidArgument("trace formula kind must be dirichlet or neumann");
    const std::size_t need_b = kind == Kind::Dirichlet ? M : M + 1;
    if (periodic.size() < std::size_t(2 * M + 1) || boundary.size() < need_b)
        throw InvalidArgument("too few eigenvalues for " + std::to_string(M) + " trace terms");

    TraceReport r;
    r.x = x;
    r.kind = kind;
    r.M = M;
    r.target = p.eval(x);
    cplx s = kind == Kind::Dirichlet ? periodic[0] : 2.0 * boundary[0] - periodic[0];
    for (int m = 1; m <= M; ++m) {
        const cplx pair = periodic[2 * m - 1] + periodic[2 * m];
        s += kind == Kind::Dirichlet ? pair - 2.0 * boundary[m - 1] : 2.0 * boundary[m] - pair;
        r.partial_sums.push_back(s);
        r.errors.push_back(std::abs(s - r.target));
    }
    return r;
}

TraceReport dirichlet_trace(const Potential& p, double x, int M, double tol) {
    check_terms(M);
    auto E = expand(periodic_eigenvalues(p, 2 * M, tol));
    return trace_from_spectra(p, x, Kind::Dirichlet, M, E, boundary_spectrum(p, Kind::Dirichlet, x, M, tol));
}

TraceReport neumann_trace(const Potential& p, double x, int M, double tol) {
    check_terms(M);
    auto E = expand(periodic_eigenvalues(p, 2 * M, tol));
    return trace_from_spectra(p, x, Kind::Neumann, M, E, boundary_spectrum(p, Kind::Neumann, x, M, tol));
}

std::vector<TraceReport> trace_grid(const Potential& p, Kind kind, const std::vector<double>& grid, int M,
                                    double tol) {
    check_terms(M);
    if (grid.empty()) throw InvalidArgument("trace grid is empty");
    auto E = expand(periodic_eigenvalues(p, 2 * M, tol));
    std::vector<TraceReport> out(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
        out[i] = trace_from_spectra(p, grid[i], kind, M, E, boundary_spectrum(p, kind, grid[i], M, tol));
    });
    return out;
}

std::vector<ReconstructedPoint> reconstruct_potential(const Potential& p, const std::vector<double>& grid, int M,
                                                      double tol) {
    std::vector<ReconstructedPoint> out;
    for (const auto& r : trace_grid(p, Kind::Dirichlet, grid, M, tol))
        out.push_back({r.x, r.partial_sums.back(), r.errors.back()});
    return out;
}

}  // namespace hill
