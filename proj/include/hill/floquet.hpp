#pragma once

#include <array>
#include <complex>
#include <optional>
#include <span>
#include <vector>

#include "hill/potential.hpp"

namespace hill {

inline constexpr double kDefaultTol = 1e-10;

/// Endpoint values of the fundamental system c, s of -psi'' + V psi = lambda psi
/// normalised at x0 (c = 1, c' = 0, s = 0, s' = 1), taken at x1 (x0 + pi for
/// the one-period transport).
struct FundamentalData {
    cplx lambda;
    double x0 = 0.0;
    double x1 = 0.0;
    cplx c_end, c_prime_end, s_end, s_prime_end;
    /// d/dlambda of (c, c', s, s') at x1, from the variational system.
    std::optional<std::array<cplx, 4>> dlambda;
    long steps = 0;

    [[nodiscard]] cplx wronskian() const { return c_end * s_prime_end - c_prime_end * s_end; }
    [[nodiscard]] cplx half_trace() const { return 0.5 * (c_end + s_prime_end); }
};

/// M(lambda, x0) = [[c, s], [c', s']] at x0 + pi.
struct Monodromy {
    std::array<std::array<cplx, 2>, 2> entries{};

    [[nodiscard]] cplx det() const {
        return entries[0][0] * entries[1][1] - entries[0][1] * entries[1][0];
    }
    [[nodiscard]] cplx trace() const { return entries[0][0] + entries[1][1]; }
};

struct TransportOptions {
    double tol = kDefaultTol;
    bool with_dlambda = false;
    /// Positive: equal-step integration with this many steps (no error control).
    int fixed_steps = 0;
    /// Interior points (in order from x0 towards x1) at which to record the state.
    std::span<const double> checkpoints = {};
};

/// Transports the fundamental system from x0 to x1.  When checkpoints are
/// given, the state there is appended to *at_checkpoints.
FundamentalData propagate(const Potential& p, cplx lambda, double x0, double x1,
                          const TransportOptions& opt,
                          std::vector<FundamentalData>* at_checkpoints = nullptr);

/// One period: x0 -> x0 + pi.  tol must lie in [1e-13, 1e-6].
FundamentalData integrate_fundamental(const Potential& p, cplx lambda, double x0,
                                      double tol = kDefaultTol, bool with_dlambda = false);

Monodromy monodromy(const Potential& p, cplx lambda, double x0, double tol = kDefaultTol);

/// Floquet discriminant Delta(lambda) = trace(M(lambda, 0)) / 2.
cplx discriminant(const Potential& p, cplx lambda, double tol = kDefaultTol);

struct DiscriminantValue {
    cplx value;
    cplx derivative;  // d Delta / d lambda
};
DiscriminantValue discriminant_with_derivative(const Potential& p, cplx lambda, double x0 = 0.0,
                                               double tol = kDefaultTol);

/// Closed-form fundamental data over a length t for a constant potential
/// V = shift: c = cos(k t), s = sin(k t)/k with k = sqrt(lambda - shift).
/// Small |k t| uses the even power series so that lambda -> shift is regular.
FundamentalData constant_potential_fundamental(cplx lambda, cplx shift, double t,
                                               bool with_dlambda = false);

/// g(lambda, x) = -s(lambda, x, x+pi) / (2 sqrt(Delta^2 - 1)).  The root is
/// the branch that makes g positive far out on the negative real axis,
/// continued along the straight segment from -|lambda| - sum|v_n| - 1.
/// Throws SpectrumProximityError when |Delta^2 - 1| < 1e-10 or when Delta is
/// real in [-1, 1] (lambda on a spectral arc).
cplx diagonal_green(const Potential& p, cplx lambda, double x, double tol = kDefaultTol);

/// Finite-difference step used by green_identity_residual.
inline constexpr double kGreenFdStep = 1e-4;

/// |-2 g_xx g + g_x^2 + 4 (V - lambda) g^2 - 1| with g_x, g_xx from central
/// differences of step kGreenFdStep.
double green_identity_residual(const Potential& p, cplx lambda, double x, double tol = kDefaultTol);

}  // namespace hill
