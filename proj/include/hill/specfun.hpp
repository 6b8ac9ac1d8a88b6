#pragma once

#include <complex>

namespace hill {

using cplx = std::complex<double>;

/// Truncation control for the Bessel power series.
struct SeriesControl {
    int max_terms = 200;
    double rel_tol = 1e-16;
};

/// sin(pi z) and cos(pi z) with exact reduction of the real part, so that
/// values near the integers keep full relative accuracy.
cplx sin_pi(cplx z);
cplx cos_pi(cplx z);

/// Complex Gamma function (Lanczos approximation, reflection for Re z < 1/2).
/// Throws PoleError at z = 0, -1, -2, ...
cplx gamma(cplx z);

/// 1/Gamma(z); entire, exactly zero at the non-positive integers.
cplx rgamma(cplx z);

/// sum_{m>=0} w^m / (m! Gamma(m + alpha + 1)).  With w = -(u/2)^2 this is
/// (u/2)^(-alpha) J_alpha(u); it is entire in both arguments.
cplx bessel_reduced(cplx alpha, cplx w, const SeriesControl& ctl = {});

/// bessel_reduced(-n - t, w) for integer n.  The terms with m < n, where
/// 1/Gamma has a zero near t = 0, are evaluated through the reflection formula
/// so the result keeps full relative accuracy in t as t -> 0.
cplx bessel_reduced_near(int n, cplx t, cplx w, const SeriesControl& ctl = {});

/// J_nu(u) from its power series, principal branch of (u/2)^nu.
cplx bessel_j(cplx nu, cplx u, const SeriesControl& ctl = {});

/// dJ_nu/du via J'_nu = (nu/u) J_nu - J_{nu+1}.
cplx bessel_j_prime(cplx nu, cplx u, const SeriesControl& ctl = {});

/// Y_nu(u) = (J_nu(u) cos(nu pi) - J_{-nu}(u)) / sin(nu pi), non-integer nu only.
cplx bessel_y(cplx nu, cplx u, const SeriesControl& ctl = {});

/// s(lambda, 0, pi) for V = K exp(2ix): pi J_{sqrt(lambda)}(sqrt K) J_{-sqrt(lambda)}(sqrt K).
cplx dirichlet_endpoint_model(cplx lambda, cplx K, const SeriesControl& ctl = {});

/// c'(lambda, 0, pi) for V = K exp(2ix): pi K J'_{sqrt(lambda)}(sqrt K) J'_{-sqrt(lambda)}(sqrt K).
cplx neumann_endpoint_model(cplx lambda, cplx K, const SeriesControl& ctl = {});

/// f(alpha) = (i sqrt(K)/2)^(-alpha) J_alpha(i sqrt K) = sum (K/4)^m / (m! Gamma(m+alpha+1)).
cplx f_alpha(cplx alpha, double K, const SeriesControl& ctl = {});

/// g(alpha) = (i sqrt(K)/2)^(1-alpha) J'_alpha(i sqrt K) = (alpha/2) f(alpha) + (K/4) f(alpha+1).
cplx g_alpha(cplx alpha, double K, const SeriesControl& ctl = {});

}  // namespace hill
