#include "hill/specfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <string>

#include "hill/error.hpp"

namespace hill {

namespace {

constexpr double kPi = 3.14159265358979323846;

bool is_integer(cplx z) { return z.imag() == 0.0 && z.real() == std::nearbyint(z.real()); }

bool is_nonpositive_integer(cplx z) { return is_integer(z) && z.real() <= 0.0; }

std::string format(cplx z) {
    std::ostringstream os;
    os.precision(17);
    os << '(' << z.real() << ',' << z.imag() << ')';
    return os.str();
}

// Lanczos coefficients for g = 7, n = 9.
constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

cplx gamma_right(cplx z) {
    // Valid for Re z >= 1/2.
    z -= 1.0;
    cplx series = kLanczos[0];
    for (std::size_t i = 1; i < kLanczos.size(); ++i) series += kLanczos[i] / (z + double(i));
    cplx t = z + kLanczosG + 0.5;
    return std::sqrt(2.0 * kPi) * std::exp((z + 0.5) * std::log(t) - t) * series;
}

}  // namespace

cplx sin_pi(cplx z) {
    double n = std::nearbyint(z.real());
    double f = z.real() - n;
    double sign = std::fmod(std::abs(n), 2.0) == 0.0 ? 1.0 : -1.0;
    double b = kPi * z.imag();
    return sign * cplx(std::sin(kPi * f) * std::cosh(b), std::cos(kPi * f) * std::sinh(b));
}

cplx cos_pi(cplx z) {
    double n = std::nearbyint(z.real());
    double f = z.real() - n;
    double sign = std::fmod(std::abs(n), 2.0) == 0.0 ? 1.0 : -1.0;
    double b = kPi * z.imag();
    return sign * cplx(std::cos(kPi * f) * std::cosh(b), -std::sin(kPi * f) * std::sinh(b));
}

cplx gamma(cplx z) {
    if (is_nonpositive_integer(z)) throw PoleError("gamma: pole at " + format(z));
    if (z.real() < 0.5) return kPi / (sin_pi(z) * gamma_right(1.0 - z));
    return gamma_right(z);
}

cplx rgamma(cplx z) {
    if (is_nonpositive_integer(z)) return 0.0;
    if (z.real() < 0.5) return sin_pi(z) * gamma_right(1.0 - z) / kPi;
    return 1.0 / gamma_right(z);
}

cplx bessel_reduced(cplx alpha, cplx w, const SeriesControl& ctl) {
    if (ctl.max_terms < 1 || !(ctl.rel_tol > 0.0))
        throw InvalidArgument("SeriesControl: need max_terms >= 1 and rel_tol > 0");

    // 1/Gamma(m + alpha + 1) vanishes for m <= -alpha - 1 when alpha is a
    // negative integer; the series then starts at m0 = -alpha.
    int m0 = 0;
    if (is_integer(alpha) && alpha.real() <= -1.0) m0 = static_cast<int>(-alpha.real());
    if (m0 >= ctl.max_terms)
        throw ConvergenceError("bessel series: order " + format(alpha) + " exceeds max_terms");

    cplx term = 1.0;
    for (int m = 1; m <= m0; ++m) term *= w / double(m);
    term *= rgamma(double(m0) + alpha + 1.0);

    cplx sum = term;
    if (w == cplx{} || term == cplx{}) return sum;

    for (int m = m0 + 1; m < m0 + ctl.max_terms; ++m) {
        cplx denom = double(m) * (double(m) + alpha);
        term *= w / denom;
        sum += term;
        // Stop once past the peak of the terms and the tail is negligible;
        // the following term ratio bounds the tail geometrically.
        double ratio = std::abs(w) / ((m + 1.0) * std::abs(double(m + 1) + alpha));
        if (ratio < 0.5 && std::abs(term) <= ctl.rel_tol * std::abs(sum)) return sum;
        if (term == cplx{}) return sum;
    }
    throw ConvergenceError("bessel series did not converge for order " + format(alpha) +
                           " and w = " + format(w));
}

cplx bessel_reduced_near(int n, cplx t, cplx w, const SeriesControl& ctl) {
    if (n <= 0) return bessel_reduced(double(-n) - t, w, ctl);
    if (ctl.max_terms < 1 || !(ctl.rel_tol > 0.0))
        throw InvalidArgument("SeriesControl: need max_terms >= 1 and rel_tol > 0");

    // 1/Gamma(-k - t) = -(-1)^k Gamma(1 + k + t) sin(pi t) / pi
    const cplx st = sin_pi(t) / kPi;
    cplx head = 0.0;
    cplx wm = 1.0;
    for (int m = 0; m < n; ++m) {
        const int k = n - 1 - m;
        const double sign = (k % 2 == 0) ? -1.0 : 1.0;
        head += wm * sign * gamma(double(1 + k) + t) * st;
        wm *= w / double(m + 1);
    }

    cplx term = wm * rgamma(1.0 - t);
    cplx tail = term;
    for (int i = 0; i < ctl.max_terms; ++i) {
        term *= w / (double(n + i + 1) * (double(i + 1) - t));
        tail += term;
        double ratio = std::abs(w) / (double(n + i + 2) * std::abs(double(i + 2) - t));
        double scale = std::max(std::abs(head), std::abs(tail));
        if (term == cplx{} || (ratio < 0.5 && std::abs(term) <= ctl.rel_tol * scale)) return head + tail;
    }
    throw ConvergenceError("bessel series did not converge near order " + std::to_string(-n) + " and w = " + format(w));
}

cplx bessel_j(cplx nu, cplx u, const SeriesControl& ctl) {
    if (u == cplx{}) {
        if (nu == cplx{}) return 1.0;
        if (nu.real() > 0.0) return 0.0;
        throw InvalidArgument("bessel_j: u = 0 requires Re(nu) > 0 or nu = 0");
    }
    const bool integer_order = is_integer(nu);
    if (!integer_order && u.imag() == 0.0 && u.real() < 0.0)
        throw BranchCutError("bessel_j: u = " + format(u) + " lies on the branch cut");
    cplx half = 0.5 * u;
    cplx prefactor = std::exp(nu * std::log(half));
    return prefactor * bessel_reduced(nu, -half * half, ctl);
}

cplx bessel_j_prime(cplx nu, cplx u, const SeriesControl& ctl) {
    if (u == cplx{}) throw InvalidArgument("bessel_j_prime: u must be non-zero");
    return nu / u * bessel_j(nu, u, ctl) - bessel_j(nu + 1.0, u, ctl);
}

cplx bessel_y(cplx nu, cplx u, const SeriesControl& ctl) {
    if (is_integer(nu)) throw InvalidArgument("bessel_y: integer order " + format(nu) + " is not supported");
    double dist = std::abs(nu - std::nearbyint(nu.real()));
    if (dist < 1e-4) warn("bessel_y: order " + format(nu) + " is within 1e-4 of an integer; result is ill-conditioned");
    return (bessel_j(nu, u, ctl) * cos_pi(nu) - bessel_j(-nu, u, ctl)) / sin_pi(nu);
}

cplx dirichlet_endpoint_model(cplx lambda, cplx K, const SeriesControl& ctl) {
    if (K == cplx{}) throw InvalidArgument("dirichlet_endpoint_model: K must be non-zero");
    cplx nu = std::sqrt(lambda);
    cplx u = std::sqrt(K);
    return kPi * bessel_j(nu, u, ctl) * bessel_j(-nu, u, ctl);
}

cplx neumann_endpoint_model(cplx lambda, cplx K, const SeriesControl& ctl) {
    if (K == cplx{}) throw InvalidArgument("neumann_endpoint_model: K must be non-zero");
    cplx nu = std::sqrt(lambda);
    cplx u = std::sqrt(K);
    return kPi * K * bessel_j_prime(nu, u, ctl) * bessel_j_prime(-nu, u, ctl);
}

cplx f_alpha(cplx alpha, double K, const SeriesControl& ctl) {
    if (!(K >= 0.0)) throw InvalidArgument("f_alpha: K must be non-negative");
    return bessel_reduced(alpha, K / 4.0, ctl);
}

cplx g_alpha(cplx alpha, double K, const SeriesControl& ctl) {
    if (!(K >= 0.0)) throw InvalidArgument("g_alpha: K must be non-negative");
    return 0.5 * alpha * bessel_reduced(alpha, K / 4.0, ctl) +
           K / 4.0 * bessel_reduced(alpha + 1.0, K / 4.0, ctl);
}

}  // namespace hill
