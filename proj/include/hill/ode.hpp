#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <string>

#include "hill/error.hpp"

namespace hill {

using cplx = std::complex<double>;

template <std::size_t N>
using OdeState = std::array<cplx, N>;

struct IntegratorOptions {
    /// Mixed absolute/relative local error tolerance per unit step.
    double tol = 1e-10;
    long max_steps = 2'000'000;
    /// When positive, take exactly this many equal steps without error control.
    int fixed_steps = 0;
};

struct IntegratorStats {
    long accepted = 0;
    long rejected = 0;
};

namespace dop853 {

// Dormand-Prince 8(5,3) coefficients (Hairer, Norsett & Wanner).
inline constexpr double c2 = 0.526001519587677318785587544488e-01;
inline constexpr double c3 = 0.789002279381515978178381316732e-01;
inline constexpr double c4 = 0.118350341907227396726757197510e+00;
inline constexpr double c5 = 0.281649658092772603273242802490e+00;
inline constexpr double c6 = 0.333333333333333333333333333333e+00;
inline constexpr double c7 = 0.25e+00;
inline constexpr double c8 = 0.307692307692307692307692307692e+00;
inline constexpr double c9 = 0.651282051282051282051282051282e+00;
inline constexpr double c10 = 0.6e+00;
inline constexpr double c11 = 0.857142857142857142857142857142e+00;
inline constexpr double a21 = 5.26001519587677318785587544488e-2;
inline constexpr double a31 = 1.97250569845378994544595329183e-2;
inline constexpr double a32 = 5.91751709536136983633785987549e-2;
inline constexpr double a41 = 2.95875854768068491816892993775e-2;
inline constexpr double a43 = 8.87627564304205475450678981324e-2;
inline constexpr double a51 = 2.41365134159266685502369798665e-1;
inline constexpr double a53 = -8.84549479328286085344864962717e-1;
inline constexpr double a54 = 9.24834003261792003115737966543e-1;
inline constexpr double a61 = 3.7037037037037037037037037037e-2;
inline constexpr double a64 = 1.70828608729473871279604482173e-1;
inline constexpr double a65 = 1.25467687566822425016691814123e-1;
inline constexpr double a71 = 3.7109375e-2;
inline constexpr double a74 = 1.70252211019544039314978060272e-1;
inline constexpr double a75 = 6.02165389804559606850219397283e-2;
inline constexpr double a76 = -1.7578125e-2;
inline constexpr double a81 = 3.70920001185047927108779319836e-2;
inline constexpr double a84 = 1.70383925712239993810214054705e-1;
inline constexpr double a85 = 1.07262030446373284651809199168e-1;
inline constexpr double a86 = -1.53194377486244017527936158236e-2;
inline constexpr double a87 = 8.27378916381402288758473766002e-3;
inline constexpr double a91 = 6.24110958716075717114429577812e-1;
inline constexpr double a94 = -3.36089262944694129406857109825e0;
inline constexpr double a95 = -8.68219346841726006818189891453e-1;
inline constexpr double a96 = 2.75920996994467083049415600797e1;
inline constexpr double a97 = 2.01540675504778934086186788979e1;
inline constexpr double a98 = -4.34898841810699588477366255144e1;
inline constexpr double a101 = 4.77662536438264365890433908527e-1;
inline constexpr double a104 = -2.48811461997166764192642586468e0;
inline constexpr double a105 = -5.90290826836842996371446475743e-1;
inline constexpr double a106 = 2.12300514481811942347288949897e1;
inline constexpr double a107 = 1.52792336328824235832596922938e1;
inline constexpr double a108 = -3.32882109689848629194453265587e1;
inline constexpr double a109 = -2.03312017085086261358222928593e-2;
inline constexpr double a111 = -9.3714243008598732571704021658e-1;
inline constexpr double a114 = 5.18637242884406370830023853209e0;
inline constexpr double a115 = 1.09143734899672957818500254654e0;
inline constexpr double a116 = -8.14978701074692612513997267357e0;
inline constexpr double a117 = -1.85200656599969598641566180701e1;
inline constexpr double a118 = 2.27394870993505042818970056734e1;
inline constexpr double a119 = 2.49360555267965238987089396762e0;
inline constexpr double a1110 = -3.0467644718982195003823669022e0;
inline constexpr double a121 = 2.27331014751653820792359768449e0;
inline constexpr double a124 = -1.05344954667372501984066689879e1;
inline constexpr double a125 = -2.00087205822486249909675718444e0;
inline constexpr double a126 = -1.79589318631187989172765950534e1;
inline constexpr double a127 = 2.79488845294199600508499808837e1;
inline constexpr double a128 = -2.85899827713502369474065508674e0;
inline constexpr double a129 = -8.87285693353062954433549289258e0;
inline constexpr double a1210 = 1.23605671757943030647266201528e1;
inline constexpr double a1211 = 6.43392746015763530355970484046e-1;
inline constexpr double b1 = 5.42937341165687622380535766363e-2;
inline constexpr double b6 = 4.45031289275240888144113950566e0;
inline constexpr double b7 = 1.89151789931450038304281599044e0;
inline constexpr double b8 = -5.8012039600105847814672114227e0;
inline constexpr double b9 = 3.1116436695781989440891606237e-1;
inline constexpr double b10 = -1.52160949662516078556178806805e-1;
inline constexpr double b11 = 2.01365400804030348374776537501e-1;
inline constexpr double b12 = 4.47106157277725905176885569043e-2;
inline constexpr double e31 = 0.244094488188976377952755905512e+00;
inline constexpr double e32 = 0.733846688281611857341361741547e+00;
inline constexpr double e33 = 0.220588235294117647058823529412e-01;
inline constexpr double e51 = 0.1312004499419488073250102996e-01;
inline constexpr double e56 = -0.1225156446376204440720569753e+01;
inline constexpr double e57 = -0.4957589496572501915214079952e+00;
inline constexpr double e58 = 0.1664377182454986536961530415e+01;
inline constexpr double e59 = -0.3503288487499736816886487290e+00;
inline constexpr double e510 = 0.3341791187130174790297318841e+00;
inline constexpr double e511 = 0.8192320648511571246570742613e-01;
inline constexpr double e512 = -0.2235530786388629525884427845e-01;

}  // namespace dop853

/// Explicit embedded Runge-Kutta integrator of order 8 with 5th/3rd order
/// error estimation, for linear or nonlinear systems of N complex unknowns.
/// Rhs is callable as rhs(double x, const OdeState<N>& y, OdeState<N>& dy).
template <std::size_t N>
class Dop853 {
public:
    explicit Dop853(IntegratorOptions opt) : opt_(opt) {}

    /// Advances y from x0 to x1.  Each entry of checkpoints (strictly between
    /// x0 and x1, in order of travel) is hit exactly and reported through
    /// observer(x, y).
    template <class Rhs, class Observer>
    OdeState<N> integrate(Rhs&& rhs, double x0, double x1, OdeState<N> y,
                          std::span<const double> checkpoints, Observer&& observer) {
        double x = x0;
        for (double stop : checkpoints) {
            y = segment(rhs, x, stop, y);
            x = stop;
            observer(x, y);
        }
        return segment(rhs, x, x1, y);
    }

    template <class Rhs>
    OdeState<N> integrate(Rhs&& rhs, double x0, double x1, OdeState<N> y) {
        return integrate(rhs, x0, x1, y, {}, [](double, const OdeState<N>&) {});
    }

    [[nodiscard]] const IntegratorStats& stats() const { return stats_; }

private:
    template <class Rhs>
    OdeState<N> segment(Rhs& rhs, double x0, double x1, OdeState<N> y) {
        if (x1 == x0) return y;
        if (opt_.fixed_steps > 0) return fixed(rhs, x0, x1, y);

        const double dir = x1 > x0 ? 1.0 : -1.0;
        OdeState<N> k1;
        rhs(x0, y, k1);
        if (h_ <= 0.0) h_ = initial_step(x0, y, k1, std::abs(x1 - x0));

        double x = x0;
        long steps = 0;
        bool last_rejected = false;
        for (;;) {
            double remaining = std::abs(x1 - x);
            if (remaining <= 0.0) break;
            bool final_step = false;
            double h = h_;
            if (h >= remaining * (1.0 - 1e-12)) {
                h = remaining;
                final_step = true;
            }
            if (h < 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x)))
                throw StepSizeUnderflow("integrator step size underflow at x = " + std::to_string(x), x);
            if (++steps > opt_.max_steps)
                throw StepSizeUnderflow("integrator exceeded the step budget at x = " + std::to_string(x), x);

            OdeState<N> y_new, k_next;
            // Error per unit step: the local error is compared with tol * h.
            double err = step(rhs, x, dir * h, y, k1, y_new, k_next, true) / h;
            if (err <= 1.0) {
                ++stats_.accepted;
                x = final_step ? x1 : x + dir * h;
                y = y_new;
                k1 = k_next;
                double scale = err == 0.0 ? 6.0 : std::clamp(0.9 * std::pow(err, -1.0 / 7.0), 0.333, 6.0);
                if (last_rejected) scale = std::min(scale, 1.0);
                // Keep the unclipped step for the next segment.
                if (!final_step || scale < 1.0) h_ = h * scale;
                last_rejected = false;
                if (final_step) break;
            } else {
                ++stats_.rejected;
                h_ = h * std::max(0.333, 0.9 * std::pow(err, -1.0 / 7.0));
                last_rejected = true;
            }
        }
        return y;
    }

    template <class Rhs>
    OdeState<N> fixed(Rhs& rhs, double x0, double x1, OdeState<N> y) {
        const int n = opt_.fixed_steps;
        const double h = (x1 - x0) / n;
        OdeState<N> k1, y_new, k_next;
        rhs(x0, y, k1);
        for (int i = 0; i < n; ++i) {
            double x = x0 + i * h;
            step(rhs, x, h, y, k1, y_new, k_next, false);
            y = y_new;
            k1 = k_next;
            ++stats_.accepted;
        }
        return y;
    }

    double norm_scale(const cplx& a, const cplx& b) const {
        return opt_.tol + opt_.tol * std::max(std::abs(a), std::abs(b));
    }

    double initial_step(double, const OdeState<N>& y, const OdeState<N>& f0, double span) {
        double d0 = 0.0, d1 = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            double sk = norm_scale(y[i], y[i]);
            d0 += std::norm(y[i]) / (sk * sk);
            d1 += std::norm(f0[i]) / (sk * sk);
        }
        d0 = std::sqrt(d0 / N);
        d1 = std::sqrt(d1 / N);
        double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        return std::min({h0 * 100.0, span, std::pow(0.01 / std::max(d1, 1e-15), 0.125)});
    }

    // One Dormand-Prince step.  Returns the scaled error norm (<= 1 accepts).
    template <class Rhs>
    double step(Rhs& rhs, double x, double h, const OdeState<N>& y, const OdeState<N>& k1,
                OdeState<N>& y_new, OdeState<N>& k_next, bool estimate) {
        using namespace dop853;
        OdeState<N> k2, k3, k4, k5, k6, k7, k8, k9, k10, k11, k12, w;
        auto stage = [&](auto&& combine, double c, OdeState<N>& out) {
            for (std::size_t i = 0; i < N; ++i) w[i] = y[i] + h * combine(i);
            rhs(x + c * h, w, out);
        };
        stage([&](std::size_t i) { return a21 * k1[i]; }, c2, k2);
        stage([&](std::size_t i) { return a31 * k1[i] + a32 * k2[i]; }, c3, k3);
        stage([&](std::size_t i) { return a41 * k1[i] + a43 * k3[i]; }, c4, k4);
        stage([&](std::size_t i) { return a51 * k1[i] + a53 * k3[i] + a54 * k4[i]; }, c5, k5);
        stage([&](std::size_t i) { return a61 * k1[i] + a64 * k4[i] + a65 * k5[i]; }, c6, k6);
        stage([&](std::size_t i) { return a71 * k1[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]; }, c7, k7);
        stage([&](std::size_t i) {
            return a81 * k1[i] + a84 * k4[i] + a85 * k5[i] + a86 * k6[i] + a87 * k7[i];
        }, c8, k8);
        stage([&](std::size_t i) {
            return a91 * k1[i] + a94 * k4[i] + a95 * k5[i] + a96 * k6[i] + a97 * k7[i] + a98 * k8[i];
        }, c9, k9);
        stage([&](std::size_t i) {
            return a101 * k1[i] + a104 * k4[i] + a105 * k5[i] + a106 * k6[i] + a107 * k7[i] +
                   a108 * k8[i] + a109 * k9[i];
        }, c10, k10);
        stage([&](std::size_t i) {
            return a111 * k1[i] + a114 * k4[i] + a115 * k5[i] + a116 * k6[i] + a117 * k7[i] +
                   a118 * k8[i] + a119 * k9[i] + a1110 * k10[i];
        }, c11, k11);
        stage([&](std::size_t i) {
            return a121 * k1[i] + a124 * k4[i] + a125 * k5[i] + a126 * k6[i] + a127 * k7[i] +
                   a128 * k8[i] + a129 * k9[i] + a1210 * k10[i] + a1211 * k11[i];
        }, 1.0, k12);

        OdeState<N> increment;
        for (std::size_t i = 0; i < N; ++i) {
            increment[i] = b1 * k1[i] + b6 * k6[i] + b7 * k7[i] + b8 * k8[i] + b9 * k9[i] +
                           b10 * k10[i] + b11 * k11[i] + b12 * k12[i];
            y_new[i] = y[i] + h * increment[i];
        }
        rhs(x + h, y_new, k_next);
        if (!estimate) return 0.0;

        double err3 = 0.0, err5 = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            double sk = norm_scale(y[i], y_new[i]);
            cplx e3 = increment[i] - e31 * k1[i] - e32 * k9[i] - e33 * k12[i];
            cplx e5 = e51 * k1[i] + e56 * k6[i] + e57 * k7[i] + e58 * k8[i] + e59 * k9[i] +
                      e510 * k10[i] + e511 * k11[i] + e512 * k12[i];
            err3 += std::norm(e3) / (sk * sk);
            err5 += std::norm(e5) / (sk * sk);
        }
        double deno = err5 + 0.01 * err3;
        if (deno <= 0.0) deno = 1.0;
        return std::abs(h) * err5 * std::sqrt(1.0 / (N * deno));
    }

    IntegratorOptions opt_;
    IntegratorStats stats_;
    double h_ = 0.0;
};

}  // namespace hill
