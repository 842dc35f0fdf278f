#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>

#include "ddlab/profile/types.hpp"

namespace ddlab::profile {

/// One accepted step of the embedded Dormand-Prince 5(4) pair.
template <std::size_t N>
struct DpStepResult {
    bool accepted = false;
    double h_used = 0.0;
    double h_next = 0.0;
    std::array<double, N> y{};
    std::array<double, N> f_new{};  // FSAL stage
    double error = 0.0;
};

/// Embedded Dormand-Prince 5(4) stepper with PI-free standard step control.
/// Rhs: (double t, const std::array<double,N>&) -> std::array<double,N>.
template <std::size_t N, typename Rhs>
class DormandPrince {
  public:
    DormandPrince(Rhs rhs, StepControl ctrl) : rhs_(std::move(rhs)), ctrl_(ctrl) {}

    /// Attempt steps from (t, y) until one is accepted or h underflows.
    /// `h` is the proposed size; the caller may have clamped it.
    DpStepResult<N> step(double t, const std::array<double, N>& y,
                         const std::array<double, N>& f0, double h) const {
        DpStepResult<N> r;
        double hh = h;
        for (int attempt = 0; attempt < 64; ++attempt) {
            auto [ynew, fnew, err] = try_step(t, y, f0, hh);
            if (err <= 1.0) {
                r.accepted = true;
                r.h_used = hh;
                r.y = ynew;
                r.f_new = fnew;
                r.error = err;
                const double fac = std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2, 5.0);
                r.h_next = std::min(hh * fac, ctrl_.max_step);
                return r;
            }
            const double fac = std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
            hh *= fac;
            if (hh < ctrl_.min_step) {
                r.accepted = false;
                r.h_used = hh;
                return r;
            }
        }
        r.accepted = false;
        r.h_used = hh;
        return r;
    }

    std::array<double, N> eval(double t, const std::array<double, N>& y) const {
        return rhs_(t, y);
    }

    /// Classical RK4 advance, used for event polishing inside an accepted step
    /// (sub-step lengths are tiny, so fixed order-4 substeps are ample).
    std::array<double, N> rk4(double t, std::array<double, N> y, double h,
                              int substeps = 8) const {
        const double hs = h / substeps;
        for (int i = 0; i < substeps; ++i) {
            const auto k1 = rhs_(t, y);
            const auto k2 = rhs_(t + 0.5 * hs, axpy(y, 0.5 * hs, k1));
            const auto k3 = rhs_(t + 0.5 * hs, axpy(y, 0.5 * hs, k2));
            const auto k4 = rhs_(t + hs, axpy(y, hs, k3));
            for (std::size_t j = 0; j < N; ++j) {
                y[j] += hs / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
            }
            t += hs;
        }
        return y;
    }

    const StepControl& ctrl() const { return ctrl_; }

  private:
    static std::array<double, N> axpy(const std::array<double, N>& y, double a,
                                      const std::array<double, N>& k) {
        std::array<double, N> out;
        for (std::size_t j = 0; j < N; ++j) out[j] = y[j] + a * k[j];
        return out;
    }

    std::tuple<std::array<double, N>, std::array<double, N>, double> try_step(
        double t, const std::array<double, N>& y, const std::array<double, N>& k1,
        double h) const {
        // Dormand-Prince coefficients
        static constexpr double a21 = 1.0 / 5.0;
        static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
        static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
        static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                                a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
        static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                                a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                                a65 = -5103.0 / 18656.0;
        static constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                                b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
        static constexpr double d1 = 71.0 / 57600.0, d3 = -71.0 / 16695.0, d4 = 71.0 / 1920.0,
                                d5 = -17253.0 / 339200.0, d6 = 22.0 / 525.0, d7 = -1.0 / 40.0;

        std::array<double, N> tmp;
        for (std::size_t j = 0; j < N; ++j) tmp[j] = y[j] + h * a21 * k1[j];
        const auto k2 = rhs_(t + h / 5.0, tmp);
        for (std::size_t j = 0; j < N; ++j) tmp[j] = y[j] + h * (a31 * k1[j] + a32 * k2[j]);
        const auto k3 = rhs_(t + 3.0 * h / 10.0, tmp);
        for (std::size_t j = 0; j < N; ++j)
            tmp[j] = y[j] + h * (a41 * k1[j] + a42 * k2[j] + a43 * k3[j]);
        const auto k4 = rhs_(t + 4.0 * h / 5.0, tmp);
        for (std::size_t j = 0; j < N; ++j)
            tmp[j] = y[j] + h * (a51 * k1[j] + a52 * k2[j] + a53 * k3[j] + a54 * k4[j]);
        const auto k5 = rhs_(t + 8.0 * h / 9.0, tmp);
        for (std::size_t j = 0; j < N; ++j)
            tmp[j] = y[j] + h * (a61 * k1[j] + a62 * k2[j] + a63 * k3[j] + a64 * k4[j] +
                                 a65 * k5[j]);
        const auto k6 = rhs_(t + h, tmp);

        std::array<double, N> ynew;
        for (std::size_t j = 0; j < N; ++j) {
            ynew[j] = y[j] + h * (b1 * k1[j] + b3 * k3[j] + b4 * k4[j] + b5 * k5[j] + b6 * k6[j]);
        }
        const auto k7 = rhs_(t + h, ynew);  // FSAL

        double err = 0.0;
        for (std::size_t j = 0; j < N; ++j) {
            const double e = h * (d1 * k1[j] + d3 * k3[j] + d4 * k4[j] + d5 * k5[j] +
                                  d6 * k6[j] + d7 * k7[j]);
            const double sc =
                ctrl_.abs_tol + ctrl_.rel_tol * std::max(std::abs(y[j]), std::abs(ynew[j]));
            err += (e / sc) * (e / sc);
        }
        err = std::sqrt(err / N);
        return {ynew, k7, err};
    }

    Rhs rhs_;
    StepControl ctrl_;
};

}  // namespace ddlab::profile
