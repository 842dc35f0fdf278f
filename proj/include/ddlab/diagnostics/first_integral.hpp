#pragma once

#include <cmath>
#include <cstddef>

#include "ddlab/profile/ode.hpp"
#include "ddlab/profile/types.hpp"

namespace ddlab::diag {

/// Integrated form of the shooting ODE, valid while A < 0:
///   A A'' - (A')^2/2 + 1/2 = tau A / 6 - (1/6) \int_0^tau A.
/// Evaluates both sides at every sample with a running trapezoid for the
/// integral and returns the max absolute mismatch. The quadrature shares the
/// sample grid with the profile norms, so the residual scale tracks the
/// integrator's max step.
inline double first_integral_residual(const profile::ShotOutcome& shot) {
    double max_res = 0.0;
    double run = 0.0;
    const auto& ss = shot.samples;
    for (std::size_t i = 0; i < ss.size(); ++i) {
        if (i > 0) {
            const double h = ss[i].tau - ss[i - 1].tau;
            run += 0.5 * h * (ss[i].a + ss[i - 1].a);
        }
        const double lhs = ss[i].a * ss[i].app - 0.5 * ss[i].ap * ss[i].ap + 0.5;
        const double rhs = ss[i].tau * ss[i].a / 6.0 - run / 6.0;
        const double res = std::abs(lhs - rhs);
        if (res > max_res) max_res = res;
    }
    return max_res;
}

}  // namespace ddlab::diag
