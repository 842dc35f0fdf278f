#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "ddlab/errors.hpp"
#include "ddlab/profile/integrator.hpp"
#include "ddlab/profile/types.hpp"

namespace ddlab::diag {

/// Phase point of the autonomous comparison equation B''' = B'/B.
struct ModelState {
    double tau = 0.0;
    double b = 0.0;
    double bp = 0.0;
    double bpp = 0.0;
};

/// Conserved energy of B''' = B'/B when |B(0)| = 1:
///   E = (1/2)(B')^2 - ((B''(0) - 1) B + B ln|B|).
inline double model_energy(const ModelState& s, double bpp0) {
    if (s.b == 0.0) throw DomainError("model_energy: B = 0");
    return 0.5 * s.bp * s.bp - ((bpp0 - 1.0) * s.b + s.b * std::log(std::abs(s.b)));
}

/// Integrate the comparison model from (b0, bp0, bpp0) to tau_end with the
/// same embedded RK machinery as the shooting runs; used to verify energy
/// conservation under the integrator.
inline std::vector<ModelState> integrate_model(double b0, double bp0, double bpp0,
                                               double tau_end,
                                               profile::StepControl ctrl = {}) {
    if (b0 == 0.0) throw DomainError("integrate_model: B(0) = 0");
    using Vec3 = std::array<double, 3>;
    auto rhs = [](double, const Vec3& y) -> Vec3 {
        if (y[0] == 0.0) throw DomainError("integrate_model: B reached 0");
        return {y[1], y[2], y[1] / y[0]};
    };
    profile::DormandPrince<3, decltype(rhs)> integ(rhs, ctrl);

    std::vector<ModelState> out;
    double t = 0.0;
    Vec3 y{b0, bp0, bpp0};
    Vec3 f = rhs(t, y);
    out.push_back({t, y[0], y[1], y[2]});
    double h = ctrl.initial_step;
    while (t < tau_end) {
        h = std::min({h, ctrl.max_step, tau_end - t});
        auto st = integ.step(t, y, f, h);
        if (!st.accepted) throw DomainError("integrate_model: step underflow");
        t += st.h_used;
        y = st.y;
        f = st.f_new;
        h = st.h_next;
        out.push_back({t, y[0], y[1], y[2]});
    }
    return out;
}

}  // namespace ddlab::diag
