#pragma once

#include <cmath>

#include "ddlab/errors.hpp"
#include "ddlab/profile/types.hpp"

namespace ddlab::profile {

inline constexpr double kDegenerateFloor = 1e-30;

/// Right-hand side A''' = tau A' / (6 A). Pure; throws Degenerate when |A|
/// drops below the floor (the ODE is singular at A = 0).
inline double ode_rhs(const ProfileState& s, double floor = kDegenerateFloor) {
    if (std::abs(s.a) < floor) {
        throw Degenerate("ode_rhs: |A| below degeneracy floor at tau=" + std::to_string(s.tau));
    }
    return s.tau * s.ap / (6.0 * s.a);
}

/// State at tau = taylor_eps from the cubic series around the singular origin:
///   A   = -t + (mu/2) t^2 + t^3/36
///   A'  = -1 + mu t + t^2/12
///   A'' = mu + t/6
/// The t^3/36 term encodes A'''(0) = 1/6 (L'Hopital limit of the RHS).
inline ProfileState taylor_start(const ShotParams& p) {
    const double e = p.taylor_eps;
    if (!(e > 0.0) || e > 1e-3) {
        throw ValidationError("taylor_eps", "must be in (0, 1e-3]");
    }
    ProfileState s;
    s.tau = e;
    s.a = -e + 0.5 * p.mu * e * e + e * e * e / 36.0;
    s.ap = -1.0 + p.mu * e + e * e / 12.0;
    s.app = p.mu + e / 6.0;
    return s;
}

/// Exact initial state (0, -1, mu) at tau=0; the RHS itself is undefined there.
inline ProfileState initial_state(double mu) {
    return ProfileState{0.0, 0.0, -1.0, mu};
}

/// Running integral of A over [0, taylor_eps] from the same cubic series.
inline double taylor_integral(const ShotParams& p) {
    const double e = p.taylor_eps;
    return -0.5 * e * e + p.mu * e * e * e / 6.0 + e * e * e * e / 144.0;
}

}  // namespace ddlab::profile
