#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "ddlab/errors.hpp"
#include "ddlab/profile/integrator.hpp"
#include "ddlab/profile/ode.hpp"
#include "ddlab/profile/types.hpp"

namespace ddlab::profile {

namespace detail {

using Vec3 = std::array<double, 3>;

struct OdeRhs {
    Vec3 operator()(double t, const Vec3& y) const {
        if (std::abs(y[0]) < kDegenerateFloor) {
            throw Degenerate("shoot: |A| below degeneracy floor at tau=" + std::to_string(t));
        }
        return {y[1], y[2], t * y[1] / (6.0 * y[0])};
    }
};

inline ProfileState to_state(double t, const Vec3& y) { return {t, y[0], y[1], y[2]}; }

/// Bisection event polish inside one accepted step: finds s in [lo, hi] with
/// pick(state(s)) = 0, where state(s) is the RK4 re-integration from (t0, y0).
template <typename Integ, typename Pick>
std::pair<double, Vec3> polish_event(const Integ& integ, double t0, const Vec3& y0,
                                     double lo, double hi, Pick pick) {
    double glo = (lo == 0.0) ? pick(y0) : pick(integ.rk4(t0, y0, lo));
    for (int it = 0; it < 120; ++it) {
        const double mid = 0.5 * (lo + hi);
        const Vec3 ym = integ.rk4(t0, y0, mid);
        const double gm = pick(ym);
        if (std::abs(gm) <= 1e-13 || (hi - lo) <= 1e-16 * std::max(1.0, t0)) {
            return {mid, ym};
        }
        if ((glo < 0.0) == (gm < 0.0)) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    const double mid = 0.5 * (lo + hi);
    return {mid, integ.rk4(t0, y0, mid)};
}

}  // namespace detail

/// Integrate the shooting IVP from the Taylor start and classify the terminal
/// event: A reaches zero with A' > 0, or A' reaches zero with A < 0 after the
/// first minimum, or the horizon max_tau is hit.
inline ShotOutcome shoot(const ShotParams& params) {
    if (params.mu < 0.0) throw ValidationError("mu", "must be >= 0");
    if (!(params.step_ctrl.abs_tol > 0.0) || !(params.step_ctrl.rel_tol > 0.0)) {
        throw ValidationError("step_ctrl", "tolerances must be > 0");
    }

    using detail::Vec3;
    detail::OdeRhs rhs;
    profile::DormandPrince<3, detail::OdeRhs> integ(rhs, params.step_ctrl);

    ShotOutcome out;
    out.mu = params.mu;
    out.samples.push_back(initial_state(params.mu));

    ProfileState s0 = taylor_start(params);
    out.samples.push_back(s0);

    double t = s0.tau;
    Vec3 y{s0.a, s0.ap, s0.app};
    Vec3 f = rhs(t, y);
    double h = params.step_ctrl.initial_step;
    bool have_tau1 = false;

    const double tol_a = params.event_tol_a;

    while (true) {
        if (t >= params.max_tau) {
            out.classification = Classification::Undetermined;
            out.terminal_state = detail::to_state(t, y);
            return out;
        }
        h = std::min({h, params.step_ctrl.max_step, params.max_tau - t});
        // geometric sampling on the rising approach to A = 0: keeps the step
        // from crossing the singularity and feeds the log-fit window
        if (have_tau1 && y[1] > 0.0 && y[0] > -1e-3) {
            h = std::min(h, std::max(0.1 * std::abs(y[0]) / std::max(y[1], 1e-12), 1e-13));
        }
        if (h < params.step_ctrl.min_step) h = params.step_ctrl.min_step;

        auto st = integ.step(t, y, f, h);
        if (!st.accepted) {
            out.step_underflow = true;
            break;
        }
        if (st.y[0] >= 0.0) {
            // overshot the singular line; force a smaller step
            h = 0.25 * st.h_used;
            if (h < params.step_ctrl.min_step) {
                out.step_underflow = true;
                break;
            }
            continue;
        }

        const double t2 = t + st.h_used;

        if (!have_tau1 && y[1] < 0.0 && st.y[1] >= 0.0) {
            auto [sev, yev] = detail::polish_event(integ, t, y, 0.0, st.h_used,
                                                   [](const Vec3& v) { return v[1]; });
            out.tau1 = t + sev;
            out.tau1_state = detail::to_state(out.tau1, yev);
            have_tau1 = true;
            if (out.tau1 < t2 - 1e-15) out.samples.push_back(out.tau1_state);

            if (st.y[1] <= 0.0) {
                // A' dips again within the same step: negative maximum
                auto [sm, ym] = detail::polish_event(integ, t, y, sev + 1e-16, st.h_used,
                                                     [](const Vec3& v) { return -v[1]; });
                out.tau2 = t + sm;
                out.terminal_state = detail::to_state(out.tau2, ym);
                out.classification = Classification::NegativeMax;
                out.samples.push_back(out.terminal_state);
                return out;
            }
        } else if (have_tau1 && y[1] > 0.0 && st.y[1] <= 0.0) {
            auto [sm, ym] = detail::polish_event(integ, t, y, 0.0, st.h_used,
                                                 [](const Vec3& v) { return v[1]; });
            out.tau2 = t + sm;
            out.terminal_state = detail::to_state(out.tau2, ym);
            out.classification = Classification::NegativeMax;
            out.samples.push_back(out.terminal_state);
            return out;
        }

        if (have_tau1 && st.y[1] > 0.0 && st.y[0] >= -tol_a) {
            auto [sm, ym] = detail::polish_event(integ, t, y, 0.0, st.h_used,
                                                 [tol_a](const Vec3& v) { return v[0] + tol_a; });
            out.tau2 = t + sm;
            out.terminal_state = detail::to_state(out.tau2, ym);
            out.classification = Classification::ReachesZero;
            out.samples.push_back(out.terminal_state);
            return out;
        }

        t = t2;
        y = st.y;
        f = st.f_new;
        h = st.h_next;
        out.samples.push_back(detail::to_state(t, y));
    }

    // step underflow: classify from the last valid state via the energy
    // comparison V2 (if A' is pinned above sqrt(2 V2) > 0 the trajectory must
    // reach zero), otherwise report Undetermined
    out.terminal_state = detail::to_state(t, y);
    if (have_tau1 && y[1] > 0.0 && y[0] < 0.0) {
        const double a1 = out.tau1_state.a;
        const double app1 = out.tau1_state.app;
        const double tau_bar = 6.0 * app1;
        const double v2 = app1 * y[0] * std::log(y[0] / a1);
        if (tau_bar >= t && v2 > 0.0 && 0.5 * y[1] * y[1] > v2) {
            out.tau2 = t;
            out.classification = Classification::ReachesZero;
            return out;
        }
    }
    out.classification = Classification::Undetermined;
    return out;
}

}  // namespace ddlab::profile
