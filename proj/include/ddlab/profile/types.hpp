#pragma once

#include <cstddef>
#include <vector>

namespace ddlab::profile {

/// Phase point of the profile ODE 6 A A''' = tau A'.
struct ProfileState {
    double tau = 0.0;
    double a = 0.0;    ///< A(tau)
    double ap = 0.0;   ///< A'(tau)
    double app = 0.0;  ///< A''(tau)
};

/// Adaptive step control for the embedded RK integrator.
struct StepControl {
    double initial_step = 1e-6;
    double min_step = 1e-14;
    double max_step = 3e-4;  // also the trapezoid sampling density for norms/residuals
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
};

struct ShotParams {
    double mu = 0.0;           ///< A''(0)
    double taylor_eps = 1e-4;  ///< series start offset; valid in (0, 1e-3]
    StepControl step_ctrl{};
    double max_tau = 50.0;

    // event tolerances
    double event_tol_a = 1e-9;   ///< |A| level declaring a zero touch
    double event_tol_ap = 1e-9;  ///< |A'| level at a polished extremum
};

enum class Classification { ReachesZero, NegativeMax, Undetermined };

inline const char* to_string(Classification c) {
    switch (c) {
        case Classification::ReachesZero: return "ReachesZero";
        case Classification::NegativeMax: return "NegativeMax";
        case Classification::Undetermined: return "Undetermined";
    }
    return "?";
}

struct ShotOutcome {
    std::vector<ProfileState> samples;  ///< accepted steps, tau increasing, starts at tau=0
    double tau1 = -1.0;                 ///< first zero of A' (<0 if not reached)
    double tau2 = -1.0;                 ///< terminal event time (<0 if undetermined)
    ProfileState tau1_state{};
    ProfileState terminal_state{};
    Classification classification = Classification::Undetermined;
    bool step_underflow = false;  ///< min step reached before the event tolerance
    double mu = 0.0;

    bool has_tau1() const { return tau1 >= 0.0; }
    bool has_tau2() const { return tau2 >= 0.0; }
};

/// Odd-extended critical profile on [-tau*, tau*] with its L2 norms.
struct ProfileSolution {
    double mu_star = 0.0;
    double tau_star = 0.0;
    std::vector<double> grid;      ///< tau values, -tau* .. tau*
    std::vector<double> a_values;  ///< A (odd)
    std::vector<double> ap_values;   ///< A' (even)
    std::vector<double> app_values;  ///< A'' (odd across 0)
    double norm_a = 0.0;
    double norm_ap = 0.0;
    double norm_app = 0.0;
};

/// One evaluation point of the self-similar family u_{lambda,T}.
struct ScalingQuery {
    double lambda = 1.0;
    double big_t = 1.0;
    double t = 0.0;
};

}  // namespace ddlab::profile
