#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "ddlab/errors.hpp"
#include "ddlab/profile/types.hpp"

namespace ddlab::diag {

/// Quantities fixed at the first minimum tau1 that parametrize the energy
/// comparison functions V1, V2.
struct EnergyContext {
    double tau1 = 0.0;
    double a_tau1 = 0.0;    ///< A(tau1) < 0
    double app_tau1 = 0.0;  ///< A''(tau1) > 0
    double tau_bar = 0.0;   ///< 6 A''(tau1)
};

inline EnergyContext make_energy_context(const profile::ShotOutcome& shot) {
    if (!shot.has_tau1()) throw DomainError("make_energy_context: shot has no tau1");
    EnergyContext ctx;
    ctx.tau1 = shot.tau1;
    ctx.a_tau1 = shot.tau1_state.a;
    ctx.app_tau1 = shot.tau1_state.app;
    ctx.tau_bar = 6.0 * ctx.app_tau1;
    return ctx;
}

/// V1(a) = (tau1/6) a ln(a/A(tau1)) + (A''(tau1) - tau1/6)(a - A(tau1));
/// upper comparison: (1/2) A'^2 < V1(A) on (tau1, tau2].
inline double v1(double a, const EnergyContext& ctx) {
    if (a >= 0.0) throw DomainError("v1: requires a < 0");
    return (ctx.tau1 / 6.0) * a * std::log(a / ctx.a_tau1) +
           (ctx.app_tau1 - ctx.tau1 / 6.0) * (a - ctx.a_tau1);
}

/// V2(a) = (tau_bar/6) a ln(a/A(tau1)); lower comparison when tau_bar >= tau2.
inline double v2(double a, const EnergyContext& ctx) {
    if (a >= 0.0) throw DomainError("v2: requires a < 0");
    return ctx.app_tau1 * a * std::log(a / ctx.a_tau1);
}

struct SandwichMargin {
    double tau = 0.0;
    double upper = 0.0;  ///< V1(A) - A'^2/2, expected > 0
    double lower = 0.0;  ///< A'^2/2 - V2(A), expected > 0 when applicable
};

struct SandwichReport {
    std::size_t checked = 0;
    std::size_t upper_violations = 0;
    std::size_t lower_violations = 0;
    bool lower_applicable = false;  ///< tau_bar >= tau2
    double worst_upper = 0.0;       ///< most negative upper margin seen
    double worst_lower = 0.0;
    std::vector<SandwichMargin> margins;
};

/// Sample-level check of the energy sandwich on (tau1, tau2]. Strict paper
/// inequalities are tested with a small slack: both bounds are tight at tau1,
/// so margins there sit at roundoff.
inline SandwichReport energy_sandwich_check(const profile::ShotOutcome& shot,
                                            const EnergyContext& ctx,
                                            double slack = 1e-12) {
    if (!shot.has_tau1() || !shot.has_tau2() || !(shot.tau1 < shot.tau2)) {
        throw DomainError("energy_sandwich_check: shot needs tau1 < tau2");
    }
    SandwichReport rep;
    rep.lower_applicable = ctx.tau_bar >= shot.tau2;
    for (const auto& s : shot.samples) {
        if (s.tau <= shot.tau1 || s.tau > shot.tau2 + 1e-15) continue;
        if (s.a >= 0.0) continue;  // terminal zero-touch shell
        SandwichMargin m;
        m.tau = s.tau;
        const double kinetic = 0.5 * s.ap * s.ap;
        m.upper = v1(s.a, ctx) - kinetic;
        if (m.upper < -slack * std::max(1.0, std::abs(kinetic))) ++rep.upper_violations;
        if (m.upper < rep.worst_upper) rep.worst_upper = m.upper;
        if (rep.lower_applicable) {
            m.lower = kinetic - v2(s.a, ctx);
            if (m.lower < -slack * std::max(1.0, std::abs(kinetic))) ++rep.lower_violations;
            if (m.lower < rep.worst_lower) rep.worst_lower = m.lower;
        }
        rep.margins.push_back(m);
        ++rep.checked;
    }
    return rep;
}

}  // namespace ddlab::diag
