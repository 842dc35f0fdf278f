#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "ddlab/errors.hpp"
#include "ddlab/profile/types.hpp"

namespace ddlab::profile {

/// Composite trapezoid of f^2 over the sample grid.
inline double l2_norm_sq_trapezoid(const std::vector<double>& tau,
                                   const std::vector<double>& f) {
    double acc = 0.0;
    for (std::size_t i = 1; i < tau.size(); ++i) {
        const double h = tau[i] - tau[i - 1];
        acc += 0.5 * h * (f[i] * f[i] + f[i - 1] * f[i - 1]);
    }
    return acc;
}

/// Odd-extend a critical shot onto [-tau*, tau*] and compute the L2 norms of
/// A, A', A'' over the support. The terminal state must sit within crit_tol of
/// (A, A') = (0, 0); the bisection's NegativeMax-side shot satisfies this.
inline ProfileSolution assemble_profile(double mu_star, const ShotOutcome& shot,
                                        double crit_tol = 1e-6) {
    if (!shot.has_tau2()) throw NotCritical("assemble_profile: shot has no terminal event");
    const ProfileState& end = shot.terminal_state;
    if (std::abs(end.a) > crit_tol || std::abs(end.ap) > crit_tol) {
        throw NotCritical("assemble_profile: terminal state (|A|=" + std::to_string(std::abs(end.a)) +
                          ", |A'|=" + std::to_string(std::abs(end.ap)) +
                          ") exceeds criticality tolerance " + std::to_string(crit_tol));
    }

    // positive-side samples up to tau2 (samples are tau-increasing)
    std::vector<double> tp, ap_, app_, av;
    tp.reserve(shot.samples.size());
    av.reserve(shot.samples.size());
    for (const ProfileState& s : shot.samples) {
        if (s.tau > shot.tau2 + 1e-15) break;
        if (!tp.empty() && s.tau <= tp.back()) continue;
        tp.push_back(s.tau);
        av.push_back(s.a);
        ap_.push_back(s.ap);
        app_.push_back(s.app);
    }

    ProfileSolution sol;
    sol.mu_star = mu_star;
    sol.tau_star = shot.tau2;

    const std::size_t n = tp.size();
    sol.grid.reserve(2 * n - 1);
    sol.a_values.reserve(2 * n - 1);
    sol.ap_values.reserve(2 * n - 1);
    sol.app_values.reserve(2 * n - 1);
    // mirrored half: A(-tau) = -A(tau), A'(-tau) = A'(tau), A''(-tau) = -A''(tau)
    for (std::size_t i = n; i-- > 1;) {
        sol.grid.push_back(-tp[i]);
        sol.a_values.push_back(-av[i]);
        sol.ap_values.push_back(ap_[i]);
        sol.app_values.push_back(-app_[i]);
    }
    for (std::size_t i = 0; i < n; ++i) {
        sol.grid.push_back(tp[i]);
        sol.a_values.push_back(av[i]);
        sol.ap_values.push_back(ap_[i]);
        sol.app_values.push_back(app_[i]);
    }

    sol.norm_a = std::sqrt(2.0 * l2_norm_sq_trapezoid(tp, av));
    sol.norm_ap = std::sqrt(2.0 * l2_norm_sq_trapezoid(tp, ap_));
    sol.norm_app = std::sqrt(2.0 * l2_norm_sq_trapezoid(tp, app_));
    return sol;
}

struct LogFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    std::size_t n_points = 0;
    double window_lo = 0.0;  ///< sigma = tau* - tau range used
    double window_hi = 0.0;
};

/// Least-squares fit of A''(tau) against ln(tau* - tau) over a fixed decade
/// window ahead of the event-tolerance region, where Prop-(v)-style log
/// divergence dominates.
inline LogFit fit_log_blowup(const ProfileSolution& sol, double sigma_lo = 1e-3,
                             double sigma_hi = 1e-2, std::size_t min_points = 20) {
    std::vector<double> xs, ys;
    bool any_in_last_tenth = false;
    for (std::size_t i = 0; i < sol.grid.size(); ++i) {
        const double tau = sol.grid[i];
        if (tau <= 0.0) continue;
        const double sigma = sol.tau_star - tau;
        if (sigma < 0.1 && sigma > 0.0) any_in_last_tenth = true;
        if (sigma >= sigma_lo && sigma <= sigma_hi) {
            xs.push_back(std::log(sigma));
            ys.push_back(sol.app_values[i]);
        }
    }
    if (!any_in_last_tenth) {
        throw InsufficientSamples("fit_log_blowup: no samples within (tau*-0.1, tau*)");
    }
    if (xs.size() < min_points) {
        throw InsufficientSamples("fit_log_blowup: only " + std::to_string(xs.size()) +
                                  " samples in the fit window, need >= " +
                                  std::to_string(min_points));
    }

    const double n = static_cast<double>(xs.size());
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx, dy = ys[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    LogFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (fit.slope * xs[i] + fit.intercept);
        ss_res += r * r;
    }
    fit.r2 = (syy > 0.0) ? 1.0 - ss_res / syy : 1.0;
    fit.n_points = xs.size();
    fit.window_lo = sigma_lo;
    fit.window_hi = sigma_hi;
    return fit;
}

}  // namespace ddlab::profile
