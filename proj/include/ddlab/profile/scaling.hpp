#pragma once

#include <cmath>
#include <vector>

#include "ddlab/errors.hpp"
#include "ddlab/profile/types.hpp"

namespace ddlab::profile {

/// H2 norm of u_{lambda,T}(., t) in the printed sum form:
///   lambda^{7/6}(T-t)^{1/6}||A|| + lambda^{5/6}(T-t)^{-1/6}||A'||
///   + lambda^{1/2}(T-t)^{-1/2}||A''||
/// with T-t supplied directly (callers that know T-t analytically avoid the
/// 1 + eps^16 rounding loss at t = 1).
inline double selfsim_h2_scaled(double lambda, double t_to_blowup,
                                const ProfileSolution& sol) {
    if (!(lambda > 0.0)) throw ValidationError("lambda", "must be > 0");
    if (!(t_to_blowup > 0.0)) throw ValidationError("t", "must satisfy t < T");
    const double s = t_to_blowup;
    return std::pow(lambda, 7.0 / 6.0) * std::pow(s, 1.0 / 6.0) * sol.norm_a +
           std::pow(lambda, 5.0 / 6.0) * std::pow(s, -1.0 / 6.0) * sol.norm_ap +
           std::sqrt(lambda) * std::pow(s, -0.5) * sol.norm_app;
}

inline double selfsim_h2_norm(const ScalingQuery& q, const ProfileSolution& sol) {
    return selfsim_h2_scaled(q.lambda, q.big_t - q.t, sol);
}

struct ScalingRow {
    double eps = 0.0;
    double norm_t0 = 0.0;
    double norm_t1 = 0.0;
    double ratio = 0.0;
};

/// Rows of the ill-posedness table for the family lambda = eps^2,
/// T = 1 + eps^16: data size at t=0 vs solution size at t=1.
inline std::vector<ScalingRow> ill_posedness_table(const std::vector<double>& eps_list,
                                                   const ProfileSolution& sol) {
    std::vector<ScalingRow> rows;
    rows.reserve(eps_list.size());
    for (double eps : eps_list) {
        if (!(eps > 0.0) || !(eps < 1.0)) {
            throw ValidationError("eps", "must lie in (0, 1)");
        }
        const double lambda = eps * eps;
        const double eps16 = std::pow(eps, 16.0);
        ScalingRow r;
        r.eps = eps;
        r.norm_t0 = selfsim_h2_scaled(lambda, 1.0 + eps16, sol);
        r.norm_t1 = selfsim_h2_scaled(lambda, eps16, sol);
        r.ratio = r.norm_t1 / r.norm_t0;
        rows.push_back(r);
    }
    return rows;
}

}  // namespace ddlab::profile
