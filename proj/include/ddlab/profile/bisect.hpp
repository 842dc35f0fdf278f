#pragma once

#include <string>
#include <utility>

#include "ddlab/errors.hpp"
#include "ddlab/profile/shoot.hpp"
#include "ddlab/profile/types.hpp"

namespace ddlab::profile {

struct BisectResult {
    double mu_star = 0.0;   ///< midpoint of the final bracket
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    int shots = 0;
    ShotOutcome lo_shot;  ///< last NegativeMax shot (bracket_lo)
    ShotOutcome hi_shot;  ///< last ReachesZero shot (bracket_hi)
};

/// Bisection on the shot classification. lo must classify NegativeMax and hi
/// ReachesZero; Undetermined shots abort (a silent side-assignment would
/// corrupt mu*).
inline BisectResult bisect_mu_star(double lo, double hi, double tol,
                                   const ShotParams& base = ShotParams{}) {
    if (!(lo < hi)) throw BracketInvalid("bisect_mu_star: requires lo < hi");
    if (!(tol > 0.0)) throw ValidationError("tol", "must be > 0");

    auto run = [&](double mu) {
        ShotParams p = base;
        p.mu = mu;
        return shoot(p);
    };

    BisectResult r;
    r.lo_shot = run(lo);
    r.hi_shot = run(hi);
    r.shots = 2;
    if (r.lo_shot.classification != Classification::NegativeMax) {
        throw BracketInvalid("bisect_mu_star: lo endpoint mu=" + std::to_string(lo) +
                             " classified " + to_string(r.lo_shot.classification) +
                             ", expected NegativeMax");
    }
    if (r.hi_shot.classification != Classification::ReachesZero) {
        throw BracketInvalid("bisect_mu_star: hi endpoint mu=" + std::to_string(hi) +
                             " classified " + to_string(r.hi_shot.classification) +
                             ", expected ReachesZero");
    }

    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;  // bracket at floating-point resolution
        ShotOutcome shot = run(mid);
        ++r.shots;
        switch (shot.classification) {
            case Classification::ReachesZero:
                hi = mid;
                r.hi_shot = std::move(shot);
                break;
            case Classification::NegativeMax:
                lo = mid;
                r.lo_shot = std::move(shot);
                break;
            case Classification::Undetermined:
                throw BisectionUndetermined(
                    mid, shot.step_underflow ? "step underflow before event tolerance"
                                             : "no terminal event before max_tau");
        }
    }
    r.bracket_lo = lo;
    r.bracket_hi = hi;
    r.mu_star = 0.5 * (lo + hi);
    return r;
}

}  // namespace ddlab::profile
