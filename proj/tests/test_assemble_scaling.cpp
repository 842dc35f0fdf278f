#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "ddlab/profile/assemble.hpp"
#include "ddlab/profile/bisect.hpp"
#include "ddlab/profile/csv.hpp"
#include "ddlab/profile/scaling.hpp"
#include "oracles.hpp"

using namespace ddlab;
using namespace ddlab::profile;

namespace {

const BisectResult& critical_bisect() {
    static const BisectResult r = bisect_mu_star(0.0, 5.0, 1e-8);
    return r;
}

const ProfileSolution& critical_profile() {
    static const ProfileSolution sol =
        assemble_profile(critical_bisect().mu_star, critical_bisect().lo_shot);
    return sol;
}

}  // namespace

TEST_CASE("odd extension is exact at mirrored samples") {
    const ProfileSolution& sol = critical_profile();
    const std::size_t n = sol.grid.size();
    REQUIRE(n >= 3);
    for (std::size_t i = 0; i < n / 2; ++i) {
        const std::size_t j = n - 1 - i;
        REQUIRE(sol.grid[i] == -sol.grid[j]);
        REQUIRE(sol.a_values[i] == -sol.a_values[j]);
        REQUIRE(sol.ap_values[i] == sol.ap_values[j]);
        REQUIRE(sol.app_values[i] == -sol.app_values[j]);
    }
}

TEST_CASE("profile vanishes at the support endpoints within tolerance") {
    const ProfileSolution& sol = critical_profile();
    CHECK(std::abs(sol.a_values.front()) <= 1e-6);
    CHECK(std::abs(sol.a_values.back()) <= 1e-6);
    CHECK(std::abs(sol.ap_values.back()) <= 1e-6);
    CHECK(sol.tau_star > 4.0);
    CHECK(sol.tau_star < 5.0);
}

TEST_CASE("profile has a unique interior minimum on (0, tau*)") {
    const ProfileSolution& sol = critical_profile();
    int minima = 0;
    for (std::size_t i = 1; i < sol.grid.size(); ++i) {
        if (sol.grid[i] <= 0.0 || sol.grid[i] >= sol.tau_star) continue;
        if (sol.grid[i - 1] <= 0.0) continue;
        if (sol.ap_values[i - 1] < 0.0 && sol.ap_values[i] >= 0.0) ++minima;
    }
    CHECK(minima == 1);
}

TEST_CASE("profile norms are finite and stable against the oracle trajectory") {
    const ProfileSolution& sol = critical_profile();
    CHECK(std::isfinite(sol.norm_a));
    CHECK(std::isfinite(sol.norm_ap));
    CHECK(std::isfinite(sol.norm_app));
    // cross-check |A| norms with the fixed-step oracle at the same mu
    const auto oracle = oracles::oracle_shoot(critical_bisect().bracket_lo, 1e-6, 50);
    REQUIRE(oracle.classification == Classification::NegativeMax);
    std::vector<double> t, a, ap;
    for (const auto& s : oracle.samples) {
        t.push_back(s.tau);
        a.push_back(s.a);
        ap.push_back(s.ap);
    }
    const double na = std::sqrt(2.0 * l2_norm_sq_trapezoid(t, a));
    const double nap = std::sqrt(2.0 * l2_norm_sq_trapezoid(t, ap));
    CHECK(sol.norm_a == Catch::Approx(na).epsilon(1e-5));
    CHECK(sol.norm_ap == Catch::Approx(nap).epsilon(1e-5));
    // A'' log-diverges; agreement is quadrature-window limited
    CHECK(sol.norm_app == Catch::Approx(2.24).margin(0.05));
}

TEST_CASE("non-critical shots are rejected") {
    ShotParams p;
    p.mu = 1.0;
    const ShotOutcome shot = shoot(p);
    REQUIRE(shot.classification == Classification::ReachesZero);
    CHECK_THROWS_AS(assemble_profile(1.0, shot), NotCritical);
}

TEST_CASE("fit recovers a synthetic exact log signal") {
    ProfileSolution sol;
    sol.tau_star = 2.0;
    for (int i = 2000; i >= 1; --i) {
        const double sigma = i * 1e-5;
        sol.grid.push_back(sol.tau_star - sigma);
        sol.a_values.push_back(0.0);
        sol.ap_values.push_back(0.0);
        sol.app_values.push_back(2.0 * std::log(sigma));
    }
    const LogFit fit = fit_log_blowup(sol);
    CHECK(fit.slope == Catch::Approx(2.0).epsilon(1e-12));
    CHECK(fit.r2 == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("critical shot fits the log blow-up with R^2 >= 0.99") {
    const LogFit fit = fit_log_blowup(critical_profile());
    INFO("slope=" << fit.slope << " r2=" << fit.r2 << " n=" << fit.n_points);
    CHECK(fit.r2 >= 0.99);
    CHECK(fit.slope > 0.0);
}

TEST_CASE("|A''| / |ln sigma| stays bounded above and below across the window") {
    const ProfileSolution& sol = critical_profile();
    double lo = 1e300, hi = 0.0;
    for (std::size_t i = 0; i < sol.grid.size(); ++i) {
        const double tau = sol.grid[i];
        if (tau <= 0.0) continue;
        const double sigma = sol.tau_star - tau;
        if (sigma < 1e-3 || sigma > 1e-2) continue;
        const double ratio = std::abs(sol.app_values[i]) / std::abs(std::log(sigma));
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
    }
    CHECK(lo > 0.1);
    CHECK(hi < 10.0);
    CHECK(hi / lo < 5.0);
}

TEST_CASE("fit reports insufficient samples on sparse grids") {
    ProfileSolution sol;
    sol.tau_star = 2.0;
    for (int i = 5; i >= 1; --i) {
        const double sigma = i * 2e-3;
        sol.grid.push_back(sol.tau_star - sigma);
        sol.a_values.push_back(0.0);
        sol.ap_values.push_back(0.0);
        sol.app_values.push_back(std::log(sigma));
    }
    CHECK_THROWS_AS(fit_log_blowup(sol), InsufficientSamples);
}

TEST_CASE("scaling formula collapses to the plain norm sum at unit scales") {
    const ProfileSolution& sol = critical_profile();
    const double v = selfsim_h2_norm({1.0, 1.0, 0.0}, sol);
    CHECK(v == Catch::Approx(sol.norm_a + sol.norm_ap + sol.norm_app).epsilon(1e-14));
}

TEST_CASE("each scaling term carries its own (T-t) exponent") {
    const ProfileSolution& sol = critical_profile();
    // scale T-t by 2^6: term weights change by 2^1, 2^-1, 2^-3
    const double s = 1.0, s2 = 64.0;
    auto term = [&](double na, double nap, double napp, double tt) {
        ProfileSolution tmp = sol;
        tmp.norm_a = na;
        tmp.norm_ap = nap;
        tmp.norm_app = napp;
        return selfsim_h2_scaled(1.0, tt, tmp);
    };
    CHECK(term(1, 0, 0, s2) / term(1, 0, 0, s) == Catch::Approx(2.0).epsilon(1e-12));
    CHECK(term(0, 1, 0, s2) / term(0, 1, 0, s) == Catch::Approx(0.5).epsilon(1e-12));
    CHECK(term(0, 0, 1, s2) / term(0, 0, 1, s) == Catch::Approx(0.125).epsilon(1e-12));
}

TEST_CASE("eps = 0.1 family grows by at least 1e6 between t=0 and t=1") {
    const ProfileSolution& sol = critical_profile();
    const double eps = 0.1;
    const double n0 = selfsim_h2_scaled(eps * eps, 1.0 + std::pow(eps, 16.0), sol);
    const double n1 = selfsim_h2_scaled(eps * eps, std::pow(eps, 16.0), sol);
    CHECK(n1 / n0 >= 1e6);
}

TEST_CASE("ratio is computed consistently from the same formula") {
    const ProfileSolution& sol = critical_profile();
    const double n0 = selfsim_h2_norm({1.0, 2.0, 0.0}, sol);
    const double n1 = selfsim_h2_norm({1.0, 2.0, 1.0}, sol);
    CHECK(n1 / n0 == Catch::Approx(selfsim_h2_scaled(1.0, 1.0, sol) /
                                   selfsim_h2_scaled(1.0, 2.0, sol))
                         .epsilon(1e-14));
}

TEST_CASE("ill-posedness table columns are monotone") {
    const ProfileSolution& sol = critical_profile();
    const auto rows = ill_posedness_table({0.5, 0.2, 0.1, 0.05}, sol);
    REQUIRE(rows.size() == 4);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i].norm_t0 < rows[i - 1].norm_t0);
        CHECK(rows[i].ratio > rows[i - 1].ratio);
    }
    // data shrinks no slower than linearly in eps
    for (const auto& r : rows) {
        CHECK(r.norm_t0 / r.eps < 10.0);
        CHECK(r.norm_t0 / r.eps > 0.1);
    }
    CHECK_THROWS_AS(ill_posedness_table({1.0}, sol), ValidationError);
}

TEST_CASE("profile CSV round-trips") {
    const ProfileSolution& sol = critical_profile();
    std::ostringstream os;
    write_profile_csv(os, sol);
    std::istringstream is(os.str());
    const ProfileSolution back = read_profile_csv(is);
    CHECK(back.mu_star == sol.mu_star);
    CHECK(back.tau_star == sol.tau_star);
    CHECK(back.norm_app == sol.norm_app);
    REQUIRE(back.grid.size() == sol.grid.size());
    CHECK(back.grid.front() == sol.grid.front());
    CHECK(back.a_values[5] == sol.a_values[5]);
}
