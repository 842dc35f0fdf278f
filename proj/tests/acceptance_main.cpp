// Acceptance suite: one pass/fail line per criterion, exit code = #failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "ddlab/diagnostics/energy.hpp"
#include "ddlab/diagnostics/first_integral.hpp"
#include "ddlab/diagnostics/model.hpp"
#include "ddlab/profile/assemble.hpp"
#include "ddlab/profile/bisect.hpp"
#include "ddlab/profile/scaling.hpp"
#include "ddlab/spectral/cn.hpp"
#include "oracles.hpp"

using namespace ddlab;

namespace {

int failures = 0;

void criterion(int num, const std::string& name, const std::function<std::string()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    std::string detail;
    try {
        detail = body();
    } catch (const std::exception& e) {
        pass = false;
        detail = std::string("exception: ") + e.what();
    }
    if (detail.rfind("FAIL", 0) == 0) pass = false;
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] criterion %2d (%s, %.1fs): %s\n", pass ? "PASS" : "FAIL", num,
                name.c_str(), secs, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

bool within_rel(double value, double ref, double rel) {
    return std::abs(value - ref) <= rel * std::abs(ref);
}

double h2sq_at_end(const spectral::RunResult& rr) {
    const double h2 = rr.series.rows.back().h2dot;
    return h2 * h2;
}

spectral::RunConfig gauss_cfg(double lambda, std::size_t n, double dt) {
    spectral::RunConfig cfg;
    cfg.lambda = lambda;
    cfg.n_modes = n;
    cfg.dt = dt;
    cfg.t_end = 0.1;
    cfg.output_every = 0.02;
    return cfg;
}

}  // namespace

int main() {
    profile::BisectResult coarse, fine;
    profile::ProfileSolution prof;
    profile::LogFit fit;

    criterion(1, "mu* recovery", [&] {
        coarse = profile::bisect_mu_star(0.0, 5.0, 1e-6);
        if (std::abs(coarse.mu_star - 0.354875) > 2e-3) {
            return "FAIL mu*=" + fmt(coarse.mu_star) + " outside 0.354875 +- 2e-3";
        }
        return "mu*=" + fmt(coarse.mu_star) + " bracket width " +
               fmt(coarse.bracket_hi - coarse.bracket_lo) + " in " +
               std::to_string(coarse.shots) + " shots";
    });

    criterion(2, "profile qualitative contract", [&] {
        fine = profile::bisect_mu_star(0.0, 5.0, 1e-8);
        prof = profile::assemble_profile(fine.mu_star, fine.lo_shot);
        fit = profile::fit_log_blowup(prof);
        const auto& end = fine.lo_shot.terminal_state;
        int minima = 0;
        for (std::size_t i = 1; i < prof.grid.size(); ++i) {
            if (prof.grid[i - 1] <= 0.0 || prof.grid[i] >= prof.tau_star) continue;
            if (prof.ap_values[i - 1] < 0.0 && prof.ap_values[i] >= 0.0) ++minima;
        }
        if (minima != 1) return "FAIL interior minima = " + std::to_string(minima);
        if (std::abs(end.a) > 1e-6) return "FAIL |A(tau*)| = " + fmt(std::abs(end.a));
        if (std::abs(end.ap) > 1e-6) return "FAIL |A'(tau*)| = " + fmt(std::abs(end.ap));
        if (fit.r2 < 0.99) return "FAIL log-fit R^2 = " + fmt(fit.r2);
        return "tau*=" + fmt(prof.tau_star) + " |A|,|A'| at end = " + fmt(std::abs(end.a)) +
               "," + fmt(std::abs(end.ap)) + " R^2=" + fmt(fit.r2);
    });

    criterion(3, "energy/first-integral suite", [&] {
        std::ostringstream os;
        for (double mu : {0.0, 0.1, fine.mu_star, 1.0, 5.0}) {
            profile::ShotParams p;
            p.mu = mu;
            const auto shot = profile::shoot(p);
            const auto ctx = diag::make_energy_context(shot);
            const auto rep = diag::energy_sandwich_check(shot, ctx);
            if (rep.upper_violations != 0) {
                return "FAIL mu=" + fmt(mu) + ": " + std::to_string(rep.upper_violations) +
                       " upper-bound violations";
            }
            if (rep.lower_applicable && rep.lower_violations != 0) {
                return "FAIL mu=" + fmt(mu) + ": " + std::to_string(rep.lower_violations) +
                       " lower-bound violations";
            }
            const double res = diag::first_integral_residual(shot);
            if (res > 1e-8) {
                return "FAIL mu=" + fmt(mu) + ": first-integral residual " + fmt(res);
            }
            os << " " << fmt(res);
        }
        return "zero violations; residuals" + os.str();
    });

    criterion(4, "ill-posedness scaling table", [&] {
        const auto rows = profile::ill_posedness_table({0.5, 0.2, 0.1}, prof);
        for (std::size_t i = 1; i < rows.size(); ++i) {
            if (!(rows[i].norm_t0 < rows[i - 1].norm_t0)) {
                return std::string("FAIL t=0 column not decreasing");
            }
            if (!(rows[i].ratio >= 1e2 * rows[i - 1].ratio)) {
                return "FAIL ratio step " + fmt(rows[i].ratio / rows[i - 1].ratio) + " < 1e2";
            }
        }
        return "ratios " + fmt(rows[0].ratio) + " -> " + fmt(rows[1].ratio) + " -> " +
               fmt(rows[2].ratio);
    });

    criterion(5, "t=0 masses, Table 1 row", [&] {
        const spectral::Grid g(2048);
        const struct {
            double lambda, ref;
        } rows[] = {{1.0, 0.886226925453},
                    {0.4, 0.261191032665},
                    {0.2, 0.103653730004},
                    {0.1, 0.0411350100123},
                    {0.05, 0.0163244395416}};
        for (const auto& r : rows) {
            const double m = spectral::mass(spectral::init_scaled_gaussian(r.lambda, g));
            if (!within_rel(m, r.ref, 1e-9)) {
                return "FAIL lambda=" + fmt(r.lambda) + " mass=" + fmt(m) + " vs " + fmt(r.ref);
            }
        }
        return std::string("all five masses match to 9 significant figures");
    });

    spectral::RunResult run_02_2048;
    criterion(6, "mass conservation in evolution", [&] {
        run_02_2048 = spectral::run_simulation(gauss_cfg(0.2, 2048, 1e-3));
        const double m0 = run_02_2048.series.rows.front().mass;
        double drift = 0.0;
        for (const auto& r : run_02_2048.series.rows) {
            drift = std::max(drift, std::abs(r.mass - m0) / std::abs(m0));
        }
        if (drift > 1e-8) return "FAIL relative mass drift " + fmt(drift);
        return "relative drift " + fmt(drift);
    });

    spectral::RunResult run_02_512_dt1, run_01_2048;
    criterion(7, "golden H2 endpoint values", [&] {
        run_02_512_dt1 = spectral::run_simulation(gauss_cfg(0.2, 512, 1e-3));
        const double v02 = h2sq_at_end(run_02_512_dt1);
        if (!within_rel(v02, 696.5301160, 0.01)) {
            return "FAIL lambda=0.2 value " + fmt(v02) + " vs 696.5301160 (1%)";
        }
        if (!within_rel(v02, 696.5301160, 0.001)) {
            return "FAIL lambda=0.2 value " + fmt(v02) + " misses the tightened 0.1%";
        }
        run_01_2048 = spectral::run_simulation(gauss_cfg(0.1, 2048, 1e-3));
        const double v01 = h2sq_at_end(run_01_2048);
        if (!within_rel(v01, 15077.20691, 0.02)) {
            return "FAIL lambda=0.1 value " + fmt(v01) + " vs 15077.20691 (2%)";
        }
        return "lambda=.2: " + fmt(v02) + " (ref 696.5301160), lambda=.1: " + fmt(v01) +
               " (ref 15077.20691)";
    });

    criterion(8, "Richardson consistency and temporal order", [&] {
        const double v4 = h2sq_at_end(spectral::run_simulation(gauss_cfg(0.2, 512, 4e-3)));
        const double v2 = h2sq_at_end(spectral::run_simulation(gauss_cfg(0.2, 512, 2e-3)));
        const double v1 = h2sq_at_end(run_02_512_dt1);
        const double r42 = spectral::richardson(v4, v2);
        const double r21 = spectral::richardson(v2, v1);
        if (!within_rel(r42, 697.87, 0.005)) return "FAIL R(.004,.002)=" + fmt(r42);
        if (!within_rel(r21, 697.97, 0.005)) return "FAIL R(.002,.001)=" + fmt(r21);
        const double order = std::log2(std::abs((v4 - v2) / (v2 - v1)));
        if (order < 1.7 || order > 2.3) return "FAIL observed order " + fmt(order);
        return "R=" + fmt(r42) + "," + fmt(r21) + " order=" + fmt(order);
    });

    criterion(9, "norm blow-up trend across lambda", [&] {
        const auto run_04 = spectral::run_simulation(gauss_cfg(0.4, 2048, 1e-3));
        const double g04 = h2sq_at_end(run_04);
        const double g02 = h2sq_at_end(run_02_2048);
        const double g01 = h2sq_at_end(run_01_2048);
        if (!(g02 > 10.0 * g04)) return "FAIL growth 0.4->0.2 only " + fmt(g02 / g04);
        if (!(g01 > 10.0 * g02)) return "FAIL growth 0.2->0.1 only " + fmt(g01 / g02);
        auto h2_data = [](const spectral::RunResult& rr) {
            const auto& r0 = rr.series.rows.front();
            return r0.l2 + r0.h1dot + r0.h2dot;
        };
        const double d04 = h2_data(run_04), d02 = h2_data(run_02_2048),
                     d01 = h2_data(run_01_2048);
        if (!(d02 < d04 && d01 < d02)) return std::string("FAIL data H2 not shrinking");
        return "H2sq(0.1): " + fmt(g04) + " -> " + fmt(g02) + " -> " + fmt(g01) +
               "; data H2: " + fmt(d04) + " -> " + fmt(d02) + " -> " + fmt(d01);
    });

    criterion(10, "compacton transport", [&] {
        spectral::RunConfig cfg;
        cfg.lambda = 0.5;
        cfg.delta = 1e-8;
        cfg.n_modes = 2048;
        cfg.dt = 1e-4;
        cfg.t_end = 0.1;
        cfg.output_every = 0.02;
        const spectral::Grid g{cfg.n_modes, cfg.half_length};
        const auto rr = spectral::evolve(spectral::compacton_field(0.5, 0.0, g), cfg);
        const auto vals = spectral::transform_backward(rr.snapshots.back().field);
        const auto exact = spectral::compacton_translate_values(0.5, 0.0, 0.1, g);
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < vals.size(); ++i) {
            num += (vals[i] - exact[i]) * (vals[i] - exact[i]);
            den += exact[i] * exact[i];
        }
        const double dev = std::sqrt(num / den);
        if (dev > 1e-2) return "FAIL relative L2 deviation " + fmt(dev);
        return "relative L2 deviation " + fmt(dev);
    });

    criterion(11, "standalone property suites", [&] {
        const spectral::Grid g(256);
        // spectral exactness: derivative of sin is cos to 1e-12
        std::vector<double> v(g.n_modes);
        for (std::size_t i = 0; i < g.n_modes; ++i) v[i] = std::sin(g.x(i));
        const auto ds =
            spectral::transform_backward(spectral::spectral_derivative(
                spectral::transform_forward(g, v), 1));
        for (std::size_t i = 0; i < g.n_modes; ++i) {
            if (std::abs(ds[i] - std::cos(g.x(i))) > 1e-12) {
                return std::string("FAIL spectral derivative exactness");
            }
        }
        // Parseval to 1e-10
        for (std::size_t i = 0; i < g.n_modes; ++i) {
            v[i] = std::exp(-4.0 * g.x(i) * g.x(i)) + 0.1 * std::cos(2.5 * g.x(i));
        }
        const auto f = spectral::transform_forward(g, v);
        double quad = 0.0;
        for (double x : v) quad += x * x;
        quad *= g.dx();
        const double l2 = spectral::norms(f).l2;
        if (std::abs(l2 * l2 - quad) > 1e-10 * quad) return std::string("FAIL Parseval");
        // dealias equals convolution to 1e-12
        spectral::SpectralField a(g), b(g);
        a.coeffs = oracles::random_band_limited(g, g.n_modes / 2 - 1, 11);
        b.coeffs = oracles::random_band_limited(g, g.n_modes / 2 - 1, 12);
        const auto prod = spectral::dealias_product(a, b);
        const auto ref = oracles::convolve_oracle(g, a.coeffs, b.coeffs);
        for (std::size_t j = 0; j < prod.coeffs.size(); ++j) {
            if (std::abs(prod.coeffs[j] - ref[j]) > 1e-12) {
                return std::string("FAIL dealias vs convolution");
            }
        }
        // CN zero-field fixed point
        spectral::RunConfig cfg = gauss_cfg(1.0, 256, 1e-3);
        spectral::CnStepper stepper(g, cfg);
        const auto z = stepper.step(spectral::SpectralField(g), 0);
        for (const auto& c : z.coeffs) {
            if (std::abs(c) != 0.0) return std::string("FAIL CN zero fixed point");
        }
        // odd-extension symmetry
        const std::size_t n = prof.grid.size();
        for (std::size_t i = 0; i < n / 2; ++i) {
            if (prof.a_values[i] != -prof.a_values[n - 1 - i]) {
                return std::string("FAIL odd extension symmetry");
            }
        }
        // model energy conservation to 1e-8
        const auto traj = diag::integrate_model(-1.0, -1.0, 0.3548, 1.0);
        const double e0 = diag::model_energy(traj.front(), 0.3548);
        for (const auto& s : traj) {
            if (std::abs(diag::model_energy(s, 0.3548) - e0) > 1e-8) {
                return std::string("FAIL model energy conservation");
            }
        }
        return std::string("spectral exactness, Parseval, dealias-conv, CN fixed point, "
                           "odd symmetry, model energy all hold");
    });

    std::printf("%d of 11 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
