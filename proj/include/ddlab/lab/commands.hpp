#pragma once

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ddlab/diagnostics/energy.hpp"
#include "ddlab/diagnostics/first_integral.hpp"
#include "ddlab/diagnostics/model.hpp"
#include "ddlab/lab/config.hpp"
#include "ddlab/lab/csv.hpp"
#include "ddlab/profile/assemble.hpp"
#include "ddlab/profile/bisect.hpp"
#include "ddlab/profile/csv.hpp"
#include "ddlab/profile/scaling.hpp"
#include "ddlab/spectral/cn.hpp"

namespace ddlab::lab {

namespace fs = std::filesystem;

struct CommandResult {
    int failures = 0;
    std::vector<std::string> errors;
};

inline profile::ShotParams shot_params_from(const ExperimentSpec& s, double mu) {
    profile::ShotParams p;
    p.mu = mu;
    p.taylor_eps = s.taylor_eps;
    p.step_ctrl.abs_tol = s.abs_tol;
    p.step_ctrl.rel_tol = s.rel_tol;
    p.step_ctrl.max_step = s.max_step;
    p.max_tau = s.max_tau;
    return p;
}

inline spectral::RunConfig run_config_from(const ExperimentSpec& s, double lambda,
                                           std::size_t n_modes, double dt,
                                           bool allow_delta_zero) {
    spectral::RunConfig cfg;
    cfg.lambda = lambda;
    cfg.delta = s.delta;
    cfg.n_modes = n_modes;
    cfg.half_length = s.half_length;
    cfg.dt = dt;
    cfg.t_end = s.t_end;
    cfg.output_every = s.output_every;
    cfg.solver_tol = s.tol;
    cfg.max_iters = s.max_iters;
    cfg.dealias = s.dealias;
    cfg.rescaled_mode = s.rescaled;
    cfg.allow_delta_zero = allow_delta_zero;
    return cfg;
}

namespace detail {

/// Fan out n independent runs over `jobs` workers; per-index errors are
/// collected and merged in index order (deterministic reporting).
inline std::vector<std::string> parallel_for(std::size_t n, std::size_t jobs,
                                             const std::function<void(std::size_t)>& fn) {
    std::vector<std::string> errors(n);
    if (jobs <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            try {
                fn(i);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&]() {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) break;
                try {
                    fn(i);
                } catch (const std::exception& e) {
                    errors[i] = e.what();
                }
            }
        };
        std::vector<std::thread> pool;
        for (std::size_t j = 0; j < std::min(jobs, n); ++j) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) {
        if (!errors[i].empty()) out.push_back(errors[i]);
    }
    return out;
}

inline std::string tag(double v) {
    std::string s = fmt_sig(v, 12);
    for (char& c : s) {
        if (c == '.') c = 'p';
        if (c == '-') c = 'm';
        if (c == '+') c = ' ';
    }
    std::string out;
    for (char c : s) {
        if (c != ' ') out.push_back(c);
    }
    return out;
}

inline void write_text(const fs::path& path, const std::string& text) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    os << text;
}

/// Count strict interior minima of A on (0, tau*) from the sign changes of A'.
inline int interior_minima(const profile::ShotOutcome& shot) {
    int count = 0;
    double prev = 0.0;
    bool have_prev = false;
    for (const auto& s : shot.samples) {
        if (s.tau <= 0.0 || s.tau >= shot.tau2) continue;
        if (have_prev && prev < 0.0 && s.ap >= 0.0) ++count;
        prev = s.ap;
        have_prev = true;
    }
    return count;
}

inline bool odd_symmetry_holds(const profile::ProfileSolution& sol) {
    const std::size_t n = sol.grid.size();
    for (std::size_t i = 0; i < n / 2; ++i) {
        const std::size_t j = n - 1 - i;
        if (sol.grid[i] != -sol.grid[j]) return false;
        if (sol.a_values[i] != -sol.a_values[j]) return false;
    }
    return true;
}

struct MuStarArtifacts {
    profile::BisectResult bisect;
    profile::ProfileSolution solution;
    profile::LogFit fit;
};

inline MuStarArtifacts solve_mu_star(const ExperimentSpec& spec) {
    MuStarArtifacts a;
    a.bisect = profile::bisect_mu_star(spec.mu_lo, spec.mu_hi, spec.bisect_tol,
                                       shot_params_from(spec, 0.0));
    a.solution = profile::assemble_profile(a.bisect.mu_star, a.bisect.lo_shot, spec.crit_tol);
    a.fit = profile::fit_log_blowup(a.solution, spec.fit_sigma_lo, spec.fit_sigma_hi);
    return a;
}

inline std::string mu_star_report(const MuStarArtifacts& a) {
    std::ostringstream os;
    const auto& shot = a.bisect.lo_shot;
    os << "mu_star: " << fmt_sig(a.bisect.mu_star, 15) << "\n";
    os << "bracket_lo: " << fmt_sig(a.bisect.bracket_lo, 17) << "\n";
    os << "bracket_hi: " << fmt_sig(a.bisect.bracket_hi, 17) << "\n";
    os << "shots: " << a.bisect.shots << "\n";
    os << "tau_star: " << fmt_sig(a.solution.tau_star, 15) << "\n";
    os << "terminal_a: " << fmt_sig(shot.terminal_state.a, 6) << "\n";
    os << "terminal_ap: " << fmt_sig(shot.terminal_state.ap, 6) << "\n";
    os << "norm_a: " << fmt_sig(a.solution.norm_a, 15) << "\n";
    os << "norm_ap: " << fmt_sig(a.solution.norm_ap, 15) << "\n";
    os << "norm_app: " << fmt_sig(a.solution.norm_app, 15) << "\n";
    os << "odd_symmetry: " << (odd_symmetry_holds(a.solution) ? "pass" : "fail") << "\n";
    os << "interior_minima: " << interior_minima(shot) << "\n";
    os << "log_fit_slope: " << fmt_sig(a.fit.slope, 10) << "\n";
    os << "log_fit_intercept: " << fmt_sig(a.fit.intercept, 10) << "\n";
    os << "log_fit_r2: " << fmt_sig(a.fit.r2, 10) << "\n";
    os << "log_fit_points: " << a.fit.n_points << "\n";
    return os.str();
}

}  // namespace detail

inline CommandResult cmd_shoot(const ExperimentSpec& spec, const fs::path& out,
                               std::ostream& log) {
    CommandResult res;
    std::ostringstream report;
    for (double mu : spec.mus) {
        try {
            const auto shot = profile::shoot(shot_params_from(spec, mu));
            report << "mu: " << fmt_sig(mu, 12) << "\n";
            report << "classification: " << profile::to_string(shot.classification) << "\n";
            report << "tau1: " << (shot.has_tau1() ? fmt_sig(shot.tau1, 15) : "none") << "\n";
            report << "tau2: " << (shot.has_tau2() ? fmt_sig(shot.tau2, 15) : "none") << "\n";
            report << "terminal_a: " << fmt_sig(shot.terminal_state.a, 10) << "\n";
            report << "terminal_ap: " << fmt_sig(shot.terminal_state.ap, 10) << "\n";
            report << "samples: " << shot.samples.size() << "\n\n";

            std::ofstream cs(out / ("shot_mu" + detail::tag(mu) + ".csv"));
            cs << "tau,a,ap,app\n";
            for (const auto& s : shot.samples) {
                cs << fmt_sig(s.tau, 17) << ',' << fmt_sig(s.a, 17) << ',' << fmt_sig(s.ap, 17)
                   << ',' << fmt_sig(s.app, 17) << "\n";
            }
        } catch (const std::exception& e) {
            ++res.failures;
            res.errors.push_back("mu=" + fmt_sig(mu, 12) + ": " + e.what());
        }
    }
    detail::write_text(out / "report.txt", report.str());
    log << report.str();
    return res;
}

inline CommandResult cmd_mu_star(const ExperimentSpec& spec, const fs::path& out,
                                 std::ostream& log) {
    CommandResult res;
    try {
        const auto a = detail::solve_mu_star(spec);
        const std::string report = detail::mu_star_report(a);
        detail::write_text(out / "report.txt", report);
        profile::write_profile_csv((out / "profile.csv").string(), a.solution);
        log << report;
    } catch (const std::exception& e) {
        ++res.failures;
        res.errors.push_back(e.what());
    }
    return res;
}

inline CommandResult cmd_profile(const ExperimentSpec& spec, const fs::path& out,
                                 std::ostream& log) {
    if (spec.mus.empty()) return cmd_mu_star(spec, out, log);
    CommandResult res;
    try {
        const double mu = spec.mus.front();
        const auto shot = profile::shoot(shot_params_from(spec, mu));
        const auto sol = profile::assemble_profile(mu, shot, spec.crit_tol);
        const auto fit = profile::fit_log_blowup(sol, spec.fit_sigma_lo, spec.fit_sigma_hi);
        std::ostringstream os;
        os << "mu: " << fmt_sig(mu, 15) << "\n";
        os << "tau_star: " << fmt_sig(sol.tau_star, 15) << "\n";
        os << "norm_a: " << fmt_sig(sol.norm_a, 15) << "\n";
        os << "norm_ap: " << fmt_sig(sol.norm_ap, 15) << "\n";
        os << "norm_app: " << fmt_sig(sol.norm_app, 15) << "\n";
        os << "odd_symmetry: " << (detail::odd_symmetry_holds(sol) ? "pass" : "fail") << "\n";
        os << "log_fit_r2: " << fmt_sig(fit.r2, 10) << "\n";
        detail::write_text(out / "report.txt", os.str());
        profile::write_profile_csv((out / "profile.csv").string(), sol);
        log << os.str();
    } catch (const std::exception& e) {
        ++res.failures;
        res.errors.push_back(e.what());
    }
    return res;
}

inline CommandResult cmd_scaling_table(const ExperimentSpec& spec, const fs::path& out,
                                       std::ostream& log) {
    CommandResult res;
    try {
        const auto a = detail::solve_mu_star(spec);
        const auto rows = profile::ill_posedness_table(spec.eps_list, a.solution);
        std::ostringstream os;
        os << "# mu_star=" << fmt_sig(a.bisect.mu_star, 15)
           << " norm_a=" << fmt_sig(a.solution.norm_a, 15)
           << " norm_ap=" << fmt_sig(a.solution.norm_ap, 15)
           << " norm_app=" << fmt_sig(a.solution.norm_app, 15) << "\n";
        os << "eps,norm_t0,norm_t1,ratio\n";
        for (const auto& r : rows) {
            os << fmt_sig(r.eps, 12) << ',' << fmt_sig(r.norm_t0, 12) << ','
               << fmt_sig(r.norm_t1, 12) << ',' << fmt_sig(r.ratio, 12) << "\n";
        }
        detail::write_text(out / "scaling.csv", os.str());
        log << os.str();
    } catch (const std::exception& e) {
        ++res.failures;
        res.errors.push_back(e.what());
    }
    return res;
}

inline CommandResult cmd_sweep(const ExperimentSpec& spec, const fs::path& out,
                               std::size_t jobs, bool allow_delta_zero, std::ostream& log) {
    CommandResult res;
    const std::size_t n = spec.lambdas.size();
    std::vector<spectral::RunResult> results(n);
    std::vector<spectral::RunConfig> cfgs(n);
    for (std::size_t i = 0; i < n; ++i) {
        cfgs[i] = run_config_from(spec, spec.lambdas[i], spec.n_modes, spec.dt,
                                  allow_delta_zero);
    }
    res.errors = detail::parallel_for(n, jobs, [&](std::size_t i) {
        cfgs[i].validate();
        results[i] = spectral::run_simulation(cfgs[i]);
    });
    res.failures = static_cast<int>(res.errors.size());

    // per-lambda norm series + snapshots
    std::vector<bool> ok(n, true);
    {
        std::size_t ei = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (results[i].series.rows.empty()) {
                ok[i] = false;
                continue;
            }
            (void)ei;
            const std::string t = detail::tag(spec.lambdas[i]);
            write_norm_series_csv((out / ("norms_lambda" + t + ".csv")).string(), cfgs[i],
                                  results[i].series);
            for (const auto& snap : results[i].snapshots) {
                write_snapshot_csv(
                    (out / ("snapshot_lambda" + t + "_t" + detail::tag(snap.t) + ".csv"))
                        .string(),
                    cfgs[i], snap);
            }
        }
    }

    // Table-1-format mass table: rows t, one column per lambda
    std::ostringstream mt;
    mt << "t";
    for (std::size_t i = 0; i < n; ++i) {
        if (ok[i]) mt << ",lambda=" << fmt_sig(spec.lambdas[i], 12);
    }
    mt << "\n";
    std::size_t n_rows = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (ok[i]) n_rows = std::max(n_rows, results[i].series.rows.size());
    }
    for (std::size_t r = 0; r < n_rows; ++r) {
        bool first = true;
        for (std::size_t i = 0; i < n; ++i) {
            if (!ok[i]) continue;
            const auto& rows = results[i].series.rows;
            if (first) {
                mt << fmt_sig(r < rows.size() ? rows[r].t : 0.0, 6);
                first = false;
            }
            mt << ',' << (r < rows.size() ? fmt_sig(rows[r].mass, 12) : "");
        }
        mt << "\n";
    }
    detail::write_text(out / "mass_table.csv", mt.str());

    // norm growth summary: H2 seminorm at t_end vs lambda (squared value is
    // the quantity the reference tables report)
    std::ostringstream sm;
    sm << "lambda,l2_end,h1dot_end,h2dot_end,h2dot_sq_end,mass_drift_rel\n";
    for (std::size_t i = 0; i < n; ++i) {
        if (!ok[i]) continue;
        const auto& rows = results[i].series.rows;
        const auto& last = rows.back();
        double drift = 0.0;
        for (const auto& row : rows) {
            drift = std::max(drift, std::abs(row.mass - rows.front().mass));
        }
        const double rel = std::abs(rows.front().mass) > 0.0
                               ? drift / std::abs(rows.front().mass)
                               : drift;
        sm << fmt_sig(spec.lambdas[i], 12) << ',' << fmt_sig(last.l2, 12) << ','
           << fmt_sig(last.h1dot, 12) << ',' << fmt_sig(last.h2dot, 12) << ','
           << fmt_sig(last.h2dot * last.h2dot, 12) << ',' << fmt_sig(rel, 6) << "\n";
    }
    detail::write_text(out / "summary.csv", sm.str());
    log << sm.str();
    for (const auto& e : res.errors) log << "error: " << e << "\n";
    return res;
}

inline CommandResult cmd_converge(const ExperimentSpec& spec, const fs::path& out,
                                  std::size_t jobs, bool allow_delta_zero,
                                  std::ostream& log) {
    CommandResult res;
    if (spec.n_list.empty()) {
        throw ValidationError("n_modes", "list must be nonempty");
    }
    if (spec.dt_list.empty()) {
        throw ValidationError("dt", "list must be nonempty");
    }
    const double lambda = spec.lambdas.front();
    const std::size_t nn = spec.n_list.size(), nd = spec.dt_list.size();
    std::vector<double> h2sq(nn * nd, std::nan(""));

    res.errors = detail::parallel_for(nn * nd, jobs, [&](std::size_t idx) {
        const std::size_t i = idx / nd, j = idx % nd;
        spectral::RunConfig cfg = run_config_from(spec, lambda, spec.n_list[i],
                                                  spec.dt_list[j], allow_delta_zero);
        cfg.output_every = cfg.t_end;  // endpoint value only
        cfg.validate();
        const auto rr = spectral::run_simulation(cfg);
        const double h2 = rr.series.rows.back().h2dot;
        h2sq[idx] = h2 * h2;
    });
    res.failures = static_cast<int>(res.errors.size());

    std::ostringstream os;
    os << "# lambda=" << fmt_sig(lambda, 12) << " t_end=" << fmt_sig(spec.t_end, 12)
       << " h2dot_sq at t_end\n";
    os << "n_modes";
    for (double dt : spec.dt_list) os << ",dt=" << fmt_sig(dt, 12);
    for (std::size_t j = 0; j + 1 < nd; ++j) {
        os << ",richardson_dt" << fmt_sig(spec.dt_list[j], 6) << "_dt"
           << fmt_sig(spec.dt_list[j + 1], 6);
    }
    if (nd >= 3) os << ",observed_order";
    os << "\n";
    for (std::size_t i = 0; i < nn; ++i) {
        os << spec.n_list[i];
        for (std::size_t j = 0; j < nd; ++j) os << ',' << fmt_sig(h2sq[i * nd + j], 12);
        for (std::size_t j = 0; j + 1 < nd; ++j) {
            os << ','
               << fmt_sig(spectral::richardson(h2sq[i * nd + j], h2sq[i * nd + j + 1]), 12);
        }
        if (nd >= 3) {
            const double d1 = h2sq[i * nd + nd - 3] - h2sq[i * nd + nd - 2];
            const double d2 = h2sq[i * nd + nd - 2] - h2sq[i * nd + nd - 1];
            os << ',' << fmt_sig(std::log2(std::abs(d1 / d2)), 8);
        }
        os << "\n";
    }
    detail::write_text(out / "converge.csv", os.str());
    log << os.str();
    for (const auto& e : res.errors) log << "error: " << e << "\n";
    return res;
}

inline CommandResult cmd_compacton_check(const ExperimentSpec& spec, const fs::path& out,
                                         std::size_t jobs, bool allow_delta_zero,
                                         std::ostream& log) {
    (void)jobs;
    CommandResult res;
    try {
        if (spec.delta < 0.0) {
            throw ValidationError("delta",
                                  "compacton-check requires an explicit delta override");
        }
        const double lambda = spec.lambdas.front();
        spectral::RunConfig cfg =
            run_config_from(spec, lambda, spec.n_modes, spec.dt, allow_delta_zero);
        cfg.validate();
        spectral::Grid grid{cfg.n_modes, cfg.half_length};
        auto u0 = spectral::compacton_field(lambda, spec.center, grid);
        const auto rr = spectral::evolve(u0, cfg);

        std::ostringstream os;
        metadata_header(os, cfg);
        os << " center=" << fmt_sig(spec.center, 12) << "\n";
        os << "t,deviation_rel\n";
        double worst = 0.0;
        for (const auto& snap : rr.snapshots) {
            const auto uh = spectral::transform_backward(snap.field);
            const auto ex =
                spectral::compacton_translate_values(lambda, spec.center, snap.t, grid);
            double num = 0.0, den = 0.0;
            for (std::size_t i = 0; i < uh.size(); ++i) {
                num += (uh[i] - ex[i]) * (uh[i] - ex[i]);
                den += ex[i] * ex[i];
            }
            const double dev = std::sqrt(num / den);
            worst = std::max(worst, dev);
            os << fmt_sig(snap.t, 12) << ',' << fmt_sig(dev, 12) << "\n";
        }
        os << "# max_deviation_rel=" << fmt_sig(worst, 12) << "\n";
        detail::write_text(out / "compacton.csv", os.str());
        log << os.str();
    } catch (const std::exception& e) {
        ++res.failures;
        res.errors.push_back(e.what());
    }
    return res;
}

inline CommandResult cmd_diagnose(const ExperimentSpec& spec, const fs::path& out,
                                  std::ostream& log) {
    CommandResult res;
    std::vector<double> mus = spec.mus;
    std::ostringstream os;
    try {
        if (spec.include_mu_star) {
            const auto b = profile::bisect_mu_star(spec.mu_lo, spec.mu_hi, spec.bisect_tol,
                                                   shot_params_from(spec, 0.0));
            os << "mu_star: " << fmt_sig(b.mu_star, 15) << "\n\n";
            mus.push_back(b.mu_star);
        }
    } catch (const std::exception& e) {
        ++res.failures;
        res.errors.push_back(e.what());
    }
    for (double mu : mus) {
        try {
            const auto shot = profile::shoot(shot_params_from(spec, mu));
            os << "mu: " << fmt_sig(mu, 15) << "\n";
            os << "classification: " << profile::to_string(shot.classification) << "\n";
            if (shot.has_tau1() && shot.has_tau2()) {
                const auto ctx = diag::make_energy_context(shot);
                const auto rep = diag::energy_sandwich_check(shot, ctx);
                os << "tau1: " << fmt_sig(shot.tau1, 12) << "\n";
                os << "tau2: " << fmt_sig(shot.tau2, 12) << "\n";
                os << "tau_bar: " << fmt_sig(ctx.tau_bar, 12) << "\n";
                os << "sandwich_checked: " << rep.checked << "\n";
                os << "sandwich_upper_violations: " << rep.upper_violations << "\n";
                os << "sandwich_lower_applicable: " << (rep.lower_applicable ? "yes" : "no")
                   << "\n";
                if (rep.lower_applicable) {
                    os << "sandwich_lower_violations: " << rep.lower_violations << "\n";
                }
                os << "first_integral_residual: "
                   << fmt_sig(diag::first_integral_residual(shot), 6) << "\n";
            }
            const auto traj = diag::integrate_model(-1.0, -1.0, mu, 1.0,
                                                    shot_params_from(spec, mu).step_ctrl);
            const double e0 = diag::model_energy(traj.front(), mu);
            double drift = 0.0;
            for (const auto& s : traj) {
                drift = std::max(drift, std::abs(diag::model_energy(s, mu) - e0));
            }
            os << "model_energy_drift: " << fmt_sig(drift, 6) << "\n\n";
        } catch (const std::exception& e) {
            ++res.failures;
            res.errors.push_back("mu=" + fmt_sig(mu, 12) + ": " + e.what());
        }
    }
    detail::write_text(out / "report.txt", os.str());
    log << os.str();
    return res;
}

struct InvocationOptions {
    fs::path out_dir;
    std::size_t jobs = 1;
    bool allow_delta_zero = false;
};

/// Dispatch one command invocation: creates the output directory, copies the
/// resolved config, runs, and reports per-run failures.
inline CommandResult run_command(const ExperimentSpec& spec, const InvocationOptions& opt,
                                 std::ostream& log) {
    fs::create_directories(opt.out_dir);
    detail::write_text(opt.out_dir / "resolved.cfg", serialize_spec(spec));
    switch (spec.command) {
        case Command::Shoot: return cmd_shoot(spec, opt.out_dir, log);
        case Command::MuStar: return cmd_mu_star(spec, opt.out_dir, log);
        case Command::Profile: return cmd_profile(spec, opt.out_dir, log);
        case Command::ScalingTable: return cmd_scaling_table(spec, opt.out_dir, log);
        case Command::Sweep:
            return cmd_sweep(spec, opt.out_dir, opt.jobs, opt.allow_delta_zero, log);
        case Command::Converge:
            return cmd_converge(spec, opt.out_dir, opt.jobs, opt.allow_delta_zero, log);
        case Command::CompactonCheck:
            return cmd_compacton_check(spec, opt.out_dir, opt.jobs, opt.allow_delta_zero, log);
        case Command::Diagnose: return cmd_diagnose(spec, opt.out_dir, log);
    }
    throw ValidationError("command", "unhandled command");
}

}  // namespace ddlab::lab
