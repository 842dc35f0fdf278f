#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ddlab/errors.hpp"
#include "ddlab/format.hpp"

namespace ddlab::lab {

enum class Command {
    Shoot,
    MuStar,
    Profile,
    ScalingTable,
    Sweep,
    Converge,
    CompactonCheck,
    Diagnose,
};

inline const char* to_string(Command c) {
    switch (c) {
        case Command::Shoot: return "shoot";
        case Command::MuStar: return "mu-star";
        case Command::Profile: return "profile";
        case Command::ScalingTable: return "scaling-table";
        case Command::Sweep: return "sweep";
        case Command::Converge: return "converge";
        case Command::CompactonCheck: return "compacton-check";
        case Command::Diagnose: return "diagnose";
    }
    return "?";
}

inline Command command_from_string(const std::string& s) {
    if (s == "shoot") return Command::Shoot;
    if (s == "mu-star") return Command::MuStar;
    if (s == "profile") return Command::Profile;
    if (s == "scaling-table") return Command::ScalingTable;
    if (s == "sweep") return Command::Sweep;
    if (s == "converge") return Command::Converge;
    if (s == "compacton-check") return Command::CompactonCheck;
    if (s == "diagnose") return Command::Diagnose;
    throw ValidationError("command", "unknown command '" + s + "'");
}

/// Fully validated run parameterization. Defaults are the paper-reported
/// settings: N=8192 modes, dt=.001, nonlinear tolerance 1e-8, domain
/// [-2pi, 2pi).
struct ExperimentSpec {
    Command command = Command::Sweep;

    // spectral run parameters
    std::vector<double> lambdas;          // per-command default
    std::vector<std::size_t> n_list;      // converge
    std::vector<double> dt_list;          // converge
    std::size_t n_modes = 8192;
    double dt = 1e-3;
    double t_end = 0.1;
    double output_every = 0.02;
    double tol = 1e-8;
    double delta = -1.0;  // unset: .1 lambda^4
    std::size_t max_iters = 50;
    bool dealias = true;
    bool rescaled = false;
    bool allow_delta_zero = false;
    double half_length = 2.0 * std::numbers::pi;
    double center = 0.0;

    // shooting parameters
    std::vector<double> mus;
    double mu_lo = 0.0;
    double mu_hi = 5.0;
    double bisect_tol = 1e-8;
    double taylor_eps = 1e-4;
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    double max_step = 3e-4;
    double max_tau = 50.0;
    double crit_tol = 1e-6;
    double fit_sigma_lo = 1e-3;
    double fit_sigma_hi = 1e-2;
    bool include_mu_star = true;  // diagnose
    std::vector<double> eps_list{0.5, 0.2, 0.1};
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

inline double parse_double(const std::string& key, const std::string& v) {
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0') {
        throw ValidationError(key, "'" + v + "' is not a number");
    }
    return x;
}

inline std::size_t parse_size(const std::string& key, const std::string& v) {
    const double x = parse_double(key, v);
    if (!(x >= 0.0) || x != std::floor(x)) {
        throw ValidationError(key, "'" + v + "' is not a non-negative integer");
    }
    return static_cast<std::size_t>(x);
}

inline bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "on" || v == "true" || v == "1") return true;
    if (v == "off" || v == "false" || v == "0") return false;
    throw ValidationError(key, "'" + v + "' is not on/off");
}

inline std::vector<double> parse_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::istringstream ss(v);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = trim(tok);
        if (tok.empty()) throw ValidationError(key, "empty list element");
        out.push_back(parse_double(key, tok));
    }
    if (out.empty()) throw ValidationError(key, "empty list");
    return out;
}

}  // namespace detail

/// Line-oriented `key = value` text -> key/value map. `#` starts a comment.
inline std::map<std::string, std::string> parse_key_values(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const std::string t = detail::trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw ParseError(lineno, 1, "expected 'key = value'");
        }
        const std::string key = detail::trim(t.substr(0, eq));
        const std::string val = detail::trim(t.substr(eq + 1));
        if (key.empty()) throw ParseError(lineno, 1, "empty key");
        if (val.empty()) {
            throw ParseError(lineno, static_cast<int>(eq + 2), "empty value for '" + key + "'");
        }
        if (kv.count(key)) throw ParseError(lineno, 1, "duplicate key '" + key + "'");
        kv[key] = val;
    }
    return kv;
}

/// Parse and validate a config for one command; unknown keys are rejected and
/// every numeric key is range-checked. An empty text yields the defaults.
inline ExperimentSpec parse_config(const std::string& text, Command command) {
    using namespace detail;
    ExperimentSpec spec;
    spec.command = command;

    // per-command default lambda sets (Table 1 column set for sweep)
    switch (command) {
        case Command::Sweep: spec.lambdas = {1.0, 0.4, 0.2, 0.1, 0.05}; break;
        case Command::Converge:
            spec.lambdas = {0.2};
            spec.n_list = {512, 1024, 2048, 4096, 8192};
            spec.dt_list = {0.004, 0.002, 0.001};
            break;
        case Command::CompactonCheck:
            spec.lambdas = {0.5};
            spec.dt = 1e-4;
            spec.n_modes = 2048;
            break;
        case Command::Shoot: spec.mus = {0.0}; break;
        case Command::Diagnose: spec.mus = {0.0, 0.1, 1.0, 5.0}; break;
        default: break;
    }

    static const std::set<std::string> shot_keys = {"taylor_eps", "abs_tol", "rel_tol",
                                                    "max_step", "max_tau"};
    static const std::set<std::string> bisect_keys = {"mu_lo", "mu_hi", "bisect_tol",
                                                      "crit_tol", "fit_sigma_lo",
                                                      "fit_sigma_hi"};
    static const std::set<std::string> run_keys = {
        "n_modes", "dt", "t_end", "output_every", "tol", "delta",
        "max_iters", "dealias", "rescaled", "half_length"};

    std::set<std::string> allowed;
    switch (command) {
        case Command::Shoot:
            allowed = shot_keys;
            allowed.insert("mu");
            break;
        case Command::MuStar:
        case Command::Profile:
            allowed = shot_keys;
            allowed.insert(bisect_keys.begin(), bisect_keys.end());
            if (command == Command::Profile) allowed.insert("mu");
            break;
        case Command::ScalingTable:
            allowed = shot_keys;
            allowed.insert(bisect_keys.begin(), bisect_keys.end());
            allowed.insert("eps");
            break;
        case Command::Sweep:
            allowed = run_keys;
            allowed.insert("lambda");
            break;
        case Command::Converge:
            allowed = run_keys;
            allowed.insert("lambda");
            break;
        case Command::CompactonCheck:
            allowed = run_keys;
            allowed.insert({"lambda", "center"});
            break;
        case Command::Diagnose:
            allowed = shot_keys;
            allowed.insert(bisect_keys.begin(), bisect_keys.end());
            allowed.insert({"mu", "include_mu_star"});
            break;
    }

    const auto kv = parse_key_values(text);
    for (const auto& [key, val] : kv) {
        if (!allowed.count(key)) {
            throw ValidationError(key, "unknown key for command '" +
                                           std::string(to_string(command)) + "'");
        }
        if (key == "lambda") {
            spec.lambdas = parse_list(key, val);
            for (double l : spec.lambdas) {
                if (!(l > 0.0)) throw ValidationError(key, "entries must be > 0");
            }
        } else if (key == "mu") {
            spec.mus = parse_list(key, val);
            for (double m : spec.mus) {
                if (m < 0.0) throw ValidationError(key, "entries must be >= 0");
            }
        } else if (key == "eps") {
            spec.eps_list = parse_list(key, val);
            for (double e : spec.eps_list) {
                if (!(e > 0.0 && e < 1.0)) throw ValidationError(key, "entries must be in (0,1)");
            }
        } else if (key == "n_modes") {
            const auto lst = parse_list(key, val);
            spec.n_list.clear();
            for (double n : lst) {
                if (!(n >= 8.0) || n != std::floor(n)) {
                    throw ValidationError(key, "entries must be integers >= 8");
                }
                spec.n_list.push_back(static_cast<std::size_t>(n));
            }
            spec.n_modes = spec.n_list.front();
            if (command != Command::Converge && spec.n_list.size() != 1) {
                throw ValidationError(key, "a single value is required for this command");
            }
        } else if (key == "dt") {
            const auto lst = parse_list(key, val);
            for (double d : lst) {
                if (!(d > 0.0)) throw ValidationError(key, "must be > 0");
            }
            spec.dt_list = lst;
            spec.dt = lst.front();
            if (command != Command::Converge && lst.size() != 1) {
                throw ValidationError(key, "a single value is required for this command");
            }
        } else if (key == "t_end") {
            spec.t_end = parse_double(key, val);
            if (!(spec.t_end > 0.0)) throw ValidationError(key, "must be > 0");
        } else if (key == "output_every") {
            spec.output_every = parse_double(key, val);
            if (!(spec.output_every > 0.0)) throw ValidationError(key, "must be > 0");
        } else if (key == "tol") {
            spec.tol = parse_double(key, val);
            if (!(spec.tol > 0.0)) throw ValidationError(key, "must be > 0");
        } else if (key == "delta") {
            spec.delta = parse_double(key, val);
            if (spec.delta < 0.0) throw ValidationError(key, "must be >= 0");
        } else if (key == "max_iters") {
            spec.max_iters = parse_size(key, val);
            if (spec.max_iters == 0) throw ValidationError(key, "must be >= 1");
        } else if (key == "dealias") {
            spec.dealias = parse_bool(key, val);
        } else if (key == "rescaled") {
            spec.rescaled = parse_bool(key, val);
        } else if (key == "half_length") {
            spec.half_length = parse_double(key, val);
            if (!(spec.half_length > 0.0)) throw ValidationError(key, "must be > 0");
        } else if (key == "center") {
            spec.center = parse_double(key, val);
        } else if (key == "mu_lo") {
            spec.mu_lo = parse_double(key, val);
            if (spec.mu_lo < 0.0) throw ValidationError(key, "must be >= 0");
        } else if (key == "mu_hi") {
            spec.mu_hi = parse_double(key, val);
            if (!(spec.mu_hi > 0.0)) throw ValidationError(key, "must be > 0");
        } else if (key == "bisect_tol") {
            spec.bisect_tol = parse_double(key, val);
            if (!(spec.bisect_tol > 0.0)) throw ValidationError(key, "must be > 0");
        } else if (key == "taylor_eps") {
            spec.taylor_eps = parse_double(key, val);
            if (!(spec.taylor_eps > 0.0 && spec.taylor_eps <= 1e-3)) {
                throw ValidationError(key, "must be in (0, 1e-3]");
            }
        } else if (key == "abs_tol") {
            spec.abs_tol = parse_double(key, val);
            if (!(spec.abs_tol > 0.0)) throw ValidationError(key, "must be > 0");
        } else if (key == "rel_tol") {
            spec.rel_tol = parse_double(key, val);
            if (!(spec.rel_tol > 0.0)) throw ValidationError(key, "must be > 0");
        } else if (key == "max_step") {
            spec.max_step = parse_double(key, val);
            if (!(spec.max_step > 0.0)) throw ValidationError(key, "must be > 0");
        } else if (key == "max_tau") {
            spec.max_tau = parse_double(key, val);
            if (!(spec.max_tau > 0.0)) throw ValidationError(key, "must be > 0");
        } else if (key == "crit_tol") {
            spec.crit_tol = parse_double(key, val);
            if (!(spec.crit_tol > 0.0)) throw ValidationError(key, "must be > 0");
        } else if (key == "fit_sigma_lo") {
            spec.fit_sigma_lo = parse_double(key, val);
            if (!(spec.fit_sigma_lo > 0.0)) throw ValidationError(key, "must be > 0");
        } else if (key == "fit_sigma_hi") {
            spec.fit_sigma_hi = parse_double(key, val);
            if (!(spec.fit_sigma_hi > spec.fit_sigma_lo)) {
                throw ValidationError(key, "must exceed fit_sigma_lo");
            }
        } else if (key == "include_mu_star") {
            spec.include_mu_star = parse_bool(key, val);
        }
    }

    if (spec.lambdas.empty() &&
        (command == Command::Sweep || command == Command::Converge ||
         command == Command::CompactonCheck)) {
        throw ValidationError("lambda", "list must be nonempty");
    }
    if (!(spec.mu_lo < spec.mu_hi) &&
        (command == Command::MuStar || command == Command::Profile ||
         command == Command::ScalingTable || command == Command::Diagnose)) {
        throw ValidationError("mu_lo", "must be < mu_hi");
    }
    return spec;
}

/// Canonical serialization of the resolved spec (for the run directory copy;
/// reparses to the same spec).
inline std::string serialize_spec(const ExperimentSpec& s) {
    std::ostringstream os;
    auto list = [](const auto& v) {
        std::string out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) out += ",";
            out += fmt_sig(static_cast<double>(v[i]), 17);
        }
        return out;
    };
    os << "# resolved config for command " << to_string(s.command) << "\n";
    switch (s.command) {
        case Command::Shoot:
        case Command::Diagnose:
            os << "mu = " << list(s.mus) << "\n";
            if (s.command == Command::Diagnose) {
                os << "include_mu_star = " << (s.include_mu_star ? "on" : "off") << "\n";
            }
            break;
        case Command::Profile:
            if (!s.mus.empty()) os << "mu = " << list(s.mus) << "\n";
            break;
        default: break;
    }
    if (s.command == Command::Sweep || s.command == Command::Converge ||
        s.command == Command::CompactonCheck) {
        os << "lambda = " << list(s.lambdas) << "\n";
        os << "n_modes = " << (s.command == Command::Converge ? list(s.n_list)
                                                              : fmt_sig((double)s.n_modes, 17))
           << "\n";
        os << "dt = " << (s.command == Command::Converge ? list(s.dt_list) : fmt_sig(s.dt, 17))
           << "\n";
        os << "t_end = " << fmt_sig(s.t_end, 17) << "\n";
        os << "output_every = " << fmt_sig(s.output_every, 17) << "\n";
        os << "tol = " << fmt_sig(s.tol, 17) << "\n";
        if (s.delta >= 0.0) os << "delta = " << fmt_sig(s.delta, 17) << "\n";
        os << "max_iters = " << s.max_iters << "\n";
        os << "dealias = " << (s.dealias ? "on" : "off") << "\n";
        os << "rescaled = " << (s.rescaled ? "on" : "off") << "\n";
        os << "half_length = " << fmt_sig(s.half_length, 17) << "\n";
        if (s.command == Command::CompactonCheck) {
            os << "center = " << fmt_sig(s.center, 17) << "\n";
        }
    } else {
        if (s.command != Command::Shoot) {
            os << "mu_lo = " << fmt_sig(s.mu_lo, 17) << "\n";
            os << "mu_hi = " << fmt_sig(s.mu_hi, 17) << "\n";
            os << "bisect_tol = " << fmt_sig(s.bisect_tol, 17) << "\n";
            os << "crit_tol = " << fmt_sig(s.crit_tol, 17) << "\n";
            os << "fit_sigma_lo = " << fmt_sig(s.fit_sigma_lo, 17) << "\n";
            os << "fit_sigma_hi = " << fmt_sig(s.fit_sigma_hi, 17) << "\n";
        }
        if (s.command == Command::ScalingTable) os << "eps = " << list(s.eps_list) << "\n";
        os << "taylor_eps = " << fmt_sig(s.taylor_eps, 17) << "\n";
        os << "abs_tol = " << fmt_sig(s.abs_tol, 17) << "\n";
        os << "rel_tol = " << fmt_sig(s.rel_tol, 17) << "\n";
        os << "max_step = " << fmt_sig(s.max_step, 17) << "\n";
        os << "max_tau = " << fmt_sig(s.max_tau, 17) << "\n";
    }
    return os.str();
}

}  // namespace ddlab::lab
