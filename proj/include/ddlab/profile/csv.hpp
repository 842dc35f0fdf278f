#pragma once

#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "ddlab/errors.hpp"
#include "ddlab/format.hpp"
#include "ddlab/profile/types.hpp"

namespace ddlab::profile {

/// ProfileSolution CSV: one metadata header line, then tau,a,ap,app rows at
/// 17 significant digits (round-trippable doubles).
inline void write_profile_csv(std::ostream& os, const ProfileSolution& sol) {
    os << "# mu_star=" << fmt_sig(sol.mu_star, 17) << " tau_star=" << fmt_sig(sol.tau_star, 17)
       << " norm_a=" << fmt_sig(sol.norm_a, 17) << " norm_ap=" << fmt_sig(sol.norm_ap, 17)
       << " norm_app=" << fmt_sig(sol.norm_app, 17) << "\n";
    os << "tau,a,ap,app\n";
    for (std::size_t i = 0; i < sol.grid.size(); ++i) {
        os << fmt_sig(sol.grid[i], 17) << ',' << fmt_sig(sol.a_values[i], 17) << ','
           << fmt_sig(sol.ap_values[i], 17) << ',' << fmt_sig(sol.app_values[i], 17) << "\n";
    }
}

inline void write_profile_csv(const std::string& path, const ProfileSolution& sol) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open " + path + " for writing");
    write_profile_csv(os, sol);
}

/// Reparse a profile CSV (round-trip check and downstream consumers).
inline ProfileSolution read_profile_csv(std::istream& is) {
    ProfileSolution sol;
    std::string line;
    if (!std::getline(is, line) || line.rfind("# mu_star=", 0) != 0) {
        throw ParseError(1, 1, "missing profile metadata header");
    }
    std::istringstream hs(line.substr(1));
    std::string tok;
    while (hs >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = tok.substr(0, eq);
        const double val = std::stod(tok.substr(eq + 1));
        if (key == "mu_star") sol.mu_star = val;
        else if (key == "tau_star") sol.tau_star = val;
        else if (key == "norm_a") sol.norm_a = val;
        else if (key == "norm_ap") sol.norm_ap = val;
        else if (key == "norm_app") sol.norm_app = val;
    }
    if (!std::getline(is, line) || line != "tau,a,ap,app") {
        throw ParseError(2, 1, "missing tau,a,ap,app column header");
    }
    int lineno = 2;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        double v[4];
        char comma;
        if (!(ls >> v[0] >> comma >> v[1] >> comma >> v[2] >> comma >> v[3])) {
            throw ParseError(lineno, 1, "malformed row");
        }
        sol.grid.push_back(v[0]);
        sol.a_values.push_back(v[1]);
        sol.ap_values.push_back(v[2]);
        sol.app_values.push_back(v[3]);
    }
    return sol;
}

inline ProfileSolution read_profile_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open " + path);
    return read_profile_csv(is);
}

}  // namespace ddlab::profile
