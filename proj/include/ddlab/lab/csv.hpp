#pragma once

#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "ddlab/errors.hpp"
#include "ddlab/format.hpp"
#include "ddlab/spectral/cn.hpp"

namespace ddlab::lab {

inline void metadata_header(std::ostream& os, const spectral::RunConfig& cfg) {
    os << "# lambda=" << fmt_sig(cfg.lambda, 12) << " delta=" << fmt_sig(cfg.effective_delta(), 12)
       << " n_modes=" << cfg.n_modes << " dt=" << fmt_sig(cfg.dt, 12);
}

/// Norm series CSV: metadata line, then t,l2,h1dot,h2dot,mass rows.
inline void write_norm_series_csv(std::ostream& os, const spectral::RunConfig& cfg,
                                  const spectral::NormSeries& series) {
    metadata_header(os, cfg);
    os << "\n";
    os << "t,l2,h1dot,h2dot,mass\n";
    for (const auto& r : series.rows) {
        os << fmt_sig(r.t, 15) << ',' << fmt_sig(r.l2, 15) << ',' << fmt_sig(r.h1dot, 15) << ','
           << fmt_sig(r.h2dot, 15) << ',' << fmt_sig(r.mass, 15) << "\n";
    }
}

inline void write_norm_series_csv(const std::string& path, const spectral::RunConfig& cfg,
                                  const spectral::NormSeries& series) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open " + path + " for writing");
    write_norm_series_csv(os, cfg, series);
}

inline spectral::NormSeries read_norm_series_csv(std::istream& is) {
    spectral::NormSeries series;
    std::string line;
    int lineno = 0;
    bool saw_header = false;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        if (!saw_header) {
            if (line != "t,l2,h1dot,h2dot,mass") {
                throw ParseError(lineno, 1, "missing t,l2,h1dot,h2dot,mass header");
            }
            saw_header = true;
            continue;
        }
        std::istringstream ls(line);
        spectral::NormRow r;
        char c;
        if (!(ls >> r.t >> c >> r.l2 >> c >> r.h1dot >> c >> r.h2dot >> c >> r.mass)) {
            throw ParseError(lineno, 1, "malformed norm row");
        }
        if (!series.rows.empty() && r.t <= series.rows.back().t) {
            throw ParseError(lineno, 1, "t must be strictly increasing");
        }
        series.rows.push_back(r);
    }
    if (!saw_header) throw ParseError(lineno, 1, "empty norm series");
    return series;
}

inline spectral::NormSeries read_norm_series_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open " + path);
    return read_norm_series_csv(is);
}

/// Snapshot CSV: x,u values with the run metadata and snapshot time.
inline void write_snapshot_csv(std::ostream& os, const spectral::RunConfig& cfg,
                               const spectral::Snapshot& snap) {
    metadata_header(os, cfg);
    os << " t=" << fmt_sig(snap.t, 12) << "\n";
    os << "x,u\n";
    const std::vector<double> values = spectral::transform_backward(snap.field);
    for (std::size_t i = 0; i < values.size(); ++i) {
        os << fmt_sig(snap.field.grid.x(i), 15) << ',' << fmt_sig(values[i], 15) << "\n";
    }
}

inline void write_snapshot_csv(const std::string& path, const spectral::RunConfig& cfg,
                               const spectral::Snapshot& snap) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open " + path + " for writing");
    write_snapshot_csv(os, cfg, snap);
}

}  // namespace ddlab::lab
