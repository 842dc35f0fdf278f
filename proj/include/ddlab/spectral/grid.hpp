#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "ddlab/errors.hpp"

namespace ddlab::spectral {

/// Real periodic grid on [-half_length, half_length) with N collocation
/// points; wavenumber of integer index j is j * pi / half_length.
struct Grid {
    std::size_t n_modes = 8192;
    double half_length = 2.0 * std::numbers::pi;

    Grid() = default;
    Grid(std::size_t n, double hl = 2.0 * std::numbers::pi) : n_modes(n), half_length(hl) {
        if (n_modes < 8 || (n_modes & (n_modes - 1)) != 0) {
            throw ValidationError("n_modes", "must be a power of two >= 8");
        }
        if (!(half_length > 0.0)) throw ValidationError("half_length", "must be > 0");
    }

    double length() const { return 2.0 * half_length; }
    double dx() const { return length() / static_cast<double>(n_modes); }
    double x(std::size_t i) const { return -half_length + dx() * static_cast<double>(i); }
    /// wavenumber of non-negative bin j (r2c layout, j = 0 .. N/2)
    double k(std::size_t j) const {
        return static_cast<double>(j) * std::numbers::pi / half_length;
    }
    std::size_t n_bins() const { return n_modes / 2 + 1; }

    bool operator==(const Grid& o) const {
        return n_modes == o.n_modes && half_length == o.half_length;
    }
};

}  // namespace ddlab::spectral
