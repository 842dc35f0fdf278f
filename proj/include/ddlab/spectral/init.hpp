#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "ddlab/errors.hpp"
#include "ddlab/spectral/field.hpp"

namespace ddlab::spectral {

/// u(x,0) = lambda exp(-4 (x/lambda^{1/3})^2), the vanishing-data family.
inline SpectralField init_scaled_gaussian(double lambda, const Grid& grid) {
    if (!(lambda > 0.0)) throw ValidationError("lambda", "must be > 0");
    const double s = std::cbrt(lambda);
    std::vector<double> v(grid.n_modes);
    for (std::size_t i = 0; i < grid.n_modes; ++i) {
        const double y = grid.x(i) / s;
        v[i] = lambda * std::exp(-4.0 * y * y);
    }
    return transform_forward(grid, v);
}

/// Compacton Q_lambda(xi) = (4 lambda / 3) cos^2(xi/4) on [center-2pi,
/// center+2pi], zero outside. The support must fit the periodic domain.
inline SpectralField compacton_field(double lambda, double center, const Grid& grid) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    if (std::abs(center) + two_pi > grid.half_length + 1e-12) {
        throw SupportOverflow("compacton_field: support [center-2pi, center+2pi] wraps the domain");
    }
    std::vector<double> v(grid.n_modes, 0.0);
    for (std::size_t i = 0; i < grid.n_modes; ++i) {
        const double xi = grid.x(i) - center;
        if (xi >= -two_pi && xi <= two_pi) {
            const double c = std::cos(0.25 * xi);
            v[i] = (4.0 * lambda / 3.0) * c * c;
        }
    }
    return transform_forward(grid, v);
}

/// Exact compacton translate Q_lambda(x + lambda t) sampled on the grid.
inline std::vector<double> compacton_translate_values(double lambda, double center,
                                                      double t, const Grid& grid) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    std::vector<double> v(grid.n_modes, 0.0);
    const double L = grid.length();
    for (std::size_t i = 0; i < grid.n_modes; ++i) {
        double xi = grid.x(i) + lambda * t - center;
        xi = std::remainder(xi, L);
        if (xi >= -two_pi && xi <= two_pi) {
            const double c = std::cos(0.25 * xi);
            v[i] = (4.0 * lambda / 3.0) * c * c;
        }
    }
    return v;
}

}  // namespace ddlab::spectral
