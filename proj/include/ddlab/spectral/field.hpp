#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "ddlab/errors.hpp"
#include "ddlab/spectral/fft.hpp"
#include "ddlab/spectral/grid.hpp"

namespace ddlab::spectral {

/// Real periodic field held as the half spectrum of normalized Fourier
/// coefficients: u(x) = sum_j c_j e^{i k_j x}, bins j = 0 .. N/2. Hermitian
/// symmetry c_{-j} = conj(c_j) holds by construction of the storage.
struct SpectralField {
    Grid grid;
    std::vector<std::complex<double>> coeffs;  ///< size grid.n_bins()

    SpectralField() = default;
    explicit SpectralField(const Grid& g) : grid(g), coeffs(g.n_bins()) {}

    /// signed-index coefficient (j may be negative)
    std::complex<double> coeff(long j) const {
        const std::size_t a = static_cast<std::size_t>(j < 0 ? -j : j);
        if (j >= 0) return coeffs[a];
        return std::conj(coeffs[a]);
    }
};

inline SpectralField transform_forward(const Grid& g, const std::vector<double>& values) {
    if (values.size() != g.n_modes) {
        throw LengthMismatch("transform_forward: expected " + std::to_string(g.n_modes) +
                             " values, got " + std::to_string(values.size()));
    }
    SpectralField f(g);
    FftPlans::instance().forward(g.n_modes, values.data(), f.coeffs.data());
    const double inv_n = 1.0 / static_cast<double>(g.n_modes);
    for (auto& c : f.coeffs) c *= inv_n;
    return f;
}

inline std::vector<double> transform_backward(const SpectralField& f) {
    if (f.coeffs.size() != f.grid.n_bins()) {
        throw LengthMismatch("transform_backward: coefficient count does not match grid");
    }
    std::vector<std::complex<double>> scratch(f.coeffs);
    std::vector<double> out(f.grid.n_modes);
    FftPlans::instance().backward_destructive(f.grid.n_modes, scratch.data(), out.data());
    return out;
}

/// Doubling weights for sums over the full spectrum expressed on the half
/// spectrum: interior bins carry their conjugate partner.
inline double bin_weight(const Grid& g, std::size_t j) {
    return (j == 0 || j == g.n_modes / 2) ? 1.0 : 2.0;
}

struct Norms {
    double l2 = 0.0;
    double h1dot = 0.0;
    double h2dot = 0.0;
};

/// Parseval-normalized norms: l2^2 equals the grid quadrature of |u|^2, the
/// homogeneous seminorms weight |c_j|^2 by k^2 and k^4.
inline Norms norms(const SpectralField& f) {
    const Grid& g = f.grid;
    double s0 = 0.0, s1 = 0.0, s2 = 0.0;
    for (std::size_t j = 0; j < f.coeffs.size(); ++j) {
        const double w = bin_weight(g, j) * std::norm(f.coeffs[j]);
        const double k2 = g.k(j) * g.k(j);
        s0 += w;
        s1 += k2 * w;
        s2 += k2 * k2 * w;
    }
    const double L = g.length();
    return {std::sqrt(L * s0), std::sqrt(L * s1), std::sqrt(L * s2)};
}

/// Conserved quantity \int u dx = L * c_0.
inline double mass(const SpectralField& f) { return f.grid.length() * f.coeffs[0].real(); }

inline double l2_norm(const SpectralField& f) { return norms(f).l2; }

/// L2 norm of the coefficient-space residual vector (same normalization).
inline double l2_of_coeffs(const Grid& g, const std::vector<std::complex<double>>& c) {
    double s = 0.0;
    for (std::size_t j = 0; j < c.size(); ++j) s += bin_weight(g, j) * std::norm(c[j]);
    return std::sqrt(g.length() * s);
}

}  // namespace ddlab::spectral
