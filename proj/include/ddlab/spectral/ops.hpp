#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "ddlab/errors.hpp"
#include "ddlab/spectral/field.hpp"

namespace ddlab::spectral {

/// Multiply bin j by (i k_j)^order. Odd orders zero the Nyquist bin (its
/// conjugate pair cannot represent an odd derivative on a real grid).
inline SpectralField spectral_derivative(const SpectralField& f, int order) {
    if (order < 1 || order > 4) throw ValidationError("order", "must be 1..4");
    SpectralField out = f;
    const Grid& g = f.grid;
    const std::size_t nyq = g.n_modes / 2;
    for (std::size_t j = 0; j < out.coeffs.size(); ++j) {
        const double k = g.k(j);
        std::complex<double> m;
        switch (order) {
            case 1: m = {0.0, k}; break;
            case 2: m = {-k * k, 0.0}; break;
            case 3: m = {0.0, -k * k * k}; break;
            default: m = {k * k * k * k, 0.0}; break;
        }
        out.coeffs[j] *= m;
    }
    if (order % 2 == 1) out.coeffs[nyq] = 0.0;
    return out;
}

namespace detail {

/// Zero-padded pointwise product (3/2 rule, exact for quadratic terms).
/// Nyquist bins are dropped on the way in and zeroed on the way out; see the
/// band-limit convention in the field docs.
inline std::vector<std::complex<double>> dealias_product_coeffs(
    const Grid& g, const std::vector<std::complex<double>>& a,
    const std::vector<std::complex<double>>& b) {
    const std::size_t n = g.n_modes;
    const std::size_t m = 3 * n / 2;
    auto& plans = FftPlans::instance();

    auto padded_values = [&](const std::vector<std::complex<double>>& c) {
        std::vector<std::complex<double>> pad(m / 2 + 1, 0.0);
        for (std::size_t j = 0; j < n / 2; ++j) pad[j] = c[j];
        std::vector<double> vals(m);
        plans.backward_destructive(m, pad.data(), vals.data());
        return vals;
    };

    std::vector<double> va = padded_values(a);
    if (&a == &b) {
        for (double& v : va) v *= v;
    } else {
        const std::vector<double> vb = padded_values(b);
        for (std::size_t i = 0; i < m; ++i) va[i] *= vb[i];
    }
    std::vector<std::complex<double>> prod(m / 2 + 1);
    plans.forward(m, va.data(), prod.data());

    std::vector<std::complex<double>> out(n / 2 + 1);
    const double inv_m = 1.0 / static_cast<double>(m);
    for (std::size_t j = 0; j < n / 2; ++j) out[j] = prod[j] * inv_m;
    out[n / 2] = 0.0;
    return out;
}

}  // namespace detail

/// Alias-free pointwise product of two fields on the same grid.
inline SpectralField dealias_product(const SpectralField& a, const SpectralField& b) {
    if (!(a.grid == b.grid)) throw LengthMismatch("dealias_product: grid mismatch");
    SpectralField out(a.grid);
    out.coeffs = detail::dealias_product_coeffs(a.grid, a.coeffs, b.coeffs);
    return out;
}

/// Alias-free u^2 via 3/2 zero padding.
inline SpectralField dealias_square(const SpectralField& u) {
    SpectralField out(u.grid);
    out.coeffs = detail::dealias_product_coeffs(u.grid, u.coeffs, u.coeffs);
    return out;
}

/// Pointwise square without de-aliasing (for the dealias=off comparison mode).
inline SpectralField aliased_square(const SpectralField& u) {
    std::vector<double> v = transform_backward(u);
    for (double& x : v) x *= x;
    return transform_forward(u.grid, v);
}

/// F(u) = w1 * dx(u^2) + dx^3(u^2); w1 = lambda^{2/3} in rescaled mode, 1
/// otherwise. The combined odd-derivative multiplier zeroes the Nyquist bin.
inline SpectralField nonlinear_rhs(const SpectralField& u, double w1 = 1.0,
                                   bool dealias = true) {
    SpectralField sq = dealias ? dealias_square(u) : aliased_square(u);
    const Grid& g = u.grid;
    SpectralField out(g);
    for (std::size_t j = 0; j + 1 < sq.coeffs.size(); ++j) {
        const double k = g.k(j);
        const std::complex<double> mult{0.0, w1 * k - k * k * k};
        out.coeffs[j] = mult * sq.coeffs[j];
    }
    out.coeffs[g.n_modes / 2] = 0.0;
    return out;
}

}  // namespace ddlab::spectral
