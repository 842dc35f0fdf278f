#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <vector>

#include "ddlab/errors.hpp"
#include "ddlab/spectral/field.hpp"
#include "ddlab/spectral/init.hpp"
#include "ddlab/spectral/ops.hpp"

namespace ddlab::spectral {

struct RunConfig {
    double lambda = 1.0;
    double delta = -1.0;  ///< < 0 selects the default .1 lambda^4 coupling
    std::size_t n_modes = 8192;
    double half_length = 2.0 * std::numbers::pi;
    double dt = 1e-3;
    double t_end = 0.1;
    double output_every = 0.02;
    double solver_tol = 1e-8;
    std::size_t max_iters = 50;
    bool dealias = true;
    bool rescaled_mode = false;     ///< solve the lambda^{2/3}-weighted form
    bool allow_delta_zero = false;  ///< unregularized runs need the explicit override

    double effective_delta() const {
        if (delta >= 0.0) return delta;
        return rescaled_mode ? 0.1 * std::pow(lambda, 8.0 / 3.0)
                             : 0.1 * lambda * lambda * lambda * lambda;
    }
    double first_derivative_weight() const {
        return rescaled_mode ? std::pow(lambda, 2.0 / 3.0) : 1.0;
    }

    void validate() const {
        if (!(lambda > 0.0)) throw ValidationError("lambda", "must be > 0");
        if (!(dt > 0.0)) throw ValidationError("dt", "must be > 0");
        if (!(t_end > 0.0)) throw ValidationError("t_end", "must be > 0");
        if (!(solver_tol > 0.0)) throw ValidationError("solver_tol", "must be > 0");
        if (max_iters == 0) throw ValidationError("max_iters", "must be >= 1");
        const double steps = t_end / dt;
        if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps)) {
            throw ValidationError("t_end", "must be an integer multiple of dt");
        }
        if (output_every > 0.0) {
            const double stride = output_every / dt;
            if (std::abs(stride - std::round(stride)) > 1e-9 * std::max(1.0, stride)) {
                throw ValidationError("output_every", "must be an integer multiple of dt");
            }
        }
        const double d = effective_delta();
        if (d < 0.0) throw ValidationError("delta", "must be >= 0");
        if (d == 0.0 && !allow_delta_zero) {
            throw ValidationError(
                "delta", "delta = 0 is the ill-posed limit; pass the explicit override to run it");
        }
        Grid{n_modes, half_length};  // validates n_modes/half_length
    }

    std::size_t n_steps() const { return static_cast<std::size_t>(std::llround(t_end / dt)); }
    std::size_t output_stride() const {
        return output_every > 0.0 ? static_cast<std::size_t>(std::llround(output_every / dt))
                                  : n_steps();
    }
};

struct StepStats {
    std::size_t fixed_point_iters = 0;
    std::size_t newton_iters = 0;
    std::size_t gmres_iters = 0;
    double residual = 0.0;
};

/// One Crank-Nicolson step of (I + delta dx^4) u_t = F(u):
///   (I + delta dx^4)(u+ - u) = (dt/2) (F(u+) + F(u)).
/// Preconditioned fixed-point iteration first; if it stalls, Newton with a
/// GMRES inner solve on the exact directional Jacobian (the nonlinearity is
/// quadratic, so dF(v)w = 2 dk dealias(v w) is exact).
class CnStepper {
  public:
    using Coeffs = std::vector<std::complex<double>>;

    CnStepper(const Grid& grid, const RunConfig& cfg)
        : grid_(grid),
          dt_(cfg.dt),
          tol_(cfg.solver_tol),
          max_iters_(cfg.max_iters),
          dealias_(cfg.dealias),
          w1_(cfg.first_derivative_weight()) {
        const double delta = cfg.effective_delta();
        const std::size_t nb = grid.n_bins();
        precond_.resize(nb);
        inv_precond_.resize(nb);
        deriv_.resize(nb);
        for (std::size_t j = 0; j < nb; ++j) {
            const double k = grid.k(j);
            const double k4 = k * k * k * k;
            inv_precond_[j] = 1.0 + delta * k4;
            precond_[j] = 1.0 / inv_precond_[j];
            deriv_[j] = {0.0, w1_ * k - k * k * k};
        }
        deriv_[nb - 1] = 0.0;  // odd-order derivative: Nyquist zeroed
    }

    SpectralField step(const SpectralField& u, std::size_t step_index,
                       StepStats* stats = nullptr) const {
        const std::size_t nb = grid_.n_bins();
        const Coeffs& c = u.coeffs;
        Coeffs fc = rhs(c);

        // explicit predictor: one preconditioned Euler stage
        Coeffs v(nb);
        for (std::size_t j = 0; j < nb; ++j) v[j] = c[j] + dt_ * precond_[j] * fc[j];

        StepStats st;
        Coeffs best = v;
        double best_rn = std::numeric_limits<double>::infinity();
        double rn_prev = std::numeric_limits<double>::infinity();
        std::size_t outer = 0;

        // preconditioned fixed point
        const std::size_t max_fp = std::min<std::size_t>(max_iters_, 12);
        while (st.fixed_point_iters < max_fp) {
            Coeffs fv = rhs(v);
            const double rn = residual_norm(v, c, fv, fc);
            st.residual = rn;
            if (rn < best_rn) {
                best = v;
                best_rn = rn;
            }
            if (rn <= tol_) {
                finish(stats, st);
                return make_field(std::move(v));
            }
            if (rn > 0.7 * rn_prev) break;  // stalled or diverging
            rn_prev = rn;
            for (std::size_t j = 0; j < nb; ++j) {
                v[j] = c[j] + 0.5 * dt_ * precond_[j] * (fv[j] + fc[j]);
            }
            ++st.fixed_point_iters;
            ++outer;
        }

        // Newton with preconditioned GMRES
        v = best;
        while (outer < max_iters_) {
            Coeffs fv = rhs(v);
            Coeffs r = residual_vec(v, c, fv, fc);
            const double rn = l2_of_coeffs(grid_, r);
            st.residual = rn;
            if (rn <= tol_) {
                finish(stats, st);
                return make_field(std::move(v));
            }
            Coeffs rhs_vec(nb);
            for (std::size_t j = 0; j < nb; ++j) rhs_vec[j] = -precond_[j] * r[j];
            const std::vector<double> v_padded = padded_values(v);
            Coeffs dx = gmres(v_padded, rhs_vec, 1e-4, 250, st.gmres_iters);
            for (std::size_t j = 0; j < nb; ++j) v[j] += dx[j];
            ++st.newton_iters;
            ++outer;
        }
        throw NoConvergence(step_index, st.residual);
    }

  private:
    SpectralField make_field(Coeffs&& c) const {
        SpectralField f(grid_);
        f.coeffs = std::move(c);
        return f;
    }

    Coeffs rhs(const Coeffs& c) const {
        Coeffs sq;
        if (dealias_) {
            sq = detail::dealias_product_coeffs(grid_, c, c);
        } else {
            SpectralField f(grid_);
            f.coeffs = c;
            sq = aliased_square(f).coeffs;
        }
        for (std::size_t j = 0; j < sq.size(); ++j) sq[j] *= deriv_[j];
        return sq;
    }

    Coeffs residual_vec(const Coeffs& v, const Coeffs& c, const Coeffs& fv,
                        const Coeffs& fc) const {
        Coeffs r(v.size());
        for (std::size_t j = 0; j < v.size(); ++j) {
            r[j] = inv_precond_[j] * (v[j] - c[j]) - 0.5 * dt_ * (fv[j] + fc[j]);
        }
        return r;
    }

    double residual_norm(const Coeffs& v, const Coeffs& c, const Coeffs& fv,
                         const Coeffs& fc) const {
        return l2_of_coeffs(grid_, residual_vec(v, c, fv, fc));
    }

    /// physical values of v on the 3N/2 padded grid (cached per Newton iterate)
    std::vector<double> padded_values(const Coeffs& v) const {
        const std::size_t n = grid_.n_modes;
        const std::size_t m = 3 * n / 2;
        std::vector<std::complex<double>> pad(m / 2 + 1, 0.0);
        for (std::size_t j = 0; j < n / 2; ++j) pad[j] = v[j];
        std::vector<double> vals(m);
        FftPlans::instance().backward_destructive(m, pad.data(), vals.data());
        return vals;
    }

    /// preconditioned Jacobian action: w - dt P dk dealias(v w)
    Coeffs apply_pjac(const std::vector<double>& v_padded, const Coeffs& w) const {
        const std::size_t n = grid_.n_modes;
        const std::size_t m = 3 * n / 2;
        std::vector<std::complex<double>> pad(m / 2 + 1, 0.0);
        for (std::size_t j = 0; j < n / 2; ++j) pad[j] = w[j];
        std::vector<double> wv(m);
        auto& plans = FftPlans::instance();
        plans.backward_destructive(m, pad.data(), wv.data());
        for (std::size_t i = 0; i < m; ++i) wv[i] *= v_padded[i];
        std::vector<std::complex<double>> prod(m / 2 + 1);
        plans.forward(m, wv.data(), prod.data());

        Coeffs out(w.size());
        const double inv_m = 1.0 / static_cast<double>(m);
        for (std::size_t j = 0; j + 1 < w.size(); ++j) {
            out[j] = w[j] - dt_ * precond_[j] * deriv_[j] * (prod[j] * inv_m);
        }
        out[w.size() - 1] = w[w.size() - 1];
        return out;
    }

    double dot(const Coeffs& a, const Coeffs& b) const {
        double s = 0.0;
        for (std::size_t j = 0; j < a.size(); ++j) {
            s += bin_weight(grid_, j) * (std::conj(a[j]) * b[j]).real();
        }
        return s;
    }

    /// Full GMRES on the preconditioned Jacobian, x0 = 0.
    Coeffs gmres(const std::vector<double>& v_padded, const Coeffs& b, double rel_tol,
                 std::size_t max_m, std::size_t& iter_count) const {
        const std::size_t nb = b.size();
        const std::size_t m_cap = std::min(max_m, nb);
        const double beta = std::sqrt(dot(b, b));
        Coeffs x(nb, 0.0);
        if (beta == 0.0) return x;

        std::vector<Coeffs> q;
        q.reserve(m_cap + 1);
        {
            Coeffs q0 = b;
            for (auto& z : q0) z /= beta;
            q.push_back(std::move(q0));
        }
        std::vector<std::vector<double>> H(m_cap + 1, std::vector<double>(m_cap, 0.0));
        std::vector<double> cs(m_cap, 0.0), sn(m_cap, 0.0), g(m_cap + 1, 0.0);
        g[0] = beta;
        std::size_t m = 0;
        for (std::size_t j = 0; j < m_cap; ++j) {
            Coeffs w = apply_pjac(v_padded, q[j]);
            ++iter_count;
            for (std::size_t i = 0; i <= j; ++i) {
                H[i][j] = dot(q[i], w);
                for (std::size_t l = 0; l < nb; ++l) w[l] -= H[i][j] * q[i][l];
            }
            H[j + 1][j] = std::sqrt(dot(w, w));
            if (H[j + 1][j] > 1e-30) {
                for (auto& z : w) z /= H[j + 1][j];
                q.push_back(std::move(w));
            } else {
                q.push_back(Coeffs(nb, 0.0));
            }
            for (std::size_t i = 0; i < j; ++i) {
                const double tmp = cs[i] * H[i][j] + sn[i] * H[i + 1][j];
                H[i + 1][j] = -sn[i] * H[i][j] + cs[i] * H[i + 1][j];
                H[i][j] = tmp;
            }
            const double r = std::hypot(H[j][j], H[j + 1][j]);
            if (r == 0.0) {
                cs[j] = 1.0;
                sn[j] = 0.0;
            } else {
                cs[j] = H[j][j] / r;
                sn[j] = H[j + 1][j] / r;
            }
            H[j][j] = r;
            H[j + 1][j] = 0.0;
            g[j + 1] = -sn[j] * g[j];
            g[j] = cs[j] * g[j];
            m = j + 1;
            if (std::abs(g[j + 1]) <= rel_tol * beta) break;
        }
        // back-substitute the small triangular system
        std::vector<double> y(m, 0.0);
        for (std::size_t i = m; i-- > 0;) {
            double s = g[i];
            for (std::size_t l = i + 1; l < m; ++l) s -= H[i][l] * y[l];
            y[i] = (H[i][i] != 0.0) ? s / H[i][i] : 0.0;
        }
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t l = 0; l < nb; ++l) x[l] += y[i] * q[i][l];
        }
        return x;
    }

    static void finish(StepStats* stats, const StepStats& st) {
        if (stats) *stats = st;
    }

    Grid grid_;
    double dt_;
    double tol_;
    std::size_t max_iters_;
    bool dealias_;
    double w1_;
    std::vector<double> precond_;
    std::vector<double> inv_precond_;
    Coeffs deriv_;
};

struct NormRow {
    double t = 0.0;
    double l2 = 0.0;
    double h1dot = 0.0;
    double h2dot = 0.0;
    double mass = 0.0;
};

struct NormSeries {
    std::vector<NormRow> rows;
};

struct Snapshot {
    double t = 0.0;
    SpectralField field;
};

struct RunResult {
    NormSeries series;
    std::vector<Snapshot> snapshots;
    std::size_t total_newton_iters = 0;
    std::size_t total_fp_iters = 0;
};

inline NormRow measure(double t, const SpectralField& u) {
    const Norms n = norms(u);
    return {t, n.l2, n.h1dot, n.h2dot, mass(u)};
}

/// Advance an initial field with cn_step, recording norms/mass and snapshots
/// at every output interval. Sequential in time; deterministic.
inline RunResult evolve(SpectralField u, const RunConfig& cfg) {
    cfg.validate();
    if (u.grid.n_modes != cfg.n_modes) {
        throw LengthMismatch("evolve: field grid does not match config n_modes");
    }
    CnStepper stepper(u.grid, cfg);
    RunResult out;
    const std::size_t steps = cfg.n_steps();
    const std::size_t stride = cfg.output_stride();
    out.series.rows.push_back(measure(0.0, u));
    out.snapshots.push_back({0.0, u});
    for (std::size_t s = 1; s <= steps; ++s) {
        StepStats st;
        u = stepper.step(u, s - 1, &st);
        out.total_newton_iters += st.newton_iters;
        out.total_fp_iters += st.fixed_point_iters;
        if (s % stride == 0 || s == steps) {
            const double t = static_cast<double>(s) * cfg.dt;
            out.series.rows.push_back(measure(t, u));
            out.snapshots.push_back({t, u});
        }
    }
    return out;
}

/// Full simulation from the scaled-Gaussian data of the vanishing family.
inline RunResult run_simulation(const RunConfig& cfg) {
    cfg.validate();
    Grid g{cfg.n_modes, cfg.half_length};
    return evolve(init_scaled_gaussian(cfg.lambda, g), cfg);
}

/// Richardson extrapolation of a scheme of the given order:
/// v_fine + (v_fine - v_coarse) / (ratio^order - 1).
inline double richardson(double v_coarse, double v_fine, int order = 2, double ratio = 2.0) {
    if (!(ratio > 1.0)) throw ValidationError("ratio", "must be > 1");
    if (order < 1) throw ValidationError("order", "must be >= 1");
    return v_fine + (v_fine - v_coarse) / (std::pow(ratio, order) - 1.0);
}

}  // namespace ddlab::spectral
