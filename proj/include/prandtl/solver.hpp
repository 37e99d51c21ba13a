#pragma once

#include "shear.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace prandtl {

enum class Scheme { picard, imex };

inline std::string to_string(Scheme s) { return s == Scheme::picard ? "picard" : "imex"; }

struct SolverConfig {
    double eps = 0.1;
    double T = 0.05;
    int Nt = 32;
    int jmax = 30;
    double tol = 1e-12;
    Scheme scheme = Scheme::picard;
    // Off: drop transport and stretching, leaving the pure heat flow.
    bool nonlinear = true;

    void validate() const {
        if (!(eps > 0.0 && eps <= 1.0)) throw Error("solver", "eps must lie in (0, 1]");
        if (!(T > 0.0)) throw Error("solver", "T must be positive");
        if (Nt < 4) throw Error("solver", "Nt must be at least 4");
        if (jmax < 2) throw Error("solver", "jmax must be at least 2");
        if (!(tol > 0.0)) throw Error("solver", "tol must be positive");
    }
    double dt() const { return T / Nt; }
};

struct Trajectory {
    Scheme scheme = Scheme::picard;
    double eps = 0.0;
    std::vector<double> times;
    std::vector<Field> u;
    std::vector<Field> v;
    std::vector<ShearState> shear;
    std::vector<double> contraction; // ||xi_j|| for j = 1, 2, ...
    bool converged = true;
    std::vector<std::string> warnings;

    size_t size() const { return times.size(); }
    const Grid2D& grid() const { return u.front().grid; }

    // Every s-th stored time, keeping the last one.
    Trajectory strided(int s) const {
        if (s <= 1) return *this;
        Trajectory out = *this;
        out.times.clear();
        out.u.clear();
        out.v.clear();
        out.shear.clear();
        for (size_t n = 0; n < size(); n += s) {
            out.times.push_back(times[n]);
            out.u.push_back(u[n]);
            out.v.push_back(v[n]);
            out.shear.push_back(shear[n]);
        }
        return out;
    }
};

// ------------------------------------------------------------ heat semigroup

// exp(t (d_y^2 + eps d_x^2)) with Dirichlet ends in y: DST-I modes decay as
// exp(-(n pi / Ymax)^2 t), Fourier modes as exp(-eps kappa^2 t).
class HeatPropagator {
public:
    HeatPropagator(const Grid2D& g, double t, double eps) : g_(g), fy_(g.ny - 2), fx_(g.nx / 2 + 1) {
        const double L = g.ymax;
        for (int n = 1; n <= g.ny - 2; ++n) {
            const double lam = std::pow(n * std::numbers::pi / L, 2);
            fy_[n - 1] = std::exp(-lam * t) / (2.0 * (g.ny - 1));
        }
        for (int k = 0; k <= g.nx / 2; ++k)
            fx_[k] = std::exp(-eps * g.kappa(k) * g.kappa(k) * t) / g.nx;
    }

    Field operator()(const Field& f) const {
        Field out = f;
        apply(out);
        return out;
    }

    void apply(Field& f) const {
        const int nx = g_.nx, ny = g_.ny;
        const auto& dst = fft::YSine::get(nx, ny);
        for (int ix = 0; ix < nx; ++ix) {
            double* r = f.row(ix);
            r[0] = 0.0;
            r[ny - 1] = 0.0;
        }
        dst.apply(f.values.data());
        for (int ix = 0; ix < nx; ++ix) {
            double* r = f.row(ix) + 1;
            for (int n = 0; n < ny - 2; ++n) r[n] *= fy_[n];
        }
        dst.apply(f.values.data());
        XSpectrum s = XSpectrum::of(f);
        for (int k = 0; k <= nx / 2; ++k)
            for (int j = 0; j < ny; ++j) s.at(k, j) *= fx_[k];
        fft::XTransform::get(nx, ny).backward(s.coeff.data(), f.values.data());
    }

private:
    Grid2D g_;
    std::vector<double> fy_, fx_;
};

inline Field heat_propagate(const Field& f, double t, double eps) {
    return HeatPropagator(f.grid, t, eps)(f);
}

namespace detail {

inline void zero_y_ends(Field& f) {
    for (int ix = 0; ix < f.grid.nx; ++ix) {
        f(ix, 0) = 0.0;
        f(ix, f.grid.ny - 1) = 0.0;
    }
}

} // namespace detail

// Integral_0^{t_n} M1(t_n - s) f(s) ds for n = 0..t_index by the exponential
// trapezoid recursion D_{n+1} = M1(dt)(D_n + dt/2 f_n) + dt/2 f_{n+1}.
inline std::vector<Field> duhamel_all(const std::vector<Field>& forcing, double dt, int t_index,
                                      double eps) {
    if (t_index < 0 || t_index >= static_cast<int>(forcing.size()))
        throw Error("solver", "duhamel index outside the forcing time grid");
    const Grid2D& g = forcing.front().grid;
    HeatPropagator step(g, dt, eps);
    std::vector<Field> D;
    D.reserve(t_index + 1);
    D.emplace_back(g);
    for (int n = 0; n < t_index; ++n) {
        Field next = D.back();
        const Field& fn = forcing[n];
        for (size_t k = 0; k < next.values.size(); ++k) next.values[k] += 0.5 * dt * fn.values[k];
        step.apply(next);
        const Field& f1 = forcing[n + 1];
        for (size_t k = 0; k < next.values.size(); ++k) next.values[k] += 0.5 * dt * f1.values[k];
        detail::zero_y_ends(next);
        D.push_back(std::move(next));
    }
    return D;
}

inline Field duhamel(const std::vector<Field>& forcing, double dt, int t_index, double eps) {
    return duhamel_all(forcing, dt, t_index, eps).back();
}

inline Field recover_v(const Field& u) {
    Field ux = dx_m(u, 1);
    ux *= -1.0;
    return integrate_y_from_zero(ux);
}

// Transport plus stretching: (u^s + u) d_x u + v (omega^s + d_y u).
inline Field nonlinear_term(const Field& u, const Field& v, const ShearState& s) {
    const Field ux = dx_m(u, 1);
    const Field uy = dy_j(u, 1);
    Field out(u.grid);
    const int nx = u.grid.nx, ny = u.grid.ny;
    for (int ix = 0; ix < nx; ++ix) {
        const double *pu = u.row(ix), *px = ux.row(ix), *py = uy.row(ix), *pv = v.row(ix);
        double* o = out.row(ix);
        for (int j = 0; j < ny; ++j)
            o[j] = (s.us()[j] + pu[j]) * px[j] + pv[j] * (s.omegas()[j] + py[j]);
    }
    return out;
}

inline std::vector<ShearState> shear_history(const ShearProfile& p, const std::vector<double>& times) {
    std::vector<ShearState> out;
    out.reserve(times.size());
    for (double t : times) out.push_back(evolve_shear(p, t));
    return out;
}

inline std::vector<double> time_grid(const SolverConfig& cfg) {
    std::vector<double> t(cfg.Nt + 1);
    for (int n = 0; n <= cfg.Nt; ++n) t[n] = cfg.T * n / cfg.Nt;
    return t;
}

// sup over stored times of the L2 norm of a - b.
inline double working_norm(const std::vector<Field>& a, const std::vector<Field>& b) {
    double m = 0.0;
    for (size_t n = 0; n < a.size(); ++n) m = std::max(m, weighted_l2(a[n] - b[n], 0.0));
    return m;
}

// Fixed-point map u_j = M1 u0 - M2 N(u_{j-1}) on the whole time grid,
// starting from u0 frozen in time. Stops once ||xi_j|| <= tol ||u0||.
inline Trajectory picard_solve(const Field& u0, const ShearProfile& profile, const SolverConfig& cfg,
                               const std::vector<ShearState>* shear = nullptr) {
    cfg.validate();
    const Grid2D& g = u0.grid;
    const double dt = cfg.dt();
    Trajectory tr;
    tr.scheme = Scheme::picard;
    tr.eps = cfg.eps;
    tr.times = time_grid(cfg);
    tr.shear = shear ? *shear : shear_history(profile, tr.times);

    std::vector<Field> free(cfg.Nt + 1);
    free[0] = u0;
    detail::zero_y_ends(free[0]);
    HeatPropagator step(g, dt, cfg.eps);
    for (int n = 0; n < cfg.Nt; ++n) free[n + 1] = step(free[n]);

    std::vector<Field> prev(cfg.Nt + 1, u0);
    const double scale = std::max(weighted_l2(u0, 0.0), 1e-300);
    int rises = 0;
    tr.converged = false;
    for (int j = 1; j <= cfg.jmax; ++j) {
        std::vector<Field> cur(cfg.Nt + 1);
        if (cfg.nonlinear) {
            std::vector<Field> forcing(cfg.Nt + 1);
            for (int n = 0; n <= cfg.Nt; ++n) {
                forcing[n] = nonlinear_term(prev[n], recover_v(prev[n]), tr.shear[n]);
                detail::zero_y_ends(forcing[n]);
            }
            auto D = duhamel_all(forcing, dt, cfg.Nt, cfg.eps);
            for (int n = 0; n <= cfg.Nt; ++n) cur[n] = free[n] - D[n];
        } else {
            cur = free;
        }
        const double xi = working_norm(cur, prev);
        tr.contraction.push_back(xi);
        prev = std::move(cur);
        if (!std::isfinite(xi)) throw DivergenceError("solver", "Picard iterate became non-finite");
        const size_t nj = tr.contraction.size();
        rises = (nj >= 2 && tr.contraction[nj - 1] > tr.contraction[nj - 2]) ? rises + 1 : 0;
        if (rises >= 3)
            throw DivergenceError(
                "solver", "Picard differences grew for 3 consecutive iterations (T = " +
                              std::to_string(cfg.T) + " too large for eps = " + std::to_string(cfg.eps) +
                              "; the fixed-point time must shrink with eps)");
        if (xi <= cfg.tol * scale) {
            tr.converged = true;
            break;
        }
    }
    if (!tr.converged) tr.warnings.push_back("Picard iteration stopped at jmax without reaching tol");
    tr.u = std::move(prev);
    tr.v.reserve(tr.u.size());
    for (const auto& f : tr.u) tr.v.push_back(recover_v(f));
    return tr;
}

// Exponential first-order step: u_{n+1} = M1(dt)(u_n - dt N(u_n)).
inline Trajectory imex_solve(const Field& u0, const ShearProfile& profile, const SolverConfig& cfg,
                             const std::vector<ShearState>* shear = nullptr) {
    cfg.validate();
    const Grid2D& g = u0.grid;
    const double dt = cfg.dt();
    Trajectory tr;
    tr.scheme = Scheme::imex;
    tr.eps = cfg.eps;
    tr.times = time_grid(cfg);
    tr.shear = shear ? *shear : shear_history(profile, tr.times);
    HeatPropagator step(g, dt, cfg.eps);
    tr.u.push_back(u0);
    detail::zero_y_ends(tr.u[0]);
    for (int n = 0; n < cfg.Nt; ++n) {
        Field next = tr.u[n];
        if (cfg.nonlinear) {
            Field N = nonlinear_term(tr.u[n], recover_v(tr.u[n]), tr.shear[n]);
            for (size_t k = 0; k < next.values.size(); ++k) next.values[k] -= dt * N.values[k];
        }
        step.apply(next);
        const double before = linf(tr.u[n]), after = linf(next);
        if (!next.finite() || (before > 0.0 && after > 2.0 * before))
            throw DivergenceError("solver", "IMEX field maximum more than doubled at step " +
                                                std::to_string(n + 1) + "; reduce the time step");
        tr.u.push_back(std::move(next));
    }
    for (const auto& f : tr.u) tr.v.push_back(recover_v(f));
    return tr;
}

inline Trajectory solve(const Field& u0, const ShearProfile& profile, const SolverConfig& cfg,
                        const std::vector<ShearState>* shear = nullptr) {
    return cfg.scheme == Scheme::picard ? picard_solve(u0, profile, cfg, shear)
                                        : imex_solve(u0, profile, cfg, shear);
}

} // namespace prandtl
