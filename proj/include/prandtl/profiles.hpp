#pragma once

#include "grid.hpp"
#include "quadrature.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>

#include <array>
#include <functional>
#include <limits>
#include <memory>
#include <ostream>
#include <string>

namespace prandtl {

// Initial shear datum u0s(y) with its first six derivatives sampled on the
// y-nodes of `grid`. `eval(y, k)` returns the k-th derivative (k <= 6) at any
// y >= 0 and is what the heat evolution integrates against.
struct ShearProfile {
    std::string name;
    Grid2D grid;
    double y0 = 0.0;
    double alpha = 0.0;
    double A = 0.0;
    double c = 0.0;
    double limit = 1.0; // value of u0s at infinity
    std::function<double(double, int)> eval;
    std::array<YArray, 7> d; // d[0] = u0s, d[1] = omega0s, ..., d[6]

    const YArray& u0s() const { return d[0]; }
    const YArray& omega0s() const { return d[1]; }

    void resample() {
        for (int k = 0; k <= 6; ++k) {
            d[k].resize(grid.ny);
            for (int j = 0; j < grid.ny; ++j) d[k][j] = eval(grid.y(j), k);
        }
    }
};

namespace detail {

// u0s' = A (y0 - y) (1+y)^{-alpha-1} (1 + c y e^{-y}); returns the n-th
// derivative of u0s' (so the (n+1)-th derivative of u0s).
inline double ansatz_slope_derivative(double y, int n, double y0, double alpha, double A,
                                      double c) {
    auto p = [&](int k) { return k == 0 ? y0 - y : (k == 1 ? -1.0 : 0.0); };
    auto q = [&](int k) {
        double coef = 1.0;
        for (int i = 1; i <= k; ++i) coef *= -alpha - i;
        return coef * std::pow(1.0 + y, -alpha - 1.0 - k);
    };
    auto s = [&](int k) {
        const double e = std::exp(-y);
        if (k == 0) return 1.0 + c * y * e;
        return c * (k % 2 == 0 ? 1.0 : -1.0) * (y - k) * e;
    };
    double acc = 0.0;
    double binom_i = 1.0;
    for (int i = 0; i <= n; ++i) {
        if (i > 0) binom_i = binom_i * (n - i + 1) / i;
        const double pi = p(i);
        if (pi == 0.0) continue;
        double binom_j = 1.0;
        double inner = 0.0;
        for (int j = 0; j <= n - i; ++j) {
            if (j > 0) binom_j = binom_j * (n - i - j + 1) / j;
            inner += binom_j * q(j) * s(n - i - j);
        }
        acc += binom_i * pi * inner;
    }
    return A * acc;
}

// Cumulative table of the ansatz u0s on a fine uniform mesh, exact to
// quadrature roundoff at the table nodes.
struct AnsatzTable {
    double h = 0.01;
    double yend = 120.0;
    std::vector<double> u;
};

} // namespace detail

// Derivative ansatz with a critical point at y0, decay exponent alpha,
// u0s''(0) = 0 forced by c and the limit 1 at infinity forced by A.
inline ShearProfile build_shear_profile(const Grid2D& grid, double y0, double alpha) {
    if (!(alpha > 1.0)) throw Error("profiles", "alpha must exceed 1");
    if (!(y0 > 0.0) || !(y0 < grid.ymax / 3.0))
        throw Error("profiles", "y0 must lie in (0, Ymax/3)");
    const double c = (1.0 + (alpha + 1.0) * y0) / y0;

    // Integral of (y0 - y)(1+y)^{-alpha-1}: closed form, plus the correction
    // term by double-exponential quadrature.
    const double bare = (y0 + 1.0) / alpha - 1.0 / (alpha - 1.0);
    boost::math::quadrature::exp_sinh<double> integrator;
    const double corr = integrator.integrate([&](double s) {
        return s * (y0 - s) * std::pow(1.0 + s, -alpha - 1.0) * std::exp(-s);
    });
    const double total = bare + c * corr;
    if (!(total > 0.0))
        throw Error("profiles", "normalization integral is not positive; y0 too small for alpha");
    const double A = 1.0 / total;

    auto slope = [=](double y, int n) { return detail::ansatz_slope_derivative(y, n, y0, alpha, A, c); };

    auto table = std::make_shared<detail::AnsatzTable>();
    const auto& gl = GaussLegendre10::get();
    const int n = static_cast<int>(std::lround(table->yend / table->h));
    table->u.assign(n + 1, 0.0);
    for (int i = 0; i < n; ++i)
        table->u[i + 1] = table->u[i] + gl.integrate([&](double s) { return slope(s, 0); },
                                                     i * table->h, (i + 1) * table->h);

    // Beyond the table the e^{-y} correction is below roundoff.
    auto tail = [=](double y) {
        return A * ((y0 + 1.0) * std::pow(1.0 + y, -alpha) / alpha -
                    std::pow(1.0 + y, 1.0 - alpha) / (alpha - 1.0));
    };

    ShearProfile p;
    p.name = "ansatz";
    p.grid = grid;
    p.y0 = y0;
    p.alpha = alpha;
    p.A = A;
    p.c = c;
    p.limit = 1.0;
    p.eval = [=](double y, int k) -> double {
        if (k > 0) return slope(y, k - 1);
        if (y >= table->yend) return 1.0 - tail(y);
        const int i = static_cast<int>(y / table->h);
        const double a = i * table->h;
        if (y == a) return table->u[i];
        return table->u[i] + gl.integrate([&](double s) { return slope(s, 0); }, a, y);
    };
    p.resample();
    return p;
}

// Profile given by an arbitrary derivative evaluator; used for test data
// outside the ansatz family.
inline ShearProfile custom_profile(const Grid2D& grid, std::string name, double y0, double alpha,
                                   std::function<double(double, int)> eval, double limit = 1.0) {
    ShearProfile p;
    p.name = std::move(name);
    p.grid = grid;
    p.y0 = y0;
    p.alpha = alpha;
    p.limit = limit;
    p.eval = std::move(eval);
    p.resample();
    return p;
}

// ------------------------------------------------------------ assumption scan

struct AssumptionReport {
    double c0 = 0.0;
    double c1 = 0.0;
    double delta = 0.0;
    std::array<bool, 3> passes{false, false, false};
    std::string failure; // first failing clause, empty when all pass

    bool all() const { return passes[0] && passes[1] && passes[2]; }
};

namespace detail {

inline double bracket(double y) { return 1.0 + y; }

// Smallest |u0s''| over nodes in [y0-2 delta, y0+2 delta].
inline double second_derivative_floor(const ShearProfile& p, double delta) {
    double c0 = std::numeric_limits<double>::infinity();
    for (int j = 0; j < p.grid.ny; ++j) {
        const double y = p.grid.y(j);
        if (y >= p.y0 - 2 * delta && y <= p.y0 + 2 * delta) c0 = std::min(c0, std::abs(p.d[2][j]));
    }
    return std::isfinite(c0) ? c0 : 0.0;
}

// Largest c1 with c1 <y>^-a <= |u0s'| <= <y>^-a / c1 off the delta-band and
// |u0s^(j)| <= <y>^{-a-1} / c1 for 2 <= j <= 6.
inline double decay_constant(const ShearProfile& p, double delta) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0, dmax = 0.0;
    for (int j = 0; j < p.grid.ny; ++j) {
        const double y = p.grid.y(j);
        const double w = std::pow(bracket(y), p.alpha);
        if (y <= p.y0 - delta || y >= p.y0 + delta) {
            const double r = std::abs(p.d[1][j]) * w;
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
        for (int k = 2; k <= 6; ++k) dmax = std::max(dmax, std::abs(p.d[k][j]) * w * bracket(y));
    }
    double c1 = lo;
    if (hi > 0) c1 = std::min(c1, 1.0 / hi);
    if (dmax > 0) c1 = std::min(c1, 1.0 / dmax);
    if (!std::isfinite(c1)) return 0.0;
    return std::min(c1, 0.999);
}

} // namespace detail

// Scans candidate widths delta = k y0/200 and keeps the widest one whose
// curvature floor stays at least |u0s''(y0)|/8 with all clauses passing.
inline AssumptionReport validate_assumption(const ShearProfile& p) {
    AssumptionReport rep;
    const double tol = 1e-10;

    // (iii) boundary values and the limit at infinity.
    const bool iii = std::abs(p.d[0][0]) <= tol && std::abs(p.d[2][0]) <= tol &&
                     std::abs(p.limit - 1.0) <= 1e-6;
    rep.passes[2] = iii;

    // (i) critical point at y0: u0s'(y0) = 0 with a sign change, u0s''(y0) != 0.
    const double slope_scale = std::max(linf(p.d[1]), 1e-300);
    const double h = p.grid.dy();
    const bool critical = std::abs(p.eval(p.y0, 1)) <= 1e-12 * slope_scale &&
                          p.eval(p.y0 - h, 1) * p.eval(p.y0 + h, 1) < 0.0;
    const double curv = std::abs(p.eval(p.y0, 2));

    double best_delta = 0.0, best_c0 = 0.0, best_c1 = 0.0;
    if (critical && curv > 0.0) {
        for (int k = 1; k < 100; ++k) {
            const double delta = k * p.y0 / 200.0;
            const double c0 = detail::second_derivative_floor(p, delta);
            const double c1 = detail::decay_constant(p, delta);
            if (c0 >= curv / 8.0 && c1 > 0.0) {
                best_delta = delta;
                best_c0 = c0;
                best_c1 = c1;
            }
        }
    }
    rep.passes[0] = critical && curv > 0.0 && best_c0 > 0.0;

    if (rep.passes[0]) {
        rep.delta = best_delta;
        rep.c0 = best_c0;
        rep.c1 = best_c1;
        rep.passes[1] = best_c1 > 0.0;
    } else {
        // Without a critical point only the decay clause can be judged, on the
        // whole half-line.
        rep.delta = p.y0 / 4.0;
        rep.c0 = 0.0;
        rep.c1 = detail::decay_constant(p, 0.0);
        rep.passes[1] = rep.c1 > 0.0;
    }

    if (!rep.passes[0])
        rep.failure = "clause (i): no non-degenerate critical point at y0 with a curvature floor";
    else if (!rep.passes[1])
        rep.failure = "clause (ii): two-sided decay bound fails";
    else if (!rep.passes[2])
        rep.failure = "clause (iii): u0s(0), u0s''(0) or the limit at infinity is off";
    return rep;
}

// ------------------------------------------------------------ perturbation

struct CompatibilityReport {
    double trace = 0.0;     // max |u0(x,0)|
    double curvature = 0.0; // max |d_y omega0(x,0)|
    double third = 0.0;     // max |d_y^3 omega0 - (omega0s + omega0) d_x omega0| at y=0

    double max() const { return std::max({trace, curvature, third}); }
};

namespace detail {

// Third compatibility defect per x: d_y^3 omega0 - (omega0s + omega0) d_x omega0 at y=0.
inline std::vector<double> third_defect(const Field& u0, double omega0s_at0) {
    const auto& s1 = YStencil::get(u0.grid.ny, 1);
    const auto& s4 = YStencil::get(u0.grid.ny, 4);
    const double h = u0.grid.dy();
    const int nx = u0.grid.nx;
    std::vector<double> om(nx), d3(nx);
    for (int ix = 0; ix < nx; ++ix) {
        om[ix] = s1.apply(u0.row(ix), 0, h);
        d3[ix] = s4.apply(u0.row(ix), 0, h);
    }
    // Spectral x-derivative of the boundary vorticity trace.
    Field trace(u0.grid);
    for (int ix = 0; ix < nx; ++ix) trace(ix, 0) = om[ix];
    const Field dtrace = dx_m(trace, 1);
    std::vector<double> out(nx);
    for (int ix = 0; ix < nx; ++ix) out[ix] = d3[ix] - (omega0s_at0 + om[ix]) * dtrace(ix, 0);
    return out;
}

inline double stencil_at0(const YArray& col, double h, int j) {
    return YStencil::get(static_cast<int>(col.size()), j).apply(col.data(), 0, h);
}

} // namespace detail

// Residuals of the three compatibility conditions, with y-derivatives taken
// by the grid stencils at y = 0.
inline CompatibilityReport check_compatibility(const Field& u0, const ShearProfile& shear) {
    CompatibilityReport r;
    const auto& s2 = YStencil::get(u0.grid.ny, 2);
    const double h = u0.grid.dy();
    for (int ix = 0; ix < u0.grid.nx; ++ix) {
        r.trace = std::max(r.trace, std::abs(u0(ix, 0)));
        r.curvature = std::max(r.curvature, std::abs(s2.apply(u0.row(ix), 0, h)));
    }
    for (double v : detail::third_defect(u0, shear.omega0s()[0])) r.third = std::max(r.third, std::abs(v));
    return r;
}

struct Perturbation {
    Field u0;
    Field first_pass;
    std::vector<double> B; // correction amplitude per x
};

// Two-pass compatible initial perturbation. Pass one is
// amp sin(2 pi kx x/Lx) phi(y) with phi = y e^{-y^2} minus a multiple of
// (y^2/2) e^{-y^2} that cancels its discrete second derivative at 0. Pass two
// adds B(x) kappa(y), kappa = (y^4/24) e^{-y^2} with the same quadratic
// cleanup, and B is iterated until the third condition holds to roundoff.
inline Perturbation build_perturbation_parts(const Grid2D& grid, double amp, int kx,
                                             const ShearProfile& shear) {
    if (kx < 1 || kx > grid.nx / 8) throw Error("profiles", "kx must lie in [1, Nx/8]");
    const double h = grid.dy();
    YArray phi(grid.ny), beta(grid.ny), kappa(grid.ny);
    for (int j = 0; j < grid.ny; ++j) {
        const double y = grid.y(j), g = std::exp(-y * y);
        phi[j] = y * g;
        beta[j] = 0.5 * y * y * g;
        kappa[j] = y * y * y * y / 24.0 * g;
    }
    const double b2 = detail::stencil_at0(beta, h, 2);
    const double p2 = detail::stencil_at0(phi, h, 2);
    const double k2 = detail::stencil_at0(kappa, h, 2);
    for (int j = 0; j < grid.ny; ++j) {
        phi[j] -= p2 / b2 * beta[j];
        kappa[j] -= k2 / b2 * beta[j];
    }

    Perturbation out;
    out.first_pass = Field(grid);
    const double kw = 2.0 * std::numbers::pi * kx / grid.lx;
    for (int ix = 0; ix < grid.nx; ++ix) {
        const double s = amp * std::sin(kw * grid.x(ix));
        double* r = out.first_pass.row(ix);
        for (int j = 0; j < grid.ny; ++j) r[j] = s * phi[j];
    }
    out.B.assign(grid.nx, 0.0);
    out.u0 = out.first_pass;
    if (amp == 0.0) return out;

    const double k4 = detail::stencil_at0(kappa, h, 4);
    const double om0 = shear.omega0s()[0];
    // The correction has harmonics 0, kx and 2 kx at leading order. The
    // discrete trace of kappa' is not exactly zero, which feeds n kx at
    // relative size amp^(n-1); harmonics up to 6 kx leave a remainder far
    // below roundoff. The defect comes from a fourth-derivative stencil whose
    // rounding would spread into every x-mode, so each update is projected
    // onto those harmonics.
    auto project = [&](std::vector<double> a) {
        const int n = grid.nx;
        std::vector<double> out(n, 0.0);
        for (int k = 0; k <= 6 * kx && 2 * k <= n; k += kx) {
            double c = 0.0, sn = 0.0;
            for (int i = 0; i < n; ++i) {
                const double th = 2.0 * std::numbers::pi * k * i / n;
                c += a[i] * std::cos(th);
                sn += a[i] * std::sin(th);
            }
            const double f = (k == 0 || 2 * k == n) ? 1.0 / n : 2.0 / n;
            for (int i = 0; i < n; ++i) {
                const double th = 2.0 * std::numbers::pi * k * i / n;
                out[i] += f * (c * std::cos(th) + sn * std::sin(th));
            }
        }
        return out;
    };
    for (int it = 0; it < 60; ++it) {
        const auto defect = project(detail::third_defect(out.u0, om0));
        double change = 0.0, scale = 0.0;
        for (int ix = 0; ix < grid.nx; ++ix) {
            const double dB = -defect[ix] / k4;
            out.B[ix] += dB;
            change = std::max(change, std::abs(dB));
            scale = std::max(scale, std::abs(out.B[ix]));
            double* r = out.u0.row(ix);
            for (int j = 0; j < grid.ny; ++j) r[j] += dB * kappa[j];
        }
        if (change <= 1e-15 * scale) break;
    }
    return out;
}

inline Field build_perturbation(const Grid2D& grid, double amp, int kx, const ShearProfile& shear) {
    return build_perturbation_parts(grid, amp, kx, shear).u0;
}

// ------------------------------------------------------------ serialization

inline void write_profile_csv(std::ostream& os, const ShearProfile& p) {
    os.precision(17);
    os << "y,u0s,d1,d2,d3,d4,d5,d6\n";
    for (int j = 0; j < p.grid.ny; ++j) {
        os << p.grid.y(j);
        for (int k = 0; k <= 6; ++k) os << ',' << p.d[k][j];
        os << '\n';
    }
}

} // namespace prandtl
