#pragma once

// Residuals of the evolution equations satisfied by f_m, h_m and g_m along a
// stored trajectory. The left side
//   (d_t + (u^s+u) d_x + v d_y - d_y^2 - eps d_x^2) F
// uses centred differences of stored snapshots in t, spectral x-derivatives
// of the assembled field, and product/quotient rules for y-derivatives with
// the cut-off derivatives taken analytically. The right sides are the full
// expansions in which d_x^m v no longer appears.

#include "../auxiliary.hpp"
#include "../solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace prandtl::verify {

inline double binom(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// Snapshot plus the g-bracket spectra shared by every g-related quantity.
struct ResidualSnapshot {
    FlowSnapshot flow;
    XSpectrum G, Gy, Gyy; // bracket W w_x - W_y u_x and its first two y-derivatives

    explicit ResidualSnapshot(FlowSnapshot s) : flow(std::move(s)) {
        const auto& f = flow;
        const Field &W0 = f.W(0), &W1 = f.W(1), &W2 = f.W(2), &W3 = f.W(3);
        const Field &ux = f.X(0, 1), &wx = f.X(1, 1), &wyx = f.X(2, 1), &wyyx = f.X(3, 1);
        Field b(f.grid()), by(f.grid()), byy(f.grid());
        for (size_t k = 0; k < b.values.size(); ++k) {
            b.values[k] = W0.values[k] * wx.values[k] - W1.values[k] * ux.values[k];
            by.values[k] = W0.values[k] * wyx.values[k] - W2.values[k] * ux.values[k];
            byy.values[k] = W1.values[k] * wyx.values[k] + W0.values[k] * wyyx.values[k] -
                            W3.values[k] * ux.values[k] - W2.values[k] * wx.values[k];
        }
        G = XSpectrum::of(b);
        Gy = XSpectrum::of(by);
        Gyy = XSpectrum::of(byy);
    }

    // g_k = d_x^{k-1} G and its y-derivatives.
    Field g(int k) const { return G.derivative(k - 1); }
    Field gy(int k) const { return Gy.derivative(k - 1); }
};

enum class AuxKind { f, h, g };

inline std::string to_string(AuxKind k) { return k == AuxKind::f ? "f" : (k == AuxKind::h ? "h" : "g"); }

struct ResidualOptions {
    double eps = 0.1;
    // Leave out the -chi2 g_{m+1} term of the h equation (wiring check).
    bool drop_h_g_term = false;
    // Times below t_min are evaluated but kept out of `residual`; the
    // first-step initial layer at the wall would otherwise dominate the sup.
    double t_min = 0.0;
    AuxOptions aux;
};

// Value of the auxiliary function at one snapshot.
inline Field aux_value(AuxKind kind, int m, const ResidualSnapshot& s, const CutoffSet& cut, const AuxOptions& opt) {
    switch (kind) {
    case AuxKind::f: return aux_f(m, s.flow, cut, opt).first;
    case AuxKind::h: return aux_h(m, s.flow, cut, opt);
    case AuxKind::g: return s.g(m);
    }
    return {};
}

// Spatial part of the operator applied to F given its y-derivatives:
// (u^s+u) F_x + v F_y - F_yy - eps F_xx.
inline Field transport_diffusion(const FlowSnapshot& s, const Field& F, const Field& Fy, const Field& Fyy, double eps) {
    const XSpectrum sp = XSpectrum::of(F);
    const Field Fx = sp.derivative(1), Fxx = sp.derivative(2);
    const Grid2D& g = s.grid();
    const auto& us = s.shear().us();
    Field out(g);
    for (int ix = 0; ix < g.nx; ++ix)
        for (int iy = 0; iy < g.ny; ++iy) {
            const size_t k = static_cast<size_t>(ix) * g.ny + iy;
            out.values[k] = (us[iy] + s.u().values[k]) * Fx.values[k] + s.v().values[k] * Fy.values[k] -
                            Fyy.values[k] - eps * Fxx.values[k];
        }
    return out;
}

// Spatial LHS and RHS of one equation at one snapshot, plus named RHS groups.
struct EquationParts {
    Field spatial; // transport and diffusion part of the LHS
    Field rhs;
    std::map<std::string, Field> groups;
};

inline EquationParts f_equation(int m, const ResidualSnapshot& rs, const CutoffSet& cut, const ResidualOptions& o) {
    const FlowSnapshot& s = rs.flow;
    const Grid2D& g = s.grid();
    const double eps = o.eps;
    const auto &c = cut.chi1.d[0], &c1 = cut.chi1.d[1], &c2 = cut.chi1.d[2];
    const Field &W0 = s.W(0), &W1 = s.W(1), &W2 = s.W(2), &W3 = s.W(3);
    const Field &Xu = s.X(0, m), &Xw = s.X(1, m), &Xwy = s.X(2, m), &Xwyy = s.X(3, m), &Xu1 = s.X(0, m + 1);
    const Field &ux = s.X(0, 1), &wx = s.X(1, 1), &wyx = s.X(2, 1);
    const Field& v = s.v();
    std::vector<const Field*> Xuk, Xwk, Xwyk, Xvk;
    for (int k = 0; k <= m + 1; ++k) {
        Xuk.push_back(&s.X(0, k));
        Xwk.push_back(&s.X(1, k));
        Xwyk.push_back(&s.X(2, k));
        Xvk.push_back(&s.Xv(k));
    }

    Field F(g), Fy(g), Fyy(g), rhs(g);
    for (int ix = 0; ix < g.nx; ++ix)
        for (int iy = 0; iy < g.ny; ++iy) {
            if (!prandtl::detail::active(c[iy], c1[iy], c2[iy])) continue;
            const size_t k = static_cast<size_t>(ix) * g.ny + iy;
            const double w0 = W0.values[k];
            if (std::abs(w0) < o.aux.floor) prandtl::detail::floor_violation("omega^s + omega", g, k, w0);
            const double a = W1.values[k] / w0;
            const double ay = (W2.values[k] - a * W1.values[k]) / w0;
            const double ayy = (W3.values[k] - 2.0 * ay * W1.values[k] - a * W2.values[k]) / w0;
            const double ax = (wyx.values[k] - a * wx.values[k]) / w0;
            const double xu = Xu.values[k], xw = Xw.values[k], xwy = Xwy.values[k];
            const double Fb = xw - a * xu;
            const double Fby = xwy - ay * xu - a * xw;
            const double Fbyy = Xwyy.values[k] - ayy * xu - 2.0 * ay * xw - a * xwy;
            F.values[k] = c[iy] * Fb;
            Fy.values[k] = c1[iy] * Fb + c[iy] * Fby;
            Fyy.values[k] = c2[iy] * Fb + 2.0 * c1[iy] * Fby + c[iy] * Fbyy;

            double s1 = 0, s2 = 0, s3 = 0, s4 = 0;
            for (int j = 1; j <= m; ++j) {
                const double bc = binom(m, j);
                s1 += bc * Xuk[j]->values[k] * Xwk[m - j + 1]->values[k];
                s3 += bc * Xuk[j]->values[k] * Xuk[m - j + 1]->values[k];
                if (j <= m - 1) {
                    s2 += bc * Xvk[j]->values[k] * Xwyk[m - j]->values[k];
                    s4 += bc * Xvk[j]->values[k] * Xwk[m - j]->values[k];
                }
            }
            const double vv = v.values[k];
            double r = -c[iy] * s1 - c[iy] * s2 + c[iy] * a * s3 + c[iy] * a * s4;
            r += c1[iy] * vv * xw - 2.0 * c1[iy] * xwy - c2[iy] * xw;
            r -= a * (c1[iy] * vv * xu - 2.0 * c1[iy] * xw - c2[iy] * xu);
            r += (wx.values[k] - ux.values[k] * a - 2.0 * a * ay - 2.0 * eps * wx.values[k] / w0 * ax) * c[iy] * xu;
            r += 2.0 * c[iy] * ay * xw + 2.0 * c1[iy] * ay * xu + 2.0 * eps * c[iy] * ax * Xu1.values[k];
            rhs.values[k] = r;
        }
    EquationParts p;
    p.spatial = transport_diffusion(s, F, Fy, Fyy, eps);
    p.rhs = std::move(rhs);
    return p;
}

inline EquationParts h_equation(int m, const ResidualSnapshot& rs, const CutoffSet& cut, const ResidualOptions& o) {
    const FlowSnapshot& s = rs.flow;
    const Grid2D& g = s.grid();
    const double eps = o.eps;
    const auto &c = cut.chi2.d[0], &c1 = cut.chi2.d[1], &c2 = cut.chi2.d[2];
    const Field &W0 = s.W(0), &W1 = s.W(1), &W2 = s.W(2), &W3 = s.W(3), &W4 = s.W(4);
    const Field &Xw = s.X(1, m), &Xwy = s.X(2, m), &Xwyy = s.X(3, m), &Xwyyy = s.X(4, m), &Xw1 = s.X(1, m + 1);
    const Field &ux = s.X(0, 1), &wx = s.X(1, 1), &wyx = s.X(2, 1), &wyyx = s.X(3, 1);
    const Field& v = s.v();
    const Field gnext = rs.g(m + 1);
    std::vector<const Field*> Xuk, Xwk, Xwyk, Xwyyk, Xvk;
    for (int k = 0; k <= m + 1; ++k) {
        Xuk.push_back(&s.X(0, k));
        Xwk.push_back(&s.X(1, k));
        Xwyk.push_back(&s.X(2, k));
        Xwyyk.push_back(&s.X(3, k));
        Xvk.push_back(&s.Xv(k));
    }

    Field H(g), Hy(g), Hyy(g), rhs(g), gterm(g);
    for (int ix = 0; ix < g.nx; ++ix)
        for (int iy = 0; iy < g.ny; ++iy) {
            if (c[iy] == 0.0) continue;
            const size_t k = static_cast<size_t>(ix) * g.ny + iy;
            const double w0 = W0.values[k], w1 = W1.values[k], w2 = W2.values[k], w3 = W3.values[k];
            if (std::abs(w1) < o.aux.floor) prandtl::detail::floor_violation("d_y(omega^s + omega)", g, k, w1);
            const double b = w2 / w1;
            const double by = (w3 - b * w2) / w1;
            const double byy = (W4.values[k] - 2.0 * by * w2 - b * w3) / w1;
            const double bx = (wyyx.values[k] - b * wyx.values[k]) / w1;
            const double xw = Xw.values[k], xwy = Xwy.values[k], xwyy = Xwyy.values[k];
            const double Hb = xwy - b * xw;
            const double Hby = xwyy - by * xw - b * xwy;
            const double Hbyy = Xwyyy.values[k] - byy * xw - 2.0 * by * xwy - b * xwyy;
            H.values[k] = c[iy] * Hb;
            Hy.values[k] = c1[iy] * Hb + c[iy] * Hby;
            Hyy.values[k] = c2[iy] * Hb + 2.0 * c1[iy] * Hby + c[iy] * Hbyy;

            const double cw = c[iy] * xw;
            const double P = 2.0 * (w0 * wyx.values[k] - ux.values[k] * w2) * cw / w1 -
                             (w0 * wx.values[k] - ux.values[k] * w1) * w2 * cw / (w1 * w1) -
                             2.0 * (w3 * w2 + eps * wyyx.values[k] * wyx.values[k]) * cw / (w1 * w1) +
                             2.0 * (w2 * w2 + eps * wyx.values[k] * wyx.values[k]) * w2 * cw / (w1 * w1 * w1);
            double s1 = 0, s2 = 0, s3 = 0, s4 = 0;
            for (int j = 1; j <= m; ++j) {
                const double bc = binom(m, j);
                s1 += bc * Xuk[j]->values[k] * Xwk[m - j + 1]->values[k];
                s3 += bc * Xuk[j]->values[k] * Xwyk[m - j + 1]->values[k];
                if (j <= m - 1) {
                    s2 += bc * Xvk[j]->values[k] * Xwyk[m - j]->values[k];
                    s4 += bc * Xvk[j]->values[k] * Xwyyk[m - j]->values[k];
                }
            }
            const double vv = v.values[k];
            double r = P + 2.0 * by * (c1[iy] * xw + c[iy] * xwy) + 2.0 * eps * bx * c[iy] * Xw1.values[k];
            r += c[iy] * b * s1 + c[iy] * b * s2;
            r += -b * c1[iy] * vv * xw + b * c2[iy] * xw + 2.0 * b * c1[iy] * xwy;
            r += -c[iy] * s3 - c[iy] * s4;
            r += c1[iy] * vv * xwy - c2[iy] * xwy - 2.0 * c1[iy] * xwyy;
            gterm.values[k] = -c[iy] * gnext.values[k];
            if (!o.drop_h_g_term) r += gterm.values[k];
            rhs.values[k] = r;
        }
    EquationParts p;
    p.spatial = transport_diffusion(s, H, Hy, Hyy, eps);
    p.rhs = std::move(rhs);
    p.groups["g_next"] = std::move(gterm);
    return p;
}

inline EquationParts g_equation(int m, const ResidualSnapshot& rs, const ResidualOptions& o) {
    const FlowSnapshot& s = rs.flow;
    const Grid2D& g = s.grid();
    const double eps = o.eps;
    const Field gm = rs.g(m), gy = rs.gy(m), gyy = rs.Gyy.derivative(m - 1);

    // Six sums of the g equation, kept apart so the eps-groups can be inspected.
    std::array<Field, 6> S;
    for (auto& f : S) f = Field(g);
    auto add = [&](Field& dst, double coef, const Field& a, const Field& b) {
        for (size_t k = 0; k < dst.values.size(); ++k) dst.values[k] += coef * a.values[k] * b.values[k];
    };
    for (int j = 1; j <= m - 1; ++j) {
        const double bc = binom(m - 1, j);
        add(S[0], -bc, s.X(0, j), rs.g(m - j + 1));
        add(S[1], -bc, s.Xv(j), rs.gy(m - j));
    }
    for (int j = 0; j <= m - 1; ++j) {
        const double bc = binom(m - 1, j);
        add(S[2], 2.0 * bc, s.XW(2, j), s.X(1, m - j));
        add(S[3], 2.0 * eps * bc, s.X(2, j + 1), s.X(0, m - j + 1));
        add(S[4], -2.0 * bc, s.XW(1, j), s.X(2, m - j));
        add(S[5], -2.0 * eps * bc, s.X(1, j + 1), s.X(1, m - j + 1));
    }
    EquationParts p;
    p.spatial = transport_diffusion(s, gm, gy, gyy, eps);
    p.rhs = Field(g);
    for (const auto& f : S) p.rhs += f;
    const char* names[6] = {"transport", "stretching", "curvature", "eps_mixed", "vorticity_flux", "eps_vorticity"};
    for (int i = 0; i < 6; ++i) p.groups[names[i]] = std::move(S[i]);
    return p;
}

// One (kind, m) entry measured on a single trajectory.
struct ResidualSample {
    double residual = 0.0;  // sup over interior times >= t_min of ||LHS - RHS||_{L2}
    double residual_all = 0.0; // same sup including the earliest interior times
    double scale = 0.0;     // sup over the same times of ||F||_{L2}
    double dt_scale = 0.0;  // sup of ||d_t F||_{L2}
    std::map<std::string, double> groups; // sup of ||group||_{L2}
};

struct ResidualKey {
    AuxKind kind;
    int m;
    auto operator<=>(const ResidualKey&) const = default;
};

// Sweeps the trajectory once with a three-snapshot window and evaluates every
// requested equation at each interior time.
inline std::map<ResidualKey, ResidualSample> evaluate_residuals(const Trajectory& tr, const CutoffSet& cut,
                                                                const std::vector<ResidualKey>& keys,
                                                                const ResidualOptions& opt) {
    if (tr.size() < 5) throw Error("verify", "residual checks need at least 5 stored times");
    std::map<ResidualKey, ResidualSample> out;
    for (const auto& k : keys) out[k];
    auto make = [&](size_t n) {
        return std::make_unique<ResidualSnapshot>(FlowSnapshot(tr.u[n], tr.v[n], tr.shear[n]));
    };
    std::unique_ptr<ResidualSnapshot> prev = make(0), cur = make(1), next;
    // Aux values at n-1, n, n+1.
    std::map<ResidualKey, Field> vp, vc, vn;
    for (const auto& k : keys) {
        vp[k] = aux_value(k.kind, k.m, *prev, cut, opt.aux);
        vc[k] = aux_value(k.kind, k.m, *cur, cut, opt.aux);
    }
    prev.reset();
    for (size_t n = 1; n + 1 < tr.size(); ++n) {
        next = make(n + 1);
        const double span = tr.times[n + 1] - tr.times[n - 1];
        for (const auto& k : keys) {
            vn[k] = aux_value(k.kind, k.m, *next, cut, opt.aux);
            Field ft = vn[k] - vp[k];
            ft *= 1.0 / span;
            EquationParts parts = k.kind == AuxKind::f ? f_equation(k.m, *cur, cut, opt)
                                  : k.kind == AuxKind::h ? h_equation(k.m, *cur, cut, opt)
                                                         : g_equation(k.m, *cur, opt);
            Field res = ft + parts.spatial - parts.rhs;
            auto& smp = out[k];
            const double rn = weighted_l2(res, 0.0);
            smp.residual_all = std::max(smp.residual_all, rn);
            if (tr.times[n] >= opt.t_min - 1e-15) smp.residual = std::max(smp.residual, rn);
            smp.dt_scale = std::max(smp.dt_scale, weighted_l2(ft, 0.0));
            smp.scale = std::max(smp.scale, weighted_l2(vc[k], 0.0));
            for (const auto& [name, f] : parts.groups)
                smp.groups[name] = std::max(smp.groups[name], weighted_l2(f, 0.0));
        }
        std::swap(vp, vc);
        std::swap(vc, vn);
        cur = std::move(next);
    }
    return out;
}

// Residual of one equation over successive refinement levels.
struct ResidualReport {
    std::string name;
    struct Level {
        double dt, dy;
        int nx;
    };
    std::vector<Level> grid_levels;
    std::vector<double> residual_norms;
    std::vector<double> scales;
    std::vector<double> orders; // log ratio of successive levels over the dt ratio
    double observed_order = 0.0; // smallest of `orders`
    std::map<std::string, double> groups; // group norms at the finest level
    bool rounding_level = false;          // every residual <= 1e-12
    bool pass = false;
};

// Builds a report from per-level samples; each level halves dt (and dy when
// the grids are refined jointly), so the log2 ratio is the observed order.
inline ResidualReport make_residual_report(const std::string& name, const std::vector<ResidualReport::Level>& levels,
                                           const std::vector<ResidualSample>& samples, double min_order) {
    ResidualReport r;
    r.name = name;
    r.grid_levels = levels;
    for (const auto& s : samples) {
        r.residual_norms.push_back(s.residual);
        r.scales.push_back(s.scale);
    }
    const double slack = 1e-12;
    bool finite = true, rounding = true;
    for (double v : r.residual_norms) {
        finite = finite && std::isfinite(v);
        rounding = rounding && v <= slack;
    }
    for (size_t i = 1; i < r.residual_norms.size(); ++i) {
        const double a = r.residual_norms[i - 1], b = r.residual_norms[i];
        r.orders.push_back(a > 0.0 && b > 0.0 ? std::log(a / b) / std::log(levels[i - 1].dt / levels[i].dt) : 0.0);
    }
    r.observed_order = r.orders.empty() ? 0.0 : *std::min_element(r.orders.begin(), r.orders.end());
    if (!samples.empty()) r.groups = samples.back().groups;
    // Residuals already at rounding level (zero perturbation) have nothing to converge.
    r.rounding_level = finite && rounding;
    r.pass = finite && !r.orders.empty() && (r.rounding_level || r.observed_order >= min_order);
    return r;
}

} // namespace prandtl::verify
