#pragma once

// Auxiliary (cancellation) functions built from a flow snapshot:
//   f_m = chi1 (d_x^m omega - a d_x^m u),            a = W_y / W
//   h_m = chi2 (d_x^m d_y omega - b d_x^m omega),     b = W_yy / W_y
//   g_m = d_x^{m-1}(W d_x omega - W_y d_x u)
// with W = omega^s + omega. Quotients are only evaluated where the cut-off
// multiplying them is nonzero.

#include "cutoffs.hpp"
#include "shear.hpp"

#include <map>
#include <memory>
#include <string>
#include <utility>

namespace prandtl {

// u, v and everything derived from them at one time level.
class FlowSnapshot {
public:
    static constexpr int kYOrders = 5; // d_y^j u stored for j = 0..5

    FlowSnapshot(const Field& u, const Field& v, const ShearState& s) : grid_(u.grid), t_(s.t), shear_(s) {
        uy_[0] = u;
        for (int j = 1; j <= kYOrders; ++j) uy_[j] = dy_j(u, j);
        v_ = v;
        for (int k = 0; k < 5; ++k) {
            W_[k] = uy_[k + 1];
            W_[k].add_y(s.domegas(k));
        }
    }

    static FlowSnapshot from_u(const Field& u, const ShearState& s) {
        Field ux = dx_m(u, 1);
        ux *= -1.0;
        return FlowSnapshot(u, integrate_y_from_zero(ux), s);
    }

    const Grid2D& grid() const { return grid_; }
    double t() const { return t_; }
    const ShearState& shear() const { return shear_; }
    const Field& u() const { return uy_[0]; }
    const Field& v() const { return v_; }
    // d_y^j u
    const Field& uy(int j) const { return uy_[j]; }
    // d_y^k (omega^s + omega), k = 0..4
    const Field& W(int k) const { return W_[k]; }

    // d_x^k d_y^j u, memoized.
    const Field& X(int j, int k) const {
        if (k == 0) return uy_[j];
        auto key = std::pair{j, k};
        auto it = xcache_.find(key);
        if (it != xcache_.end()) return it->second;
        if (!spec_[j]) spec_[j] = std::make_unique<XSpectrum>(XSpectrum::of(uy_[j]));
        return xcache_.emplace(key, spec_[j]->derivative(k)).first->second;
    }

    // d_x^k v, memoized.
    const Field& Xv(int k) const {
        if (k == 0) return v_;
        auto it = vcache_.find(k);
        if (it != vcache_.end()) return it->second;
        return vcache_.emplace(k, dx_m(v_, k)).first->second;
    }

    // d_x^k of W_j: x-derivatives only see the perturbation part.
    const Field& XW(int j, int k) const { return k == 0 ? W_[j] : X(j + 1, k); }

    const XSpectrum& spectrum(int j) const {
        if (!spec_[j]) spec_[j] = std::make_unique<XSpectrum>(XSpectrum::of(uy_[j]));
        return *spec_[j];
    }

private:
    Grid2D grid_;
    double t_ = 0.0;
    ShearState shear_;
    std::array<Field, kYOrders + 1> uy_;
    Field v_;
    std::array<Field, 5> W_;
    mutable std::array<std::unique_ptr<XSpectrum>, kYOrders + 1> spec_;
    mutable std::map<std::pair<int, int>, Field> xcache_;
    mutable std::map<int, Field> vcache_;
};

struct AuxOptions {
    // Smallest admissible |W| (for a) or |W_y| (for b) where a quotient is formed.
    double floor = 1e-8;
};

struct AuxBundle {
    int m = 0;
    Field f, ftilde, h, g, gtilde, ghat;
};

namespace detail {

[[noreturn]] inline void floor_violation(const std::string& what, const Grid2D& g, size_t flat, double value) {
    const int ix = static_cast<int>(flat / g.ny), iy = static_cast<int>(flat % g.ny);
    throw Error("cutoffs_aux", what + " denominator " + std::to_string(value) + " below floor at node (ix=" +
                                   std::to_string(ix) + ", iy=" + std::to_string(iy) + ", y=" +
                                   std::to_string(g.y(iy)) + ")");
}

inline bool active(double c0, double c1, double c2) { return c0 != 0.0 || c1 != 0.0 || c2 != 0.0; }

} // namespace detail

// Returns (f_m, ftilde_m): ftilde uses chi1' in place of chi1.
inline std::pair<Field, Field> aux_f(int m, const FlowSnapshot& s, const CutoffSet& cut,
                                     const AuxOptions& opt = {}) {
    const Grid2D& g = s.grid();
    const Field &Xw = s.X(1, m), &Xu = s.X(0, m), &W0 = s.W(0), &W1 = s.W(1);
    const auto &c = cut.chi1.d[0], &c1 = cut.chi1.d[1], &c2 = cut.chi1.d[2];
    Field f(g), ft(g);
    for (int ix = 0; ix < g.nx; ++ix)
        for (int iy = 0; iy < g.ny; ++iy) {
            if (!detail::active(c[iy], c1[iy], c2[iy])) continue;
            const size_t k = static_cast<size_t>(ix) * g.ny + iy;
            if (std::abs(W0.values[k]) < opt.floor) detail::floor_violation("omega^s + omega", g, k, W0.values[k]);
            const double F = Xw.values[k] - W1.values[k] / W0.values[k] * Xu.values[k];
            f.values[k] = c[iy] * F;
            ft.values[k] = c1[iy] * F;
        }
    return {std::move(f), std::move(ft)};
}

// The quotient form chi1 (omega^s+omega) d_y (d_x^m u / (omega^s+omega)),
// with d_y taken by the grid stencil. Nodes where |W| is below the floor are
// left at zero and excluded by the caller.
inline Field aux_f_quotient_form(int m, const FlowSnapshot& s, const CutoffSet& cut, double floor = 1e-8) {
    const Grid2D& g = s.grid();
    const Field &Xu = s.X(0, m), &W0 = s.W(0);
    Field q(g);
    for (size_t k = 0; k < q.values.size(); ++k)
        q.values[k] = std::abs(W0.values[k]) >= floor ? Xu.values[k] / W0.values[k] : 0.0;
    Field dq = dy_j(q, 1);
    for (int ix = 0; ix < g.nx; ++ix)
        for (int iy = 0; iy < g.ny; ++iy) {
            const size_t k = static_cast<size_t>(ix) * g.ny + iy;
            dq.values[k] *= cut.chi1.d[0][iy] * W0.values[k];
        }
    return dq;
}

inline Field aux_h(int m, const FlowSnapshot& s, const CutoffSet& cut, const AuxOptions& opt = {}) {
    const Grid2D& g = s.grid();
    const Field &Xwy = s.X(2, m), &Xw = s.X(1, m), &W1 = s.W(1), &W2 = s.W(2);
    const auto& c = cut.chi2.d[0];
    Field h(g);
    for (int ix = 0; ix < g.nx; ++ix)
        for (int iy = 0; iy < g.ny; ++iy) {
            if (c[iy] == 0.0) continue;
            const size_t k = static_cast<size_t>(ix) * g.ny + iy;
            if (std::abs(W1.values[k]) < opt.floor) detail::floor_violation("d_y(omega^s + omega)", g, k, W1.values[k]);
            h.values[k] = c[iy] * (Xwy.values[k] - W2.values[k] / W1.values[k] * Xw.values[k]);
        }
    return h;
}

// Bracket W d_x omega - W_y d_x u whose (m-1)-th x-derivative is g_m.
inline Field g_bracket(const FlowSnapshot& s) {
    const Field &W0 = s.W(0), &W1 = s.W(1), &wx = s.X(1, 1), &ux = s.X(0, 1);
    Field b(s.grid());
    for (size_t k = 0; k < b.values.size(); ++k) b.values[k] = W0.values[k] * wx.values[k] - W1.values[k] * ux.values[k];
    return b;
}

// Returns (g_m, gtilde_m).
inline std::pair<Field, Field> aux_g(int m, const FlowSnapshot& s) {
    if (m < 1) throw Error("cutoffs_aux", "g_m needs m >= 1");
    Field gm = dx_m(g_bracket(s), m - 1);
    const Field &W0 = s.W(0), &W1 = s.W(1), &Xw = s.X(1, m), &Xu = s.X(0, m);
    Field gt(s.grid());
    for (size_t k = 0; k < gt.values.size(); ++k) gt.values[k] = W0.values[k] * Xw.values[k] - W1.values[k] * Xu.values[k];
    return {std::move(gm), std::move(gt)};
}

// ghat_m = (psi W + 1 - psi)(d_x^m omega - a d_x^m u); on the psi plateau it
// reduces to gtilde_m and no division is performed.
inline Field aux_g_hat(int m, const FlowSnapshot& s, const CutoffSet& cut, const AuxOptions& opt = {}) {
    const Grid2D& g = s.grid();
    const Field &W0 = s.W(0), &W1 = s.W(1), &Xw = s.X(1, m), &Xu = s.X(0, m);
    const auto& psi = cut.psi.d[0];
    Field out(g);
    for (int ix = 0; ix < g.nx; ++ix)
        for (int iy = 0; iy < g.ny; ++iy) {
            const size_t k = static_cast<size_t>(ix) * g.ny + iy;
            const double gt = W0.values[k] * Xw.values[k] - W1.values[k] * Xu.values[k];
            if (psi[iy] == 1.0) {
                out.values[k] = gt;
                continue;
            }
            if (std::abs(W0.values[k]) < opt.floor) detail::floor_violation("omega^s + omega", g, k, W0.values[k]);
            out.values[k] = (psi[iy] * W0.values[k] + 1.0 - psi[iy]) * gt / W0.values[k];
        }
    return out;
}

inline AuxBundle aux_bundle(int m, const FlowSnapshot& s, const CutoffSet& cut, const AuxOptions& opt = {}) {
    AuxBundle b;
    b.m = m;
    std::tie(b.f, b.ftilde) = aux_f(m, s, cut, opt);
    b.h = aux_h(m, s, cut, opt);
    std::tie(b.g, b.gtilde) = aux_g(m, s);
    b.ghat = aux_g_hat(m, s, cut, opt);
    return b;
}

// Convenience overloads on a bare field.
inline std::pair<Field, Field> aux_f(int m, const Field& u, const ShearState& sh, const CutoffSet& cut) {
    return aux_f(m, FlowSnapshot::from_u(u, sh), cut);
}
inline Field aux_h(int m, const Field& u, const ShearState& sh, const CutoffSet& cut) {
    return aux_h(m, FlowSnapshot::from_u(u, sh), cut);
}
inline std::pair<Field, Field> aux_g(int m, const Field& u, const ShearState& sh) {
    return aux_g(m, FlowSnapshot::from_u(u, sh));
}
inline Field aux_g_hat(int m, const Field& u, const ShearState& sh, const CutoffSet& cut) {
    return aux_g_hat(m, FlowSnapshot::from_u(u, sh), cut);
}

inline void write_aux_csv(std::ostream& os, const AuxBundle& b) {
    const Grid2D& g = b.f.grid;
    os.precision(17);
    os << "x,y,f,ftilde,h,g,gtilde,ghat\n";
    for (int ix = 0; ix < g.nx; ++ix)
        for (int iy = 0; iy < g.ny; ++iy)
            os << g.x(ix) << ',' << g.y(iy) << ',' << b.f(ix, iy) << ',' << b.ftilde(ix, iy) << ',' << b.h(ix, iy)
               << ',' << b.g(ix, iy) << ',' << b.gtilde(ix, iy) << ',' << b.ghat(ix, iy) << '\n';
}

} // namespace prandtl
