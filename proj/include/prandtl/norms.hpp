#pragma once

#include "auxiliary.hpp"
#include "solver.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace prandtl {

struct GevreyParams {
    double rho = 0.3;
    double sigma = 1.75;
    double ell = 2.25;
    double alpha = 2.0;
    int Mmax = 10;
    // Width of the band below Ymax left out of every weighted norm: the
    // Dirichlet end there is an artifact of truncating the half-line, and the
    // polynomial weights would amplify its thin layer.
    double far_band = 5.0;

    void validate() const {
        if (!(rho > 0.0)) throw Error("norms", "rho must be positive");
        if (!(sigma >= 1.5 && sigma <= 2.0)) throw Error("norms", "sigma must lie in [1.5, 2]");
        if (!(ell > 1.5)) throw Error("norms", "ell must exceed 3/2");
        if (!(alpha <= ell && ell < alpha + 0.5))
            throw Error("norms", "ell must satisfy alpha <= ell < alpha + 1/2");
        if (Mmax < 7) throw Error("norms", "Mmax must be at least 7");
    }
    void validate(const Grid2D& g) const {
        validate();
        if (Mmax > g.nx / 4) throw Error("norms", "Mmax must not exceed Nx/4");
        if (!(far_band >= 0.0 && far_band < 0.5 * g.ymax)) throw Error("norms", "far_band must lie in [0, Ymax/2)");
    }
    // Upper end of the y-range the norms see.
    double y_top(const Grid2D& g) const { return g.ymax - far_band; }
};

// rho^{m-5} / ((m-6)!)^sigma for m >= 6, 1 below.
inline double gevrey_weight(int m, double rho, double sigma) {
    if (m < 6) return 1.0;
    return std::pow(rho, m - 5) / std::pow(std::tgamma(m - 5.0), sigma);
}

// One supremand before weighting. `order` is the index the weight uses
// (m, or i + j for the mixed group).
struct NormTerm {
    std::string group;
    int i = 0;
    int j = 0;
    int order = 0;
    double raw = 0.0;
};

struct NormEntry {
    std::string group;
    int i = 0;
    int j = 0;
    double value = 0.0; // weighted
};

struct NormReport {
    double total = 0.0;
    double gevrey = 0.0; // the Gevrey part alone
    std::vector<std::pair<std::string, double>> groups;
    std::vector<NormEntry> entries;
    NormEntry argmax;
    NormEntry aux_argmax;
    // Largest ratio between the weighted Mmax entry and its group supremum;
    // below 1 means every truncated supremum is attained inside the range.
    double tail_ratio = 0.0;
    int Mmax = 0;
};

// Raw norm ingredients of one field, reusable for any (rho, sigma).
struct NormTerms {
    std::vector<NormTerm> terms;
    bool has_aux = false;
    int Mmax = 0;

    NormReport evaluate(double rho, double sigma) const;
    double total(double rho, double sigma) const { return evaluate(rho, sigma).total; }
};

namespace detail {

inline double weighted_modes_y(const XSpectrum& s, int m, const YArray& w2) {
    YArray e = s.x_energy(m);
    for (int iy = 0; iy < s.grid.ny; ++iy) e[iy] *= w2[iy];
    return std::sqrt(integrate_y(s.grid, e));
}

// (1+y)^{2 ell} up to y_top, zero beyond.
inline YArray power_weights(const Grid2D& g, double ell, double y_top) {
    YArray w(g.ny, 0.0);
    for (int j = 0; j < g.ny && g.y(j) <= y_top + 1e-12; ++j) w[j] = std::pow(1.0 + g.y(j), 2.0 * ell);
    return w;
}

inline double weighted_l2(const Field& f, const YArray& w2) {
    const Grid2D& g = f.grid;
    YArray col(g.ny, 0.0);
    for (int ix = 0; ix < g.nx; ++ix) {
        const double* r = f.row(ix);
        for (int iy = 0; iy < g.ny; ++iy) col[iy] += r[iy] * r[iy];
    }
    for (int iy = 0; iy < g.ny; ++iy) col[iy] *= g.dx() * w2[iy];
    return std::sqrt(integrate_y(g, col));
}

} // namespace detail

// Gevrey ingredients, every x-norm by Parseval from the y-derivative spectra.
inline void gevrey_terms(const FlowSnapshot& s, const GevreyParams& p, NormTerms& out) {
    p.validate(s.grid());
    out.Mmax = p.Mmax;
    const Grid2D& g = s.grid();
    const double top = p.y_top(g);
    const YArray w0 = detail::power_weights(g, p.ell - 1.0, top);
    const YArray w1 = detail::power_weights(g, p.ell, top);
    const YArray w2 = detail::power_weights(g, p.ell + 1.0, top);
    for (int m = 0; m <= p.Mmax; ++m) {
        out.terms.push_back({"tangential", m, 0, m, detail::weighted_modes_y(s.spectrum(0), m, w0)});
        out.terms.push_back({"tangential_dy", m, 1, m, detail::weighted_modes_y(s.spectrum(1), m, w1)});
    }
    for (int j = 1; j <= 4; ++j)
        for (int i = 0; i + j <= p.Mmax; ++i)
            out.terms.push_back({"mixed", i, j, i + j, detail::weighted_modes_y(s.spectrum(j + 1), i, w2)});
}

// The four auxiliary supremands for 1 <= m <= Mmax.
inline void aux_terms(const FlowSnapshot& s, const CutoffSet& cut, const GevreyParams& p, NormTerms& out,
                      const AuxOptions& opt = {}) {
    out.has_aux = true;
    const Grid2D& g = s.grid();
    const XSpectrum gb = XSpectrum::of(g_bracket(s));
    const double top = p.y_top(g);
    const YArray ones = detail::power_weights(g, 0.0, top);
    const YArray wf = detail::power_weights(g, p.ell, top);
    YArray chi2sq(g.ny);
    for (int j = 0; j < g.ny; ++j) chi2sq[j] = cut.chi2.d[0][j] * cut.chi2.d[0][j];
    for (int m = 1; m <= p.Mmax; ++m) {
        out.terms.push_back({"g", m, 0, m, m * detail::weighted_modes_y(gb, m - 1, ones)});
        out.terms.push_back({"f", m, 0, m, detail::weighted_l2(aux_f(m, s, cut, opt).first, wf)});
        out.terms.push_back({"h", m, 0, m, detail::weighted_l2(aux_h(m, s, cut, opt), ones)});
        out.terms.push_back({"chi2_dy_omega", m, 0, m, detail::weighted_modes_y(s.spectrum(2), m, chi2sq)});
    }
}

inline NormReport NormTerms::evaluate(double rho, double sigma) const {
    NormReport r;
    r.Mmax = Mmax;
    double G1 = 0, G2 = 0, G4 = 0, G5 = 0, A2 = 0;
    std::vector<double> low(6, 0.0), auxlow(6, 0.0), auxhigh(Mmax + 1, 0.0);
    double last_ratio = 0.0;
    double tail[3] = {0, 0, 0}; // weighted Mmax entries of the tangential and mixed groups
    for (const auto& t : terms) {
        const double w = gevrey_weight(t.order, rho, sigma);
        const double v = w * t.raw;
        r.entries.push_back({t.group, t.i, t.j, v});
        const bool high = t.order >= 6;
        if (t.group == "tangential" || t.group == "tangential_dy") {
            if (high) {
                (t.group == "tangential" ? G1 : G2) = std::max(t.group == "tangential" ? G1 : G2, v);
                if (t.order == Mmax) tail[t.group == "tangential" ? 0 : 1] = v;
            } else {
                low[t.order] += v;
            }
        } else if (t.group == "mixed") {
            if (high) {
                G4 = std::max(G4, v);
                if (t.order == Mmax) tail[2] = std::max(tail[2], v);
            } else {
                G5 = std::max(G5, v);
            }
        } else {
            if (high) auxhigh[t.order] += v;
            else auxlow[t.order] += v;
        }
    }
    double G3 = 0, A1 = 0;
    for (double v : low) G3 = std::max(G3, v);
    for (double v : auxlow) A1 = std::max(A1, v);
    for (double v : auxhigh) A2 = std::max(A2, v);
    r.groups = {{"tangential_high", G1}, {"tangential_dy_high", G2}, {"tangential_low", G3},
                {"mixed_high", G4},     {"mixed_low", G5}};
    r.gevrey = G1 + G2 + G3 + G4 + G5;
    r.total = r.gevrey;
    if (has_aux) {
        r.groups.push_back({"aux_low", A1});
        r.groups.push_back({"aux_high", A2});
        r.total += A1 + A2;
        if (A2 > 0) last_ratio = auxhigh[Mmax] / A2;
    }
    if (G1 > 0) last_ratio = std::max(last_ratio, tail[0] / G1);
    if (G2 > 0) last_ratio = std::max(last_ratio, tail[1] / G2);
    if (G4 > 0) last_ratio = std::max(last_ratio, tail[2] / G4);
    r.tail_ratio = last_ratio;
    double best = -1, best_aux = -1;
    for (const auto& e : r.entries) {
        if (e.value > best) {
            best = e.value;
            r.argmax = e;
        }
        const bool aux = e.group == "g" || e.group == "f" || e.group == "h" || e.group == "chi2_dy_omega";
        if (aux && e.value > best_aux) {
            best_aux = e.value;
            r.aux_argmax = e;
        }
    }
    return r;
}

inline NormTerms gevrey_norm_terms(const Field& u, const GevreyParams& p) {
    // No shear is needed for the pure-derivative groups.
    ShearState zero;
    for (auto& a : zero.d) a.assign(u.grid.ny, 0.0);
    NormTerms t;
    gevrey_terms(FlowSnapshot(u, Field(u.grid), zero), p, t);
    return t;
}

inline NormReport gevrey_norm(const Field& u, const GevreyParams& p) {
    return gevrey_norm_terms(u, p).evaluate(p.rho, p.sigma);
}

inline NormTerms full_norm_terms(const FlowSnapshot& s, const CutoffSet& cut, const GevreyParams& p,
                                 const AuxOptions& opt = {}) {
    NormTerms t;
    gevrey_terms(s, p, t);
    aux_terms(s, cut, p, t, opt);
    return t;
}

inline NormReport full_norm(const FlowSnapshot& s, const CutoffSet& cut, const GevreyParams& p) {
    return full_norm_terms(s, cut, p).evaluate(p.rho, p.sigma);
}

inline NormReport full_norm(const Field& u, const ShearState& sh, const CutoffSet& cut, const GevreyParams& p) {
    return full_norm(FlowSnapshot::from_u(u, sh), cut, p);
}

// Full-norm ingredients at every stored time of a trajectory.
inline std::vector<NormTerms> trajectory_norm_terms(const Trajectory& tr, const CutoffSet& cut, const GevreyParams& p) {
    std::vector<NormTerms> out;
    out.reserve(tr.size());
    for (size_t n = 0; n < tr.size(); ++n)
        out.push_back(full_norm_terms(FlowSnapshot(tr.u[n], tr.v[n], tr.shear[n]), cut, p));
    return out;
}

struct LifespanResult {
    double value = 0.0;
    double rho = 0.0; // maximizing pair
    double t = 0.0;
};

// sup over rho in a 16-point grid of (0, rho0) and stored t <= T with
// rho + lambda t < rho0 of sqrt((rho0 - rho - lambda t)/(rho0 - rho)) |u(t)|_rho.
inline LifespanResult lifespan_norm(const std::vector<NormTerms>& terms, const std::vector<double>& times,
                                    double lambda, double T, double sigma, double rho0) {
    if (T > rho0 / lambda + 1e-15) throw Error("norms", "lifespan horizon must satisfy T <= rho0/lambda");
    LifespanResult r;
    for (int k = 1; k <= 16; ++k) {
        const double rho = rho0 * k / 17.0;
        for (size_t n = 0; n < times.size(); ++n) {
            const double t = times[n];
            if (t > T + 1e-15) break;
            const double room = rho0 - rho - lambda * t;
            if (room <= 0.0) continue;
            const double v = std::sqrt(room / (rho0 - rho)) * terms[n].total(rho, sigma);
            if (v > r.value) r = {v, rho, t};
        }
    }
    return r;
}

inline LifespanResult lifespan_norm(const Trajectory& tr, const CutoffSet& cut, double lambda, double T,
                                    const GevreyParams& p, double rho0) {
    return lifespan_norm(trajectory_norm_terms(tr, cut, p), tr.times, lambda, T, p.sigma, rho0);
}

} // namespace prandtl
