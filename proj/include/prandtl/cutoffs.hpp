#pragma once

#include "grid.hpp"

#include <array>
#include <cmath>

namespace prandtl {

// C-infinity step sigma(s) = e^{-1/s} / (e^{-1/s} + e^{-1/(1-s)}) on (0,1),
// 0 below and 1 above, with its first two derivatives.
inline std::array<double, 3> smooth_step(double s) {
    if (s <= 0.0) return {0.0, 0.0, 0.0};
    if (s >= 1.0) return {1.0, 0.0, 0.0};
    const double g = 1.0 / s - 1.0 / (1.0 - s);
    const double g1 = -1.0 / (s * s) - 1.0 / ((1.0 - s) * (1.0 - s));
    const double g2 = 2.0 / (s * s * s) - 2.0 / ((1.0 - s) * (1.0 - s) * (1.0 - s));
    // sigma = 1/(1 + e^g), evaluated without overflow.
    const double sg = g > 0 ? std::exp(-g) / (1.0 + std::exp(-g)) : 1.0 / (1.0 + std::exp(g));
    const double L = sg * (1.0 - sg);
    if (L == 0.0) return {sg, 0.0, 0.0};
    const double d1 = -L * g1;
    const double d2 = -d1 * (1.0 - 2.0 * sg) * g1 - L * g2;
    return {sg, d1, d2};
}

// Value and first two y-derivatives on the grid.
struct CutoffProfile {
    std::array<YArray, 3> d;
    const YArray& value() const { return d[0]; }
};

// chi1 separates the monotone region from the critical strip, chi2 covers the
// strip, psi is 1 up to y0 + 2 delta and vanishes beyond y0 + 3 delta.
struct CutoffSet {
    double y0 = 0.0;
    double delta = 0.0;
    CutoffProfile chi1, chi2, psi;
};

inline CutoffSet build_cutoffs(const Grid2D& g, double y0, double delta) {
    if (!(delta > 0.0) || !(delta < y0 / 2.0))
        throw Error("cutoffs", "delta must lie in (0, y0/2)");
    if (!(y0 + 3.0 * delta < g.ymax))
        throw Error("cutoffs", "transition bands do not fit below Ymax (need y0 + 3 delta < Ymax)");
    CutoffSet c;
    c.y0 = y0;
    c.delta = delta;
    for (auto* p : {&c.chi1, &c.chi2, &c.psi})
        for (auto& a : p->d) a.assign(g.ny, 0.0);

    const double band = 0.25 * delta, sb = 1.0 / band;
    for (int j = 0; j < g.ny; ++j) {
        const double y = g.y(j);
        const double r = std::abs(y - y0);
        const double sgn = y >= y0 ? 1.0 : -1.0;

        // chi1: 0 for r <= 5 delta/4, 1 for r >= 3 delta/2.
        if (r >= 1.5 * delta) {
            c.chi1.d[0][j] = 1.0;
        } else if (r > 1.25 * delta) {
            const auto s = smooth_step((r - 1.25 * delta) * sb);
            c.chi1.d[0][j] = s[0];
            c.chi1.d[1][j] = sgn * s[1] * sb;
            c.chi1.d[2][j] = s[2] * sb * sb;
        }

        // chi2: 1 for r <= 3 delta/2, 0 for r >= 7 delta/4.
        if (r <= 1.5 * delta) {
            c.chi2.d[0][j] = 1.0;
        } else if (r < 1.75 * delta) {
            const auto s = smooth_step((r - 1.5 * delta) * sb);
            c.chi2.d[0][j] = 1.0 - s[0];
            c.chi2.d[1][j] = -sgn * s[1] * sb;
            c.chi2.d[2][j] = -s[2] * sb * sb;
        }

        // psi: 1 on [0, y0 + 2 delta], 0 beyond y0 + 3 delta.
        const double yp = y - y0 - 2.0 * delta;
        if (yp <= 0.0) {
            c.psi.d[0][j] = 1.0;
        } else if (yp < delta) {
            const auto s = smooth_step(yp / delta);
            c.psi.d[0][j] = 1.0 - s[0];
            c.psi.d[1][j] = -s[1] / delta;
            c.psi.d[2][j] = -s[2] / (delta * delta);
        }
    }
    return c;
}

} // namespace prandtl
