#pragma once

#include "profiles.hpp"

#include <array>
#include <ostream>
#include <string>
#include <vector>

namespace prandtl {

// Shear flow u^s(t, .) on the y-nodes with d[0] = u^s, d[1] = omega^s and
// d[k] = d_y^{k-1} omega^s for k = 2..6.
struct ShearState {
    double t = 0.0;
    std::array<YArray, 7> d;
    std::vector<std::string> warnings;

    const YArray& us() const { return d[0]; }
    const YArray& omegas() const { return d[1]; }
    // d_y^j omega^s, j = 0..5
    const YArray& domegas(int j) const { return d[j + 1]; }
};

// Heat evolution on the half-line with u^s(t,0) = 0 and limit 1 at infinity.
// The lift erf(y/2) evolves in closed form to erf(y/(2 sqrt(1+t))); the
// remainder r = u0s - erf(y/2) is propagated by the odd-extension kernel
// G(y-z) - G(y+z). y-derivatives are moved onto r (odd orders pick up the
// even image kernel) and the jumps of the odd extension's even derivatives at
// 0 contribute explicit kernel terms.
inline ShearState evolve_shear(const ShearProfile& p, double t) {
    if (!(t >= 0.0)) throw Error("shear", "time must be non-negative");
    const Grid2D& g = p.grid;
    ShearState s;
    s.t = t;
    if (t == 0.0) {
        s.d = p.d;
        return s;
    }
    const double sig = std::sqrt(2.0 * t);
    if (3.0 * sig > g.ymax / 4.0)
        s.warnings.push_back("kernel width exceeds Ymax/4; truncation unsafe");

    const double a0 = 2.0, at = 2.0 * std::sqrt(1.0 + t);
    auto r = [&](double z, int k) { return p.eval(z, k) - p.limit * erf_derivative(z, a0, k); };

    // Panel nodes shared by every target y.
    const double hp = std::min(0.5 * sig, 0.1);
    const double reach = 12.0 * sig;
    const int npanel = static_cast<int>(std::ceil((g.ymax + reach) / hp));
    const auto& gl = GaussLegendre10::get();
    const size_t nq = static_cast<size_t>(npanel) * 10;
    std::vector<double> z(nq), w(nq);
    std::array<std::vector<double>, 7> rk;
    for (auto& v : rk) v.resize(nq);
    for (int ip = 0; ip < npanel; ++ip)
        for (int i = 0; i < 10; ++i) {
            const size_t q = static_cast<size_t>(ip) * 10 + i;
            z[q] = (ip + 0.5) * hp + 0.5 * hp * gl.x[i];
            w[q] = 0.5 * hp * gl.w[i];
            for (int k = 0; k <= 6; ++k) rk[k][q] = r(z[q], k);
        }

    // Jumps 2 r^{(n)}(0) of the odd extension, n even.
    std::array<double, 7> jump{};
    for (int n = 0; n <= 4; n += 2) jump[n] = 2.0 * r(0.0, n);

    const double norm = 1.0 / std::sqrt(4.0 * std::numbers::pi * t);
    for (auto& v : s.d) v.assign(g.ny, 0.0);
    for (int j = 0; j < g.ny; ++j) {
        const double y = g.y(j);
        const int p0 = std::max(0, static_cast<int>(std::floor((y - reach) / hp)));
        const int p1 = std::min(npanel, static_cast<int>(std::ceil((y + reach) / hp)) + 1);
        std::array<double, 7> acc{};
        for (size_t q = static_cast<size_t>(p0) * 10; q < static_cast<size_t>(p1) * 10; ++q) {
            const double gm = std::exp(-(y - z[q]) * (y - z[q]) / (4.0 * t));
            const double gp = std::exp(-(y + z[q]) * (y + z[q]) / (4.0 * t));
            const double even = w[q] * (gm - gp), odd = w[q] * (gm + gp);
            for (int k = 0; k <= 6; k += 2) acc[k] += even * rk[k][q];
            for (int k = 1; k <= 6; k += 2) acc[k] += odd * rk[k][q];
        }
        for (int k = 0; k <= 6; ++k) {
            double v = norm * acc[k] + p.limit * erf_derivative(y, at, k);
            for (int n = 0; n < k; n += 2)
                if (jump[n] != 0.0) v += jump[n] * heat_kernel_derivative(t, y, k - 1 - n);
            s.d[k][j] = v;
        }
    }
    s.d[0][0] = 0.0;
    return s;
}

// ------------------------------------------------------------ persistence

struct ShearClauseReport {
    double t = 0.0;
    std::array<bool, 3> holds{false, false, false};
    // Smallest slack of each clause over the nodes (negative when violated).
    std::array<double, 3> slack{};
};

struct PropositionReport {
    std::vector<ShearClauseReport> scan;
    double Ts = 0.0;            // largest scanned time up to which all clauses hold
    bool inconsistent = false;  // clauses already fail at t = 0
    double T_scan = 0.5;
    double step = 1e-2;
};

// Relaxed Assumption constants at one time: |d_y omega^s| >= c0/2 near y0,
// c1/2 <y>^-a <= |omega^s| <= 2/c1 <y>^-a off the 5 delta/4 band, and
// |d_y^j omega^s| <= 2/c1 <y>^{-a-1} for 1 <= j <= 5.
inline ShearClauseReport check_shear_clauses(const ShearState& s, const ShearProfile& p,
                                             const AssumptionReport& rep) {
    const double slack = 1e-12;
    const Grid2D& g = p.grid;
    const double y0 = p.y0, dl = rep.delta, c0 = rep.c0, c1 = rep.c1, a = p.alpha;
    ShearClauseReport out;
    out.t = s.t;
    std::array<double, 3> m{1e300, 1e300, 1e300};
    for (int j = 0; j < g.ny; ++j) {
        const double y = g.y(j), br = 1.0 + y;
        if (y >= y0 - 1.75 * dl && y <= y0 + 1.75 * dl)
            m[0] = std::min(m[0], std::abs(s.domegas(1)[j]) - 0.5 * c0);
        if (y <= y0 - 1.25 * dl || y >= y0 + 1.25 * dl) {
            const double om = std::abs(s.omegas()[j]);
            const double wa = std::pow(br, -a);
            m[1] = std::min({m[1], om - 0.5 * c1 * wa, 2.0 / c1 * wa - om});
        }
        const double bound = 2.0 / c1 * std::pow(br, -a - 1.0);
        for (int k = 1; k <= 5; ++k) m[2] = std::min(m[2], bound - std::abs(s.domegas(k)[j]));
    }
    for (int i = 0; i < 3; ++i) {
        out.slack[i] = m[i];
        out.holds[i] = m[i] >= -slack;
    }
    return out;
}

inline PropositionReport check_proposition_shear(const ShearProfile& p, const AssumptionReport& rep,
                                                 double T_scan = 0.5, double step = 1e-2) {
    if (!rep.all()) throw Error("shear", "assumption report does not pass all clauses");
    PropositionReport out;
    out.T_scan = T_scan;
    out.step = step;
    const int n = static_cast<int>(std::lround(T_scan / step));
    bool alive = true;
    for (int i = 0; i <= n; ++i) {
        const double t = i * step;
        auto c = check_shear_clauses(evolve_shear(p, t), p, rep);
        const bool ok = c.holds[0] && c.holds[1] && c.holds[2];
        out.scan.push_back(c);
        if (i == 0 && !ok) out.inconsistent = true;
        if (alive && ok) out.Ts = t;
        if (!ok) alive = false;
        if (!alive) break;
    }
    return out;
}

inline void write_shear_csv(std::ostream& os, const ShearState& s, const Grid2D& g) {
    os.precision(17);
    os << "y,us,omegas,d1,d2,d3,d4,d5\n";
    for (int j = 0; j < g.ny; ++j) {
        os << g.y(j);
        for (int k = 0; k <= 6; ++k) os << ',' << s.d[k][j];
        os << '\n';
    }
}

} // namespace prandtl
