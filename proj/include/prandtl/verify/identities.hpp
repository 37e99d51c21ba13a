#pragma once

// Checks on the initial data and on the discretization itself: the three wall
// compatibility conditions, agreement of the two forms of f_m, and Picard
// against the exponential stepper.

#include "../auxiliary.hpp"
#include "../solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace prandtl::verify {

struct CompatibilityCheck {
    CompatibilityReport residuals;
    double amp = 0.0;
    double tolerance = 0.0; // 1e-8 amp
    bool pass = false;
};

inline CompatibilityCheck compatibility_check(const Field& u0, const ShearProfile& p, double amp) {
    CompatibilityCheck r;
    r.residuals = check_compatibility(u0, p);
    r.amp = amp;
    r.tolerance = 1e-8 * amp;
    r.pass = r.residuals.max() <= r.tolerance + 1e-12;
    return r;
}

// Relative L2 gap between the difference form of f_m and the quotient form
// chi1 (omega^s+omega) d_y(d_x^m u/(omega^s+omega)). Nodes where |W| sits
// below the quotient floor are dropped from both.
inline double cancellation_gap(int m, const FlowSnapshot& s, const CutoffSet& cut, double floor = 1e-8) {
    const Field f = aux_f(m, s, cut).first;
    const Field q = aux_f_quotient_form(m, s, cut, floor);
    Field d = f - q, fm = f;
    const Field& W0 = s.W(0);
    for (size_t k = 0; k < d.values.size(); ++k)
        if (std::abs(W0.values[k]) < floor) d.values[k] = fm.values[k] = 0.0;
    const double nf = weighted_l2(fm, 0.0);
    return nf > 0.0 ? weighted_l2(d, 0.0) / nf : 0.0;
}

struct CancellationLevel {
    double dy = 0.0;
    double gap = 0.0; // max over m and the sampled times
};

struct CancellationReport {
    std::vector<CancellationLevel> levels;
    std::vector<double> orders; // in dy
    double tolerance = 1e-4;
    double required_order = 3.0;
    bool pass = false;
};

// Gap over m in `orders` at the given times of one trajectory.
inline CancellationLevel cancellation_level(const Trajectory& tr, const CutoffSet& cut, const std::vector<int>& orders,
                                            const std::vector<size_t>& indices) {
    CancellationLevel L;
    L.dy = tr.grid().dy();
    for (size_t n : indices) {
        const FlowSnapshot s(tr.u[n], tr.v[n], tr.shear[n]);
        for (int m : orders) L.gap = std::max(L.gap, cancellation_gap(m, s, cut));
    }
    return L;
}

// The first level is the reference resolution; the gap there must meet the
// tolerance and fall at the required order under refinement.
inline CancellationReport summarize_cancellation(std::vector<CancellationLevel> levels) {
    CancellationReport r;
    r.levels = std::move(levels);
    if (r.levels.empty()) return r;
    bool ok = r.levels.front().gap <= r.tolerance;
    for (size_t l = 1; l < r.levels.size(); ++l) {
        const double a = r.levels[l - 1].gap, b = r.levels[l].gap;
        const double o = a > 0.0 && b > 0.0 ? std::log(a / b) / std::log(r.levels[l - 1].dy / r.levels[l].dy) : 0.0;
        r.orders.push_back(o);
        ok = ok && (o >= r.required_order || b <= 1e-12);
    }
    r.pass = ok && r.levels.size() >= 2;
    return r;
}

struct CrossValidationReport {
    double difference = 0.0; // sup |u_picard - u_imex| at the final time
    double u_max = 0.0;
    double dt = 0.0;
    double threshold = 0.0; // max(5 dt |u|_inf, 1e-6)
    bool pass = false;
};

inline CrossValidationReport cross_validate(const Trajectory& picard, const Trajectory& imex) {
    if (picard.size() != imex.size() || !(picard.grid() == imex.grid()))
        throw Error("verify", "cross-validation needs trajectories on the same grids");
    CrossValidationReport r;
    r.difference = linf(picard.u.back() - imex.u.back());
    r.u_max = linf(picard.u.back());
    r.dt = picard.times[1] - picard.times[0];
    r.threshold = std::max(5.0 * r.dt * r.u_max, 1e-6);
    r.pass = picard.converged && r.difference <= r.threshold + 1e-12;
    return r;
}

} // namespace prandtl::verify
