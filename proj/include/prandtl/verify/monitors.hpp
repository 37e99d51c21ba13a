#pragma once

#include "../norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace prandtl::verify {

// ------------------------------------------------------------ conditions along a trajectory

struct CondiReport {
    bool pass = false;
    std::optional<double> failure_time;
    std::string failed_clause;
    // Smallest slack of each clause over the horizon (negative when violated).
    std::array<double, 4> min_slack{};
    double max_derivative_sum = 0.0;
};

// The four clauses at one time: c0/4 floor on |W_y| near y0, two-sided
// c1 bounds on |W| off the strip, 4/c1 <y>^{-a-1} bound on |W_y|, and the unit
// bound on the weighted L-infinity norms of low x-derivatives.
inline std::array<double, 4> condi_slack(const FlowSnapshot& s, const ShearProfile& p, const AssumptionReport& rep,
                                         const GevreyParams& gp, double* derivative_sum = nullptr) {
    const double ell = gp.ell;
    const Grid2D& g = s.grid();
    const double y0 = p.y0, dl = rep.delta, c0 = rep.c0, c1 = rep.c1, a = p.alpha;
    std::array<double, 4> m{1e300, 1e300, 1e300, 0.0};
    const Field &W0 = s.W(0), &W1 = s.W(1);
    for (int iy = 0; iy < g.ny; ++iy) {
        const double y = g.y(iy), br = 1.0 + y;
        const bool strip = y >= y0 - 1.75 * dl && y <= y0 + 1.75 * dl;
        const bool off = y <= y0 - 1.25 * dl || y >= y0 + 1.25 * dl;
        const double wa = std::pow(br, -a), bound = 4.0 / c1 * std::pow(br, -a - 1.0);
        for (int ix = 0; ix < g.nx; ++ix) {
            const double w0 = std::abs(W0(ix, iy)), w1 = std::abs(W1(ix, iy));
            if (strip) m[0] = std::min(m[0], w1 - 0.25 * c0);
            if (off) m[1] = std::min({m[1], w0 - 0.25 * c1 * wa, 4.0 / c1 * wa - w0});
            m[2] = std::min(m[2], bound - w1);
        }
    }
    const double top = gp.y_top(g) + 1e-12;
    auto wsup = [&](const Field& f, double power) {
        double r = 0.0;
        for (int ix = 0; ix < g.nx; ++ix)
            for (int iy = 0; iy < g.ny && g.y(iy) <= top; ++iy)
                r = std::max(r, std::pow(1.0 + g.y(iy), power) * std::abs(f(ix, iy)));
        return r;
    };
    double sum = 0.0;
    for (int j = 1; j <= 2; ++j)
        sum += wsup(s.X(0, j), ell - 1.0) + wsup(s.Xv(j - 1), 0.0) + wsup(s.X(1, j), ell);
    for (int i = 1; i <= 2; ++i)
        for (int j = 1; j <= 2; ++j) sum += wsup(s.X(j + 1, i), ell + 1.0);
    m[3] = 1.0 - sum;
    if (derivative_sum) *derivative_sum = sum;
    return m;
}

inline CondiReport condi_monitor(const Trajectory& tr, const ShearProfile& p, const AssumptionReport& rep,
                                 const GevreyParams& gp) {
    const double slack = 1e-12;
    static const char* names[4] = {"near-critical floor on |d_y W|", "two-sided bound on |W| off the strip",
                                   "decay bound on |d_y W|", "unit bound on derivative norms"};
    CondiReport r;
    r.min_slack.fill(1e300);
    for (size_t n = 0; n < tr.size(); ++n) {
        double sum = 0.0;
        const auto m = condi_slack(FlowSnapshot(tr.u[n], tr.v[n], tr.shear[n]), p, rep, gp, &sum);
        r.max_derivative_sum = std::max(r.max_derivative_sum, sum);
        for (int i = 0; i < 4; ++i) {
            r.min_slack[i] = std::min(r.min_slack[i], m[i]);
            if (m[i] < -slack && !r.failure_time) {
                r.failure_time = tr.times[n];
                r.failed_clause = names[i];
            }
        }
    }
    r.pass = !r.failure_time.has_value();
    return r;
}

// ------------------------------------------------------------ energy inequality

struct EnergyReport {
    double rho = 0.0, rho_tilde = 0.0;
    std::vector<double> times;
    std::vector<double> lhs;       // |u(t)|_rho^2
    std::vector<double> initial;   // |u0|_rho^2
    std::vector<double> nonlinear; // int_0^t (|u|^2 + |u|^4)
    std::vector<double> loss;      // int_0^t |u|_rt^2 / (rt - rho)
    std::vector<double> C;         // lhs / (initial + nonlinear + loss)
    double max_C = 0.0;
    bool vacuous = false; // every right-hand side is zero
    bool pass = false;
};

// Norm values per stored time for the two radii, from precomputed ingredients.
inline EnergyReport energy_monitor(const std::vector<NormTerms>& terms, const std::vector<double>& times, double rho,
                                   double rho_tilde, double sigma) {
    if (!(rho > 0.0 && rho < rho_tilde)) throw Error("verify", "energy monitor needs 0 < rho < rho_tilde");
    EnergyReport r;
    r.rho = rho;
    r.rho_tilde = rho_tilde;
    r.times = times;
    const size_t n = times.size();
    std::vector<double> a(n), b(n);
    for (size_t i = 0; i < n; ++i) {
        a[i] = terms[i].total(rho, sigma);
        b[i] = terms[i].total(rho_tilde, sigma);
    }
    double I1 = 0.0, I2 = 0.0;
    bool any = false;
    for (size_t i = 0; i < n; ++i) {
        if (i > 0) {
            const double h = times[i] - times[i - 1];
            auto f1 = [&](size_t k) { return a[k] * a[k] + std::pow(a[k], 4); };
            auto f2 = [&](size_t k) { return b[k] * b[k] / (rho_tilde - rho); };
            I1 += 0.5 * h * (f1(i - 1) + f1(i));
            I2 += 0.5 * h * (f2(i - 1) + f2(i));
        }
        const double lhs = a[i] * a[i], init = a[0] * a[0];
        const double rhs = init + I1 + I2;
        r.lhs.push_back(lhs);
        r.initial.push_back(init);
        r.nonlinear.push_back(I1);
        r.loss.push_back(I2);
        const double c = rhs > 0.0 ? lhs / rhs : 0.0;
        any = any || rhs > 0.0;
        r.C.push_back(c);
        r.max_C = std::max(r.max_C, c);
    }
    r.vacuous = !any;
    r.pass = std::isfinite(r.max_C);
    return r;
}

// ------------------------------------------------------------ norm sandwich

struct SandwichReport {
    double rho = 0.0, rho_star = 0.0;
    double C = 0.0;           // max over the family of |u|_rho / (||u||_rho* + ||u||_rho*^2)
    int lower_violations = 0; // ||u||_rho > |u|_rho
    int members = 0;
    bool pass = false;
};

inline SandwichReport sandwich_fit(const std::vector<NormTerms>& family, double rho, double rho_star, double sigma) {
    const double slack = 1e-12;
    SandwichReport r;
    r.rho = rho;
    r.rho_star = rho_star;
    for (const auto& t : family) {
        const NormReport lo = t.evaluate(rho, sigma);
        const NormReport hi = t.evaluate(rho_star, sigma);
        const double denom = hi.gevrey + hi.gevrey * hi.gevrey;
        ++r.members;
        if (lo.gevrey > lo.total + slack) ++r.lower_violations;
        if (denom > 0.0) r.C = std::max(r.C, lo.total / denom);
    }
    r.pass = r.lower_violations == 0 && std::isfinite(r.C);
    return r;
}

// ------------------------------------------------------------ radius decay

struct RadiusReport {
    double C_star = 1.0;
    double C_hat = 1.0;
    double R = 0.0;
    double lambda = 0.0;
    double T_allowed = 0.0; // rho0 / (4 lambda)
    double T_checked = 0.0;
    bool restricted = false; // computed horizon shorter than T_allowed
    double lifespan = 0.0;
    double margin = 0.0; // R - lifespan
    bool pass = false;
};

// lambda from sqrt(5C + C R^2) / sqrt(lambda) = 1/2.
inline double radius_lambda(double C_star, double R) { return 4.0 * (5.0 * C_star + C_star * R * R); }

inline RadiusReport radius_decay_check(const std::vector<NormTerms>& terms, const std::vector<double>& times,
                                       double fitted_energy_C, double sigma, double rho0) {
    const double slack = 1e-12;
    RadiusReport r;
    r.C_star = std::max(1.0, fitted_energy_C);
    const NormTerms& t0 = terms.front();
    const double top = t0.total(rho0, sigma);
    const NormReport far = t0.evaluate(2.0 * rho0, sigma);
    const double init = far.gevrey + far.gevrey * far.gevrey;
    r.C_hat = init > 0.0 ? std::max(1.0, top / init) : 1.0;
    r.R = 4.0 * r.C_star * r.C_hat * init;
    r.lambda = radius_lambda(r.C_star, r.R);
    r.T_allowed = rho0 / (4.0 * r.lambda);
    r.T_checked = std::min(r.T_allowed, times.back());
    r.restricted = times.back() < r.T_allowed;
    r.lifespan = lifespan_norm(terms, times, r.lambda, r.T_checked, sigma, rho0).value;
    r.margin = r.R - r.lifespan;
    r.pass = r.lifespan <= r.R + slack;
    return r;
}

// ------------------------------------------------------------ Picard contraction

struct ContractionReport {
    std::vector<double> ratios; // ||xi_{j+1}|| / ||xi_j|| for j >= 2 above the rounding floor
    double rate = 0.0;          // geometric fit exp(slope of log ||xi_j||)
    double max_ratio = 0.0;
    bool inconclusive = false;
    bool converged = false;
    bool pass = false;
};

inline ContractionReport picard_contraction_check(const Trajectory& tr) {
    ContractionReport r;
    r.converged = tr.converged;
    const auto& xi = tr.contraction;
    if (tr.scheme != Scheme::picard || xi.size() < 3) {
        r.inconclusive = true;
        return r;
    }
    // Differences at rounding level carry no contraction information.
    const double floor = 1e-13 * xi.front();
    std::vector<double> lx, ly;
    for (size_t j = 1; j < xi.size(); ++j) {
        if (xi[j] <= floor) break;
        lx.push_back(static_cast<double>(j));
        ly.push_back(std::log(xi[j]));
        if (j + 1 < xi.size() && xi[j + 1] > floor) r.ratios.push_back(xi[j + 1] / xi[j]);
    }
    for (double q : r.ratios) r.max_ratio = std::max(r.max_ratio, q);
    if (lx.size() >= 2) {
        double mx = 0, my = 0;
        for (size_t i = 0; i < lx.size(); ++i) mx += lx[i], my += ly[i];
        mx /= lx.size();
        my /= ly.size();
        double sxy = 0, sxx = 0;
        for (size_t i = 0; i < lx.size(); ++i) sxy += (lx[i] - mx) * (ly[i] - my), sxx += (lx[i] - mx) * (lx[i] - mx);
        r.rate = std::exp(sxy / sxx);
    } else {
        r.rate = xi.size() >= 2 ? xi[1] / xi[0] : 0.0;
    }
    r.inconclusive = r.ratios.empty() && lx.size() < 2;
    r.pass = r.converged && r.max_ratio <= 0.75 + 1e-12;
    return r;
}

} // namespace prandtl::verify
