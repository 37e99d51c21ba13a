#pragma once

#include "../grid.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace prandtl::verify {

struct SobolevReport {
    int count = 0;
    int violations = 0;
    double max_ratio = 0.0; // linf / (sqrt2 * sum of the four L2 norms)
    bool pass = false;
};

// sup|h| against sqrt2 (||h|| + ||h_x|| + ||h_y|| + ||h_xy||) for one field.
inline double sobolev_ratio(const Field& h) {
    const Field hx = dx_m(h, 1);
    const Field hy = dy_j(h, 1);
    const Field hxy = dy_j(hx, 1);
    const double rhs = std::sqrt(2.0) * (weighted_l2(h, 0.0) + weighted_l2(hx, 0.0) + weighted_l2(hy, 0.0) +
                                         weighted_l2(hxy, 0.0));
    const double lhs = linf(h);
    return rhs > 0.0 ? lhs / rhs : 0.0;
}

// Band-limited in x (modes 0..4), polynomial times exponential in y.
inline Field random_decaying_field(const Grid2D& g, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> coef(-1.0, 1.0), rate(0.5, 3.0), shift(0.0, 3.0);
    std::uniform_int_distribution<int> power(0, 3);
    const int K = 4;
    std::vector<double> a(K + 1), b(K + 1), c(K + 1), y0(K + 1);
    std::vector<int> p(K + 1);
    for (int k = 0; k <= K; ++k) {
        a[k] = coef(rng);
        b[k] = coef(rng);
        c[k] = rate(rng);
        y0[k] = shift(rng);
        p[k] = power(rng);
    }
    const double kx = 2.0 * std::numbers::pi / g.lx;
    return Field::sample(g, [&](double x, double y) {
        double s = 0.0;
        for (int k = 0; k <= K; ++k) {
            const double prof = std::pow(y, p[k]) * std::exp(-c[k] * (y - y0[k]) * (y - y0[k]) / 4.0 - c[k] * y);
            s += (a[k] * std::cos(k * kx * x) + b[k] * std::sin(k * kx * x)) * prof;
        }
        return s;
    });
}

inline SobolevReport sobolev_check(const Grid2D& g, int count, std::uint64_t seed) {
    if (count < 1) throw Error("verify", "sobolev_check needs count >= 1");
    const double slack = 1e-12;
    std::mt19937_64 rng(seed);
    SobolevReport r;
    r.count = count;
    for (int i = 0; i < count; ++i) {
        const Field h = random_decaying_field(g, rng);
        const double ratio = sobolev_ratio(h);
        r.max_ratio = std::max(r.max_ratio, ratio);
        if (ratio > 1.0 + slack) ++r.violations;
    }
    r.pass = r.violations == 0;
    return r;
}

struct InequalityReport {
    int factorial_checked = 0;
    int factorial_violations = 0;
    int ratio_checked = 0;
    int ratio_violations = 0;
    double ratio_max_margin_used = 0.0; // largest lhs/rhs over the (iii) grid
    bool pass = false;
};

// p! q! <= (p+q)! exactly for 0 <= p, q <= 20, and
// k (rho/rt)^k <= k (rho/rt)^k / rt <= 1/(rt - rho) for k = 1..60 and
// 0 < rho < rt <= 1 on a 0.05 grid.
inline InequalityReport inequality_suite() {
    using boost::multiprecision::cpp_int;
    const double slack = 1e-12;
    InequalityReport r;
    std::vector<cpp_int> fact(41);
    fact[0] = 1;
    for (int n = 1; n <= 40; ++n) fact[n] = fact[n - 1] * n;
    for (int p = 0; p <= 20; ++p)
        for (int q = 0; q <= 20; ++q) {
            ++r.factorial_checked;
            if (fact[p] * fact[q] > fact[p + q]) ++r.factorial_violations;
        }
    for (int i = 1; i <= 20; ++i)
        for (int j = i + 1; j <= 20; ++j) {
            const double rho = 0.05 * i, rt = 0.05 * j;
            for (int k = 1; k <= 60; ++k) {
                ++r.ratio_checked;
                const double lhs = k * std::pow(rho / rt, k);
                const double mid = lhs / rt;
                const double rhs = 1.0 / (rt - rho);
                r.ratio_max_margin_used = std::max(r.ratio_max_margin_used, mid / rhs);
                if (lhs > mid + slack || mid > rhs + slack) ++r.ratio_violations;
            }
        }
    r.pass = r.factorial_violations == 0 && r.ratio_violations == 0;
    return r;
}

} // namespace prandtl::verify
