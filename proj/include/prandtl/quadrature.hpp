#pragma once

#include <boost/math/quadrature/gauss.hpp>

#include <array>
#include <cmath>
#include <numbers>

namespace prandtl {

// Ten-point Gauss-Legendre rule on [-1, 1], expanded from boost's half table.
struct GaussLegendre10 {
    std::array<double, 10> x{}, w{};

    static const GaussLegendre10& get() {
        static const GaussLegendre10 rule = [] {
            using G = boost::math::quadrature::gauss<double, 10>;
            GaussLegendre10 r;
            const auto& a = G::abscissa();
            const auto& b = G::weights();
            for (size_t i = 0; i < a.size(); ++i) {
                r.x[2 * i] = -a[i];
                r.w[2 * i] = b[i];
                r.x[2 * i + 1] = a[i];
                r.w[2 * i + 1] = b[i];
            }
            return r;
        }();
        return rule;
    }

    template <class F>
    double integrate(F&& f, double a, double b) const {
        const double c = 0.5 * (a + b), h = 0.5 * (b - a);
        double acc = 0.0;
        for (int i = 0; i < 10; ++i) acc += w[i] * f(c + h * x[i]);
        return h * acc;
    }
};

// k-th derivative of erf(y/a).
inline double erf_derivative(double y, double a, int k) {
    const double s = y / a;
    if (k == 0) return std::erf(s);
    const double sign = (k - 1) % 2 == 0 ? 1.0 : -1.0;
    return sign * 2.0 / std::sqrt(std::numbers::pi) * std::pow(a, -k) *
           std::hermite(static_cast<unsigned>(k - 1), s) * std::exp(-s * s);
}

// k-th y-derivative of the heat kernel G(t, y) = exp(-y^2/4t)/sqrt(4 pi t).
inline double heat_kernel_derivative(double t, double y, int k) {
    const double s4 = std::sqrt(4.0 * t);
    const double s = y / s4;
    const double g = std::exp(-s * s) / (std::sqrt(std::numbers::pi) * s4);
    if (k == 0) return g;
    const double sign = k % 2 == 0 ? 1.0 : -1.0;
    return sign * std::pow(s4, -k) * std::hermite(static_cast<unsigned>(k), s) * g;
}

} // namespace prandtl
