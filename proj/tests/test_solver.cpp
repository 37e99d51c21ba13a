#include "common.hpp"

#include <prandtl/verify/identities.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace prandtl;
using prandtl::testing::Reference;
using prandtl::testing::Case;

namespace {

// (sin kx + cos kx) sin(n pi y / Ymax): an exact DST-I / Fourier eigenmode.
Field eigenmode(const Grid2D& g, int k, int n) {
    return Field::sample(g, [&](double x, double y) {
        return (std::sin(k * x) + std::cos(k * x)) * std::sin(n * std::numbers::pi * y / g.ymax);
    });
}

double eigenvalue(const Grid2D& g, int k, int n, double eps) {
    return eps * k * k + std::pow(n * std::numbers::pi / g.ymax, 2);
}

} // namespace

TEST(Heat, ZeroTimeIsIdentity) {
    const Grid2D g(64, 129);
    const Field f = eigenmode(g, 2, 5) + eigenmode(g, 1, 1);
    EXPECT_LT(linf(heat_propagate(f, 0.0, 0.1) - f), 1e-13);
}

TEST(Heat, EigenmodesDecayExponentially) {
    const Grid2D g(64, 129);
    for (auto [k, n] : {std::pair{1, 1}, {3, 4}, {0, 7}}) {
        const Field f = eigenmode(g, k, n);
        Field expect = f;
        expect *= std::exp(-eigenvalue(g, k, n, 0.1) * 0.3);
        EXPECT_LT(linf(heat_propagate(f, 0.3, 0.1) - expect), 1e-13) << k << "," << n;
    }
}

TEST(Heat, SemigroupProperty) {
    const Case s(129);
    const Field a = heat_propagate(heat_propagate(s.u0, 0.02, 0.1), 0.03, 0.1);
    const Field b = heat_propagate(s.u0, 0.05, 0.1);
    EXPECT_LT(linf(a - b), 1e-14 + 1e-12 * linf(b));
}

TEST(Duhamel, ZeroForcingGivesZero) {
    const Grid2D g(32, 65);
    const std::vector<Field> f(9, Field(g));
    for (const auto& d : duhamel_all(f, 0.01, 8, 0.1)) EXPECT_EQ(linf(d), 0.0);
}

// Constant eigenmode forcing phi. The exponential trapezoid obeys
// D_{n+1} = E (D_n + dt/2 phi) + dt/2 phi with E = e^{-lam dt}, so
// D_n = dt/2 (1+E)/(1-E) (1 - E^n) phi exactly; the continuum integral
// (1 - e^{-lam t})/lam differs by the trapezoid error, O((lam dt)^2).
TEST(Duhamel, ConstantEigenmodeForcing) {
    const Grid2D g(32, 129);
    const Field phi = eigenmode(g, 2, 3);
    const double lam = eigenvalue(g, 2, 3, 0.1);
    const int N = 40;
    const double dt = 0.025, E = std::exp(-lam * dt);
    const auto D = duhamel_all(std::vector<Field>(N + 1, phi), dt, N, 0.1);
    for (int n : {1, 10, N}) {
        Field discrete = phi, continuum = phi;
        discrete *= 0.5 * dt * (1 + E) / (1 - E) * (1 - std::pow(E, n));
        continuum *= (1.0 - std::exp(-lam * n * dt)) / lam;
        EXPECT_LT(linf(D[n] - discrete), 1e-12 * linf(discrete)) << n;
        EXPECT_LT(linf(D[n] - continuum), std::pow(lam * dt, 2) / 6.0 * linf(continuum)) << n;
    }
}

TEST(Duhamel, TrapezoidErrorIsSecondOrder) {
    const Grid2D g(32, 129);
    const Field phi = eigenmode(g, 3, 9);
    const double lam = eigenvalue(g, 3, 9, 0.1), T = 1.0;
    double err[2];
    for (int l = 0; l < 2; ++l) {
        const int N = 10 << l;
        std::vector<Field> f;
        for (int n = 0; n <= N; ++n) {
            Field a = phi;
            a *= std::cos(n * T / N);
            f.push_back(a);
        }
        // int_0^T e^{-lam (T-s)} cos s ds
        const double exact = (lam * std::cos(T) + std::sin(T) - lam * std::exp(-lam * T)) / (lam * lam + 1.0);
        Field expect = phi;
        expect *= exact;
        err[l] = linf(duhamel(f, T / N, N, 0.1) - expect);
    }
    EXPECT_NEAR(std::log2(err[0] / err[1]), 2.0, 0.2);
}

TEST(Duhamel, IndexOutsideGridIsRejected) {
    const Grid2D g(32, 65);
    EXPECT_THROW(duhamel(std::vector<Field>(3, Field(g)), 0.1, 3, 0.1), Error);
}

TEST(RecoverV, XIndependentFieldHasNoNormalVelocity) {
    const Grid2D g(64, 129);
    const Field u = Field::sample(g, [](double, double y) { return y * std::exp(-y); });
    EXPECT_LT(linf(recover_v(u)), 1e-14);
}

TEST(RecoverV, LinearProfileOracle) {
    const Grid2D g(64, 129);
    const Field u = Field::sample(g, [](double x, double y) { return std::sin(x) * y; });
    const Field expect = Field::sample(g, [](double x, double y) { return -std::cos(x) * y * y / 2.0; });
    EXPECT_LT(linf(recover_v(u) - expect), 1e-10);
}

TEST(RecoverV, FlowIsDivergenceFree) {
    double rel[2];
    for (int l = 0; l < 2; ++l) {
        const Case s(256 * (1 << l) + 1);
        const Field v = recover_v(s.u0);
        rel[l] = linf(dx_m(s.u0, 1) + dy_j(v, 1)) / linf(dx_m(s.u0, 1));
        for (int ix = 0; ix < s.grid.nx; ++ix) EXPECT_EQ(v(ix, 0), 0.0);
    }
    EXPECT_LT(rel[1], 1e-4);
    EXPECT_GE(std::log2(rel[0] / rel[1]), 3.5) << rel[0] << " " << rel[1];
}

TEST(SolverConfig, RejectsBadParameters) {
    SolverConfig c;
    c.eps = 0.0;
    EXPECT_THROW(c.validate(), Error);
    c = {};
    c.Nt = 2;
    EXPECT_THROW(c.validate(), Error);
    c = {};
    c.T = -1;
    EXPECT_THROW(c.validate(), Error);
}

TEST(Picard, ZeroDataStaysZero) {
    const Case s(129, 0.0);
    SolverConfig c;
    c.Nt = 8;
    const auto tr = picard_solve(s.u0, s.profile, c);
    EXPECT_TRUE(tr.converged);
    for (const auto& u : tr.u) EXPECT_EQ(linf(u), 0.0);
}

TEST(Picard, HeatOnlyRunIsThePropagator) {
    const Case s(129);
    SolverConfig c;
    c.Nt = 8;
    c.nonlinear = false;
    const auto tr = picard_solve(s.u0, s.profile, c);
    for (size_t n = 0; n < tr.size(); ++n)
        EXPECT_LT(linf(tr.u[n] - heat_propagate(s.u0, tr.times[n], c.eps)), 1e-12 * linf(s.u0));
}

TEST(Picard, ReferenceRunContracts) {
    const auto& r = Reference::get();
    ASSERT_TRUE(r.tr.converged);
    ASSERT_GE(r.tr.contraction.size(), 3u);
    for (size_t j = 2; j < r.tr.contraction.size(); ++j) {
        if (r.tr.contraction[j] <= 1e-13 * r.tr.contraction.front()) break;
        EXPECT_LE(r.tr.contraction[j] / r.tr.contraction[j - 1], 0.5) << "j=" << j;
    }
    EXPECT_EQ(r.tr.size(), 33u);
    EXPECT_TRUE(r.tr.warnings.empty());
    for (const auto& u : r.tr.u) EXPECT_TRUE(u.finite());
}

TEST(Picard, AgreesWithImexWithinFirstOrderBound) {
    const auto& r = Reference::get();
    SolverConfig c = r.cfg;
    c.scheme = Scheme::imex;
    const auto imex = imex_solve(r.s.u0, r.s.profile, c, &r.tr.shear);
    const auto x = verify::cross_validate(r.tr, imex);
    EXPECT_TRUE(x.pass) << x.difference << " > " << x.threshold;
}

// The gap to Picard halves with dt because IMEX is first order.
TEST(Imex, ConvergesAtFirstOrder) {
    const Case s(129);
    double diff[2];
    for (int l = 0; l < 2; ++l) {
        SolverConfig c;
        c.Nt = 16 << l;
        const auto p = picard_solve(s.u0, s.profile, c);
        const auto i = imex_solve(s.u0, s.profile, c, &p.shear);
        diff[l] = linf(p.u.back() - i.u.back());
    }
    EXPECT_NEAR(std::log2(diff[0] / diff[1]), 1.0, 0.25);
}

TEST(Picard, LongHorizonLargeDataDiverges) {
    const Case s(257, 5.0);
    SolverConfig c;
    c.T = 1.0;
    c.Nt = 16;
    EXPECT_THROW(picard_solve(s.u0, s.profile, c), DivergenceError);
}

TEST(Trajectory, StridedKeepsEveryStrideTime) {
    const auto& r = Reference::get();
    const auto t = r.tr.strided(8);
    ASSERT_EQ(t.size(), 5u);
    EXPECT_EQ(t.times.back(), r.tr.times.back());
    EXPECT_EQ(linf(t.u[2] - r.tr.u[16]), 0.0);
}
