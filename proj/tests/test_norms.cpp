#include "common.hpp"

#include <prandtl/verify/inequalities.hpp>

#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>
#include <random>

using namespace prandtl;
using prandtl::testing::Case;

namespace {

const Case& reference() {
    static const Case s(257);
    return s;
}

double entry(const NormReport& r, const std::string& group, int i, int j = 0) {
    for (const auto& e : r.entries)
        if (e.group == group && e.i == i && e.j == j) return e.value;
    ADD_FAILURE() << "no entry " << group << " " << i << " " << j;
    return 0.0;
}

} // namespace

TEST(GevreyWeight, LowOrdersUnweighted) {
    for (int m = 0; m < 6; ++m) EXPECT_EQ(gevrey_weight(m, 0.3, 1.75), 1.0);
    EXPECT_DOUBLE_EQ(gevrey_weight(6, 0.3, 1.75), 0.3);
    EXPECT_DOUBLE_EQ(gevrey_weight(8, 0.3, 2.0), 0.027 / 4.0);
}

TEST(GevreyNorm, ZeroFieldHasZeroNorm) {
    const Grid2D g(64, 129);
    const auto r = gevrey_norm(Field(g), GevreyParams{});
    EXPECT_EQ(r.total, 0.0);
    for (const auto& e : r.entries) EXPECT_EQ(e.value, 0.0);
}

TEST(FullNorm, ZeroPerturbationHasZeroNorm) {
    const Case s(257, 0.0);
    const auto r = full_norm(s.u0, evolve_shear(s.profile, 0.0), s.cut, GevreyParams{});
    EXPECT_EQ(r.total, 0.0);
}

// Entry of a sin(kx) phi(y): weight * k^m * a * |<y>^{ell-1} phi|_{L2(0, y_top)} * sqrt(Lx/2).
TEST(GevreyNorm, SingleModeMatchesOneDimensionalOracle) {
    const Grid2D g(64, 1025);
    const GevreyParams p;
    const double a = 0.3;
    for (auto [k, m] : {std::pair{1, 6}, {2, 7}}) {
        const Field u = Field::sample(g, [&](double x, double y) { return a * std::sin(k * x) * y * std::exp(-y); });
        const auto r = gevrey_norm(u, p);
        const double top = p.y_top(g);
        const double I = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
            [&](double y) { return std::pow(1 + y, 2 * (p.ell - 1)) * y * y * std::exp(-2 * y); }, 0.0, top, 15, 1e-14);
        const double expect =
            gevrey_weight(m, p.rho, p.sigma) * std::pow(k, m) * a * std::sqrt(I) * std::sqrt(g.lx / 2.0);
        EXPECT_NEAR(entry(r, "tangential", m), expect, 1e-8 * expect) << "k=" << k << " m=" << m;
    }
}

TEST(GevreyNorm, MonotoneInRadius) {
    const Grid2D g(64, 257);
    std::mt19937_64 rng(7);
    GevreyParams p;
    for (int i = 0; i < 20; ++i) {
        const Field u = verify::random_decaying_field(g, rng);
        const NormTerms t = gevrey_norm_terms(u, p);
        double prev = 0.0;
        for (double rho : {0.1, 0.3, 0.5, 0.8, 1.0}) {
            const double v = t.total(rho, p.sigma);
            EXPECT_GE(v, prev);
            prev = v;
        }
    }
}

TEST(GevreyNorm, HomogeneousOfDegreeOne) {
    const auto& s = reference();
    const GevreyParams p;
    EXPECT_NEAR(gevrey_norm(3.0 * s.u0, p).total, 3.0 * gevrey_norm(s.u0, p).total, 1e-12 * gevrey_norm(s.u0, p).total);
}

TEST(FullNorm, AuxiliaryTermsAreNotHomogeneous) {
    const Case s(257, 1e-2);
    const auto sh = evolve_shear(s.profile, 0.0);
    const GevreyParams p;
    const double one = full_norm(s.u0, sh, s.cut, p).total, two = full_norm(2.0 * s.u0, sh, s.cut, p).total;
    EXPECT_GT(std::abs(two - 2.0 * one), 1e-6 * one);
}

TEST(FullNorm, DominatesGevreyPart) {
    const auto& s = reference();
    const auto r = full_norm(s.u0, evolve_shear(s.profile, 0.0), s.cut, GevreyParams{});
    EXPECT_GE(r.total, r.gevrey);
    EXPECT_GT(r.total, r.gevrey);
    EXPECT_LT(r.tail_ratio, 1.0);
}

TEST(GevreyNorm, TruncationIsConverged) {
    const auto& s = reference();
    GevreyParams p;
    const double a = gevrey_norm(s.u0, p).total;
    p.Mmax = 12;
    const double b = gevrey_norm(s.u0, p).total;
    EXPECT_LE(std::abs(b - a), 0.01 * a);
}

TEST(GevreyParams, ValidationNamesTheConstraint) {
    GevreyParams p;
    p.sigma = 2.5;
    EXPECT_THROW(p.validate(), Error);
    p = {};
    p.ell = p.alpha + 0.6;
    EXPECT_THROW(p.validate(), Error);
    p = {};
    p.Mmax = 6;
    EXPECT_THROW(p.validate(), Error);
    p = {};
    p.Mmax = 20;
    EXPECT_THROW(p.validate(Grid2D(64, 129)), Error);
    EXPECT_NO_THROW(GevreyParams{}.validate(Grid2D(128, 257)));
}

// A bump far out lives where the quotient form applies; one narrower than
// the gap |y - y0| <= 5 delta/4 of chi1 leaves f at the noise level.
TEST(FullNorm, DominantAuxiliaryGroupDependsOnLocation) {
    const Case s(513, 0.0);
    const auto sh = evolve_shear(s.profile, 0.0);
    const GevreyParams p;
    const double w = s.rep.delta / 4.0;
    auto dominant = [&](double centre, double width) {
        const Field u = Field::sample(s.grid, [&](double x, double y) {
            const double z = (y - centre) / width;
            return 1e-4 * std::sin(x) * y * y * std::exp(-z * z);
        });
        return full_norm(u, sh, s.cut, p).aux_argmax.group;
    };
    EXPECT_EQ(dominant(9.0, 1.0), "f");
    EXPECT_NE(dominant(s.cut.y0, w), "f");
}

TEST(Lifespan, ZeroTrajectoryIsZero) {
    const Grid2D g(64, 129);
    const std::vector<NormTerms> terms(3, gevrey_norm_terms(Field(g), GevreyParams{}));
    EXPECT_EQ(lifespan_norm(terms, {0.0, 0.01, 0.02}, 10.0, 0.02, 1.75, 0.5).value, 0.0);
}

TEST(Lifespan, InitialTimeOnlyGivesLargestRadiusNorm) {
    const auto& s = reference();
    const GevreyParams p;
    const auto t = full_norm_terms(FlowSnapshot::from_u(s.u0, evolve_shear(s.profile, 0.0)), s.cut, p);
    double best = 0.0;
    for (int k = 1; k <= 16; ++k) best = std::max(best, t.total(0.5 * k / 17.0, p.sigma));
    const auto r = lifespan_norm(std::vector<NormTerms>{t}, {0.0}, 10.0, 0.0, p.sigma, 0.5);
    EXPECT_DOUBLE_EQ(r.value, best);
    EXPECT_EQ(r.t, 0.0);
}

TEST(Lifespan, HorizonBeyondRadiusIsRejected) {
    const Grid2D g(64, 129);
    const std::vector<NormTerms> terms(1, gevrey_norm_terms(Field(g), GevreyParams{}));
    EXPECT_THROW(lifespan_norm(terms, {0.0}, 10.0, 0.1, 1.75, 0.5), Error);
}
