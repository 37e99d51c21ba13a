#include <prandtl/grid.hpp>

#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>
#include <random>

using namespace prandtl;

namespace {

double max_abs_diff(const Field& a, const Field& b) { return linf(a - b); }

double order_of(double coarse, double fine) { return std::log2(coarse / fine); }

// Band-limited in x, smooth in y.
Field band_limited(const Grid2D& g, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> c(-1.0, 1.0);
    double a[5], b[5];
    for (int k = 0; k < 5; ++k) a[k] = c(rng), b[k] = c(rng);
    return Field::sample(g, [&](double x, double y) {
        double s = 0.0;
        for (int k = 0; k < 5; ++k) s += (a[k] * std::cos(k * x) + b[k] * std::sin(k * x)) * std::exp(-0.5 * y) * (1 + y);
        return s;
    });
}

} // namespace

TEST(Grid, RejectsBadSizes) {
    EXPECT_THROW(Grid2D(100, 257), Error);
    EXPECT_THROW(Grid2D(4, 257), Error);
    EXPECT_THROW(Grid2D(128, 16), Error);
    EXPECT_THROW(Grid2D(128, 257, -1.0), Error);
}

TEST(Grid, NodesAreUniformWithExactEnds) {
    const Grid2D g(64, 101, 2.0 * std::numbers::pi, 30.0);
    const auto y = g.y_nodes();
    EXPECT_EQ(y.front(), 0.0);
    EXPECT_EQ(y.back(), 30.0);
    for (int j = 1; j < g.ny; ++j) EXPECT_NEAR(y[j] - y[j - 1], g.dy(), 1e-13);
    EXPECT_NEAR(g.x(g.nx / 4), std::numbers::pi / 2.0, 1e-15);
}

TEST(Dx, ConstantHasNoDerivative) {
    const Grid2D g(64, 65);
    const Field f(g, 3.0);
    for (int m = 1; m <= 4; ++m) EXPECT_LT(linf(dx_m(f, m)), 1e-14);
}

TEST(Dx, SineIsEigenfunctionOfSecondDerivative) {
    const Grid2D g(64, 65, 4.0, 30.0);
    const double k = 2.0 * std::numbers::pi / g.lx;
    const Field f = Field::sample(g, [&](double x, double y) { return std::sin(k * x) * y * std::exp(-y); });
    Field expect = f;
    expect *= -k * k;
    EXPECT_LT(max_abs_diff(dx_m(f, 2), expect), 1e-13);
}

TEST(Dx, ThirdDerivativeMatchesRepeatedFiniteDifferences) {
    const Grid2D g(256, 33);
    const Field f = band_limited(g, 7);
    // Three applications of a 9-point centred periodic stencil.
    const auto w = fd_weights(0.0, {-4, -3, -2, -1, 0, 1, 2, 3, 4}, 1);
    auto fd = [&](const Field& a) {
        Field out(g);
        for (int ix = 0; ix < g.nx; ++ix)
            for (int iy = 0; iy < g.ny; ++iy) {
                double s = 0.0;
                for (int q = -4; q <= 4; ++q) s += w[q + 4] * a((ix + q + g.nx) % g.nx, iy);
                out(ix, iy) = s / g.dx();
            }
        return out;
    };
    const Field oracle = fd(fd(fd(f)));
    const Field spectral = dx_m(f, 3);
    EXPECT_LT(max_abs_diff(spectral, oracle) / linf(spectral), 1e-6);
}

TEST(Dx, OrdersComposeInSpectralSpace) {
    const Grid2D g(128, 65);
    const Field f = band_limited(g, 3);
    const Field a = dx_m(dx_m(f, 2), 3), b = dx_m(f, 5);
    EXPECT_LT(max_abs_diff(a, b), 1e-11 * linf(b));
}

TEST(Dx, OrderAboveGuardIsRejected) {
    const Grid2D g(32, 65);
    EXPECT_THROW(dx_m(Field(g), 9), Error);
}

TEST(Dy, QuadraticIsDifferentiatedExactly) {
    const Grid2D g(8, 257);
    const Field f = Field::sample(g, [](double, double y) { return y * y; });
    const Field d = dy_j(f, 2);
    for (int iy = 0; iy < g.ny; ++iy) EXPECT_NEAR(d(0, iy), 2.0, 1e-7);
}

TEST(Dy, ExponentialFirstDerivativeIsFourthOrder) {
    double err[2];
    for (int l = 0; l < 2; ++l) {
        const Grid2D g(8, 256 * (1 << l) + 1);
        const Field f = Field::sample(g, [](double, double y) { return std::exp(-y); });
        const Field d = dy_j(f, 1);
        err[l] = 0.0;
        for (int iy = 0; iy < g.ny; ++iy) err[l] = std::max(err[l], std::abs(d(0, iy) + std::exp(-g.y(iy))));
        EXPECT_LT(err[l], std::pow(g.dy(), 4));
    }
    EXPECT_GE(order_of(err[0], err[1]), 3.5);
}

TEST(Dy, SineFifthDerivativeConvergesAtThirdOrder) {
    double err[2];
    for (int l = 0; l < 2; ++l) {
        const Grid2D g(8, 256 * (1 << l) + 1);
        const Field f = Field::sample(g, [](double, double y) { return std::sin(y); });
        const Field d = dy_j(f, 5);
        err[l] = 0.0;
        for (int iy = 0; iy < g.ny; ++iy) err[l] = std::max(err[l], std::abs(d(0, iy) - std::cos(g.y(iy))));
    }
    EXPECT_GE(order_of(err[0], err[1]), 2.75);
}

TEST(Dy, CommutesWithDx) {
    const Grid2D g(64, 257);
    const Field f = Field::sample(g, [](double x, double y) {
        return (std::sin(x) + 0.5 * std::cos(3 * x)) * (1 + y + y * y) * std::exp(-y);
    });
    for (int j = 1; j <= 3; ++j)
        for (int m = 1; m <= 3; ++m) {
            const Field a = dy_j(dx_m(f, m), j), b = dx_m(dy_j(f, j), m);
            EXPECT_LT(weighted_l2(a - b, 0.0), 1e-8 * weighted_l2(f, 0.0)) << "j=" << j << " m=" << m;
        }
}

TEST(WeightedL2, ZeroAndConstant) {
    const Grid2D g(64, 257, 2.0 * std::numbers::pi, 30.0);
    EXPECT_EQ(weighted_l2(Field(g), 2.0), 0.0);
    EXPECT_NEAR(weighted_l2(Field(g, 1.0), 0.0), std::sqrt(g.lx * g.ymax), 1e-12);
}

TEST(WeightedL2, ExponentialMatchesOneDimensionalQuadrature) {
    const Grid2D g(16, 2049, 2.0 * std::numbers::pi, 30.0);
    const Field f = Field::sample(g, [](double, double y) { return std::exp(-y); });
    const double I = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [](double y) { return (1 + y) * (1 + y) * std::exp(-2 * y); }, 0.0, 30.0, 15, 1e-14);
    EXPECT_NEAR(weighted_l2(f, 1.0), std::sqrt(I * g.lx), 1e-8);
}

TEST(WeightedL2, ParsevalAgreesWithPhysicalSpace) {
    const Grid2D g(128, 257);
    const Field f = band_limited(g, 11);
    const XSpectrum s = XSpectrum::of(f);
    EXPECT_NEAR(weighted_l2_modes(s, 0, 1.5), weighted_l2(f, 1.5), 1e-10 * weighted_l2(f, 1.5));
    EXPECT_NEAR(weighted_l2_modes(s, 3, 1.0), weighted_l2(dx_m(f, 3), 1.0), 1e-10 * weighted_l2(dx_m(f, 3), 1.0));
}

TEST(IntegrateY, ZeroOneAndCosine) {
    const Grid2D g(8, 257);
    EXPECT_EQ(linf(integrate_y_from_zero(Field(g))), 0.0);
    const Field one = integrate_y_from_zero(Field(g, 1.0));
    for (int iy = 0; iy < g.ny; ++iy) EXPECT_NEAR(one(0, iy), g.y(iy), 1e-12);
    const Field c = integrate_y_from_zero(Field::sample(g, [](double, double y) { return std::cos(y); }));
    double err = 0.0;
    for (int iy = 0; iy < g.ny; ++iy) err = std::max(err, std::abs(c(3, iy) - std::sin(g.y(iy))));
    EXPECT_LT(err, g.dy() * g.dy());
}

TEST(Linf, SimpleCases) {
    const Grid2D g(128, 257);
    EXPECT_EQ(linf(Field(g)), 0.0);
    Field one(g);
    one(5, 7) = 3.5;
    EXPECT_EQ(linf(one), 3.5);
    const Field s = Field::sample(g, [](double x, double y) { return std::sin(x) * std::exp(-y); });
    EXPECT_LE(linf(s), 1.0);
    EXPECT_GE(linf(s), 1.0 - g.dy());
}

TEST(Quadrature, GregoryWeightsIntegrateCubicsExactly) {
    const Grid2D g(8, 97, 2.0 * std::numbers::pi, 3.0);
    YArray col(g.ny);
    for (int j = 0; j < g.ny; ++j) col[j] = 1 + g.y(j) - 2 * std::pow(g.y(j), 2) + std::pow(g.y(j), 3);
    const double exact = 3.0 + 4.5 - 18.0 + 81.0 / 4.0;
    EXPECT_NEAR(integrate_y(g, col), exact, 1e-12);
}

TEST(Spectrum, NoiseFloorSilencesRoundingModes) {
    const Grid2D g(128, 65);
    Field f = Field::sample(g, [](double x, double y) { return std::sin(x) * std::exp(-y); });
    f(0, 10) += 1e-17; // a rounding-level kick spreads into every mode
    const Field d = dx_m(f, 20);
    const Field clean = Field::sample(g, [](double x, double y) { return std::sin(x) * std::exp(-y); });
    EXPECT_LT(linf(d - clean), 1e-12);
}
