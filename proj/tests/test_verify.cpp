#include "common.hpp"

#include <prandtl/verify/boundary.hpp>
#include <prandtl/verify/identities.hpp>
#include <prandtl/verify/inequalities.hpp>
#include <prandtl/verify/monitors.hpp>
#include <prandtl/verify/residuals.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

using namespace prandtl;
using namespace prandtl::verify;
using prandtl::testing::Reference;
using prandtl::testing::Case;

namespace {

std::vector<ResidualKey> all_keys(std::initializer_list<int> orders) {
    std::vector<ResidualKey> k;
    for (int m : orders)
        for (AuxKind a : {AuxKind::f, AuxKind::h, AuxKind::g}) k.push_back({a, m});
    return k;
}

// Zero perturbation on a small grid: every check has an exact answer.
struct Quiet {
    Case s{129, 0.0};
    SolverConfig cfg = [] {
        SolverConfig c;
        c.Nt = 8;
        return c;
    }();
    Trajectory tr = picard_solve(s.u0, s.profile, cfg);
    GevreyParams gp;
};

const Quiet& quiet() {
    static const Quiet q;
    return q;
}

} // namespace

TEST(Inequalities, ExhaustiveGridsHaveNoViolations) {
    const auto r = inequality_suite();
    EXPECT_TRUE(r.pass);
    EXPECT_EQ(r.factorial_violations, 0);
    EXPECT_EQ(r.ratio_violations, 0);
    EXPECT_EQ(r.factorial_checked, 21 * 21);
    EXPECT_GT(r.ratio_checked, 0);
    EXPECT_LE(r.ratio_max_margin_used, 1.0);
}

TEST(Inequalities, WorkedExamples) {
    // 3! 4! = 144 <= 7! = 5040
    EXPECT_LE(6 * 24, 5040);
    // k (rho/rt)^k / rt for k = 10, rho = 0.25, rt = 0.5
    const double v = 10 * std::pow(0.5, 10) / 0.5;
    EXPECT_NEAR(v, 0.01953125, 1e-15);
    EXPECT_LE(v, 1.0 / (0.5 - 0.25));
}

TEST(Sobolev, ZeroFieldHasZeroRatio) {
    EXPECT_EQ(sobolev_ratio(Field(Grid2D(64, 129))), 0.0);
}

TEST(Sobolev, SineTimesExponential) {
    const Grid2D g(128, 1025);
    const Field h = Field::sample(g, [](double x, double y) { return std::sin(x) * std::exp(-y); });
    // ||h|| = ||h_x|| = ||h_y|| = ||h_xy|| = sqrt(pi/2) up to the e^{-60} tail.
    const double expect = 1.0 / (std::sqrt(2.0) * 4.0 * std::sqrt(std::numbers::pi / 2.0));
    EXPECT_NEAR(sobolev_ratio(h), expect, 1e-6);
    EXPECT_LT(sobolev_ratio(h), 1.0);
}

TEST(Sobolev, RandomFamilyHasNoViolations) {
    const auto r = sobolev_check(Grid2D(128, 257), 100, 42);
    EXPECT_EQ(r.count, 100);
    EXPECT_EQ(r.violations, 0);
    EXPECT_TRUE(r.pass);
    EXPECT_GT(r.max_ratio, 0.0);
}

TEST(Radius, LambdaFormula) {
    EXPECT_DOUBLE_EQ(radius_lambda(1.0, 1.0), 24.0);
    EXPECT_DOUBLE_EQ(radius_lambda(2.0, 3.0), 4.0 * (10.0 + 18.0));
}

TEST(Residuals, ZeroFlowHasZeroResiduals) {
    const auto& q = quiet();
    const auto samples = evaluate_residuals(q.tr, q.s.cut, all_keys({1, 2}), ResidualOptions{});
    std::vector<ResidualReport::Level> levels{{q.cfg.dt(), q.s.grid.dy(), 128}, {q.cfg.dt() / 2, q.s.grid.dy() / 2, 128}};
    for (const auto& [k, s] : samples) {
        EXPECT_EQ(s.residual, 0.0);
        EXPECT_EQ(s.scale, 0.0);
        const auto r = make_residual_report("zero", levels, {s, s}, 1.0);
        EXPECT_TRUE(r.rounding_level);
        EXPECT_TRUE(r.pass);
    }
}

TEST(Residuals, ReportOrdersAndVerdicts) {
    std::vector<ResidualReport::Level> levels{{0.04, 0.1, 64}, {0.02, 0.05, 64}, {0.01, 0.025, 64}};
    auto sample = [](double r) {
        ResidualSample s;
        s.residual = r;
        s.scale = 1.0;
        return s;
    };
    const auto first = make_residual_report("a", levels, {sample(4e-3), sample(2e-3), sample(1e-3)}, 1.0);
    ASSERT_EQ(first.orders.size(), 2u);
    EXPECT_NEAR(first.observed_order, 1.0, 1e-12);
    EXPECT_TRUE(first.pass);
    const auto flat = make_residual_report("b", levels, {sample(4e-3), sample(3.9e-3), sample(3.8e-3)}, 1.0);
    EXPECT_FALSE(flat.pass);
    const auto bad = make_residual_report(
        "c", levels, {sample(4e-3), sample(std::numeric_limits<double>::quiet_NaN()), sample(1e-3)}, 1.0);
    EXPECT_FALSE(bad.pass);
}

// Removing -chi2 g_{m+1} from the h equation leaves a residual of that term's size.
TEST(Residuals, DroppingTheTangentialCouplingBreaksTheStripEquation) {
    const auto& r = Reference::get();
    ResidualOptions o;
    o.eps = r.cfg.eps;
    o.t_min = 0.25 * r.cfg.T;
    const auto keep = evaluate_residuals(r.tr, r.s.cut, {{AuxKind::h, 1}}, o).begin()->second;
    o.drop_h_g_term = true;
    const auto drop = evaluate_residuals(r.tr, r.s.cut, {{AuxKind::h, 1}}, o).begin()->second;
    const double term = keep.groups.at("g_next");
    EXPECT_GT(drop.residual, 10.0 * keep.residual);
    EXPECT_NEAR(drop.residual / term, 1.0, 0.25);
}

TEST(Boundary, ZeroFlowHasZeroWallResiduals) {
    const auto& q = quiet();
    const auto L = boundary_level(q.tr, {1, 2}, q.cfg.eps);
    ASSERT_FALSE(L.identities.empty());
    for (const auto& w : L.identities) EXPECT_EQ(w.residual, 0.0) << w.name;
}

TEST(Condi, ZeroFlowAndReferenceRunPass) {
    const auto& q = quiet();
    EXPECT_TRUE(condi_monitor(q.tr, q.s.profile, q.s.rep, q.gp).pass);
    const auto& r = Reference::get();
    const auto c = condi_monitor(r.tr, r.s.profile, r.s.rep, GevreyParams{});
    EXPECT_TRUE(c.pass) << c.failed_clause;
    EXPECT_LT(c.max_derivative_sum, 1.0);
}

TEST(Condi, LargeAmplitudeFailureIsDetectedWithTime) {
    const Case s(257, 0.5);
    SolverConfig c;
    c.Nt = 8;
    c.T = 0.01;
    const auto tr = picard_solve(s.u0, s.profile, c);
    const auto r = condi_monitor(tr, s.profile, s.rep, GevreyParams{});
    EXPECT_FALSE(r.pass);
    ASSERT_TRUE(r.failure_time.has_value());
    EXPECT_LE(*r.failure_time, c.T);
    EXPECT_FALSE(r.failed_clause.empty());
}

TEST(Energy, ZeroFlowIsVacuous) {
    const auto& q = quiet();
    const auto terms = trajectory_norm_terms(q.tr, q.s.cut, q.gp);
    const auto e = energy_monitor(terms, q.tr.times, 0.3, 0.4, 1.75);
    EXPECT_TRUE(e.vacuous);
    EXPECT_EQ(e.max_C, 0.0);
    EXPECT_THROW(energy_monitor(terms, q.tr.times, 0.4, 0.3, 1.75), Error);
}

// Without x-dependence the norm ignores the radius, so halving rt - rho
// doubles the loss integral exactly.
TEST(Energy, LossTermScalesInverselyWithRadiusGap) {
    const Grid2D g(64, 129);
    const Field u = Field::sample(g, [](double, double y) { return y * std::exp(-y); });
    const std::vector<NormTerms> terms(5, gevrey_norm_terms(u, GevreyParams{}));
    const std::vector<double> times{0.0, 0.01, 0.02, 0.03, 0.04};
    const auto a = energy_monitor(terms, times, 0.3, 0.4, 1.75);
    const auto b = energy_monitor(terms, times, 0.3, 0.35, 1.75);
    EXPECT_NEAR(b.loss.back() / a.loss.back(), 2.0, 1e-12);
    EXPECT_NEAR(a.C.front(), 1.0, 1e-15);
}

TEST(Energy, ReferenceConstantIsFinite) {
    const auto& r = Reference::get();
    const auto terms = trajectory_norm_terms(r.tr, r.s.cut, GevreyParams{});
    const auto e = energy_monitor(terms, r.tr.times, 0.3, 0.4, 1.75);
    EXPECT_TRUE(e.pass);
    EXPECT_FALSE(e.vacuous);
    for (double c : e.C) EXPECT_TRUE(std::isfinite(c));
}

TEST(Sandwich, ReferenceTrajectoryHasLowerBoundAndFiniteConstant) {
    const auto& r = Reference::get();
    const auto terms = trajectory_norm_terms(r.tr, r.s.cut, GevreyParams{});
    const auto s = sandwich_fit(terms, 0.3, 0.5, 1.75);
    EXPECT_TRUE(s.pass);
    EXPECT_EQ(s.lower_violations, 0);
    EXPECT_EQ(s.members, static_cast<int>(terms.size()));
    EXPECT_GT(s.C, 0.0);
}

TEST(Radius, ZeroFlowHasZeroLifespan) {
    const auto& q = quiet();
    const auto terms = trajectory_norm_terms(q.tr, q.s.cut, q.gp);
    const auto r = radius_decay_check(terms, q.tr.times, 1.0, 1.75, 0.5);
    EXPECT_EQ(r.lifespan, 0.0);
    EXPECT_TRUE(r.pass);
}

TEST(Contraction, ZeroFlowIsInconclusive) {
    const auto r = picard_contraction_check(quiet().tr);
    EXPECT_TRUE(r.inconclusive);
    EXPECT_FALSE(r.pass);
}

TEST(Contraction, ReferenceRunContractsFast) {
    const auto r = picard_contraction_check(Reference::get().tr);
    EXPECT_TRUE(r.pass);
    EXPECT_LE(r.max_ratio, 0.75);
    EXPECT_LT(r.rate, 0.75);
}

TEST(Compatibility, ReferencePerturbationPasses) {
    const auto& r = Reference::get();
    const auto c = compatibility_check(r.s.u0, r.s.profile, 1e-3);
    EXPECT_TRUE(c.pass);
    EXPECT_DOUBLE_EQ(c.tolerance, 1e-11);
}

TEST(Compatibility, IncompatibleDataFails) {
    const auto& r = Reference::get();
    const Field u = Field::sample(r.s.grid, [](double x, double y) { return 1e-3 * std::sin(x) * y * std::exp(-y); });
    EXPECT_FALSE(compatibility_check(u, r.s.profile, 1e-3).pass);
}

TEST(Cancellation, SummaryNeedsToleranceAndOrder) {
    const auto ok = summarize_cancellation({{0.1, 1e-5}, {0.05, 1e-6}});
    EXPECT_TRUE(ok.pass);
    EXPECT_NEAR(ok.orders.front(), std::log2(10.0), 1e-12);
    EXPECT_FALSE(summarize_cancellation({{0.1, 1e-3}, {0.05, 1e-5}}).pass);
    EXPECT_FALSE(summarize_cancellation({{0.1, 1e-5}, {0.05, 4e-6}}).pass);
    EXPECT_FALSE(summarize_cancellation({{0.1, 1e-5}}).pass);
}

TEST(CrossValidation, RejectsMismatchedTrajectories) {
    const auto& q = quiet();
    const auto& r = Reference::get();
    EXPECT_THROW(cross_validate(r.tr, q.tr), Error);
}
