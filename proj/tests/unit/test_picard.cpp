#include <gtest/gtest.h>

#include <cmath>

#include "frnse/initial.hpp"
#include "frnse/picard.hpp"
#include "support.hpp"

using namespace frnse;

namespace {

const GridSpec g{16, 12.8};

Field small_data(double h1 = 0.5)
{
    return with_h1_norm(gaussian(g, 1.0, box_center(g)), h1);
}

PicardConfig config(int m = 16, double T = 0.25)
{
    PicardConfig c;
    c.T = T;
    c.m = m;
    c.tol = 1e-12;
    c.max_iter = 40;
    c.kspec = KernelSpec::full_for(g);
    return c;
}

// int_0^{t_j} p(s) ds from the dense weights, on nodes t_l = l / m.
double rule(const std::vector<std::vector<double>>& w, int j, int m, int degree)
{
    double s = 0;
    for (int l = 0; l <= m; ++l)
        s += w[j][l] * std::pow(double(l) / m, degree);
    return s / m;
}

} // namespace

TEST(Picard, QuadratureNamesRoundTrip)
{
    for (auto q : {Quadrature::Trapezoid, Quadrature::Simpson})
        EXPECT_EQ(parse_quadrature(to_string(q)), q);
    EXPECT_EQ(parse_picard_init("zero"), PicardInit::Zero);
    EXPECT_THROW(parse_quadrature("gauss"), InvalidArgument);
}

TEST(Picard, TrapezoidRowsExactForLinears)
{
    const int m = 7;
    const auto w = cumulative_weights(m, Quadrature::Trapezoid);
    for (int j = 0; j <= m; ++j) {
        const double t = double(j) / m;
        EXPECT_NEAR(rule(w, j, m, 0), t, 1e-14);
        EXPECT_NEAR(rule(w, j, m, 1), t * t / 2, 1e-14);
    }
}

TEST(Picard, SimpsonRowsExactForCubicsAtEveryNode)
{
    for (int m : {2, 4, 10}) {
        const auto w = cumulative_weights(m, Quadrature::Simpson);
        const int top = m == 2 ? 2 : 3;  // the m = 2 start rule is quadratic
        for (int j = 0; j <= m; ++j)
            for (int d = 0; d <= top; ++d) {
                const double t = double(j) / m;
                EXPECT_NEAR(rule(w, j, m, d), std::pow(t, d + 1) / (d + 1), 1e-14)
                    << "m=" << m << " j=" << j << " degree=" << d;
            }
    }
    EXPECT_THROW(quadrature_rows(5, Quadrature::Simpson), InvalidArgument);
}

TEST(Picard, ConfigValidation)
{
    auto c = config();
    c.m = 15;
    EXPECT_THROW(c.validate(), InvalidArgument);
    c = config();
    c.T = -1;
    EXPECT_THROW(c.validate(), InvalidArgument);
    c = config();
    c.tol = 0;
    EXPECT_THROW(c.validate(), InvalidArgument);
}

TEST(Picard, ZeroCouplingIsOneIterationOfFreeEvolution)
{
    auto c = config(8, 0.5);
    c.params.alpha2 = 0;
    const Field phi = small_data();
    const auto r = picard_solve(phi, c);
    EXPECT_TRUE(r.report.converged());
    EXPECT_EQ(r.report.iterations, 1);
    EXPECT_EQ(r.report.residual, 0.0);
    EXPECT_LT(test::rel_l2(r.trajectory.fields.back(), free_evolve(phi, 0.5, 1.0)), 1e-14);
    EXPECT_TRUE(contraction_report(r.report, c.T).degenerate);
}

TEST(Picard, SmallDataConvergesAndInitializersAgree)
{
    const auto c = config();
    const Field phi = small_data();
    const auto a = picard_solve(phi, c, PicardInit::FreeTrajectory);
    const auto b = picard_solve(phi, c, PicardInit::Zero);
    ASSERT_TRUE(a.report.converged());
    ASSERT_TRUE(b.report.converged());
    EXPECT_LT(a.report.residual, 1e-11);
    EXPECT_LT(sup_h1_distance(a.trajectory, b.trajectory), 1e-11);
    EXPECT_TRUE(a.report.warnings.empty());

    const auto cr = contraction_report(a.report, c.T);
    EXPECT_FALSE(cr.degenerate);
    EXPECT_TRUE(cr.monotone_after_first);
    EXPECT_LT(cr.CT, 0.5);
    EXPECT_TRUE(cr.envelope_dominated);
}

TEST(Picard, FixedPointSatisfiesDuhamelMap)
{
    const auto c = config();
    const Field phi = small_data();
    const auto r = picard_solve(phi, c);
    const auto again = duhamel_map(r.trajectory, phi, c);
    EXPECT_LT(sup_h1_distance(again, r.trajectory), 1e-11);
    EXPECT_EQ(r.trajectory.fields.front().values()[0], phi.values()[0]);
}

TEST(Picard, BackwardDirectionRetracesForward)
{
    auto c = config();
    const Field phi = small_data();
    const auto fwd = picard_solve(phi, c);
    c.direction = -1;
    const auto back = picard_solve(fwd.trajectory.fields.back(), c);
    ASSERT_TRUE(back.report.converged());
    EXPECT_LT(test::rel_l2(back.trajectory.fields.back(), phi), 1e-6);
}

TEST(Picard, IterationCapReportsNonConvergence)
{
    auto c = config();
    c.max_iter = 2;
    const auto r = picard_solve(small_data(), c);
    EXPECT_EQ(r.report.status, PicardStatus::NonConvergence);
    EXPECT_THROW(require_converged(r), NonConvergence);
}

TEST(Picard, GivenInitializerNeedsTrajectory)
{
    EXPECT_THROW(picard_solve(small_data(), config(), PicardInit::Given), InvalidArgument);
}

TEST(Picard, ContractionReportNeedsEnoughIncrements)
{
    ConvergenceReport r;
    r.increments = {1.0, 0.1};
    r.scale = 1;
    EXPECT_THROW(contraction_report(r, 1.0), InvalidArgument);
    // Exact (C T)^k / k! increments with C T = 0.5.
    r.increments = {1.0, 0.5, 0.125, 0.125 / 6};
    const auto c = contraction_report(r, 1.0);
    EXPECT_NEAR(c.C_fit, 0.5, 1e-14);
    EXPECT_NEAR(c.CT, 0.5, 1e-14);
    EXPECT_TRUE(c.ratios_decreasing);
    EXPECT_TRUE(c.envelope_dominated);
    EXPECT_TRUE(c.monotone_after_first);
}
