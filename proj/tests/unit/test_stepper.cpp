#include <gtest/gtest.h>

#include <cmath>

#include "frnse/initial.hpp"
#include "frnse/picard.hpp"
#include "frnse/stepper.hpp"
#include "support.hpp"

using namespace frnse;

namespace {

const GridSpec g{16, 12.8};

Field data(double h1 = 1.0) { return with_h1_norm(gaussian(g, 1.0, box_center(g)), h1); }

StepConfig config(double T = 0.25, double dt = 0.025)
{
    StepConfig c;
    c.T = T;
    c.dt = dt;
    c.kspec = KernelSpec::full_for(g);
    return c;
}

} // namespace

TEST(Stepper, ConfigValidation)
{
    auto c = config();
    c.dt = 1e-9;
    EXPECT_THROW(c.validate(), InvalidArgument);
    c = config();
    c.T = 0;
    EXPECT_THROW(c.validate(), InvalidArgument);
    c = config();
    c.h1_cap = -1;
    EXPECT_THROW(c.validate(), InvalidArgument);
}

TEST(Stepper, ZeroCouplingReproducesFreeEvolution)
{
    auto c = config(0.3, 0.07);
    c.params.alpha2 = 0;
    const Field phi = data();
    const auto r = evolve(phi, c);
    EXPECT_EQ(r.report.status, StepStatus::Completed);
    EXPECT_LT(test::rel_l2(r.trajectory.fields.back(), free_evolve(phi, 0.3, 1.0)), 1e-13);
}

TEST(Stepper, LandsExactlyOnHorizon)
{
    const auto r = evolve(data(), config(0.25, 0.03));
    EXPECT_EQ(r.report.t_final, 0.25);
    EXPECT_EQ(r.report.steps, 9);
    EXPECT_EQ(r.trajectory.times.back(), 0.25);
    EXPECT_NEAR(r.report.diagnostics.back().dt, 0.25 - 8 * 0.03, 1e-15);
}

TEST(Stepper, FourthOrderSelfConvergence)
{
    const Field phi = data();
    auto terminal = [&](double dt) { return evolve(phi, config(0.25, dt)).trajectory.fields.back(); };
    const Field a = terminal(0.05), b = terminal(0.025), c = terminal(0.0125);
    const double ratio = h1_norm(a - b) / h1_norm(b - c);
    EXPECT_NEAR(std::log2(ratio), 4.0, 0.8);
}

TEST(Stepper, AgreesWithPicard)
{
    const Field phi = data(0.5);
    PicardConfig pc;
    pc.T = 0.25;
    pc.m = 32;
    pc.tol = 1e-13;
    pc.kspec = KernelSpec::full_for(g);
    const auto p = require_converged(picard_solve(phi, pc));
    const auto s = evolve(phi, config(0.25, 0.25 / 16));
    EXPECT_LT(h1_norm(p.trajectory.fields.back() - s.trajectory.fields.back()), 1e-7);
}

TEST(Stepper, UnitNormIsPreservedAndBalanceHolds)
{
    const Field phi = with_l2_norm(gaussian(g, 1.0, box_center(g)), 1.0);
    const auto r = evolve(phi, config(0.1, 0.005));
    for (const auto& d : r.report.diagnostics) {
        EXPECT_NEAR(d.l2, 1.0, 1e-8);
        EXPECT_LT(std::abs(d.balance_residual), 1e-6);
    }
}

TEST(Stepper, SubUnitNormGrows)
{
    const Field phi = with_l2_norm(gaussian(g, 1.0, box_center(g)), 0.5);
    const auto r = evolve(phi, config(0.1, 0.01));
    const auto& d = r.report.diagnostics;
    for (std::size_t i = 1; i < d.size(); ++i)
        EXPECT_GT(d[i].l2, d[i - 1].l2);
}

TEST(Stepper, H1CapReportsSuspectedBlowup)
{
    auto c = config();
    c.h1_cap = 0.5;
    const auto start = evolve(data(1.0), c);
    EXPECT_EQ(start.report.status, StepStatus::BlowupSuspected);
    EXPECT_EQ(start.report.escape_time, 0.0);
}

TEST(Stepper, SnapshotsEveryKSteps)
{
    auto c = config(0.2, 0.02);
    c.snapshot_every = 5;
    const auto r = evolve(data(), c);
    ASSERT_EQ(r.trajectory.size(), 3u);
    EXPECT_NEAR(r.trajectory.times[1], 0.1, 1e-15);
    EXPECT_EQ(r.trajectory.times[2], 0.2);
}

TEST(Stepper, RejectsNonFiniteData)
{
    Field phi = data();
    phi[3] = cplx(std::nan(""), 0);
    EXPECT_THROW(evolve(phi, config()), InvalidArgument);
}
