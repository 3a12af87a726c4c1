#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "frnse/initial.hpp"
#include "frnse/propagate.hpp"
#include "support.hpp"

using namespace frnse;

TEST(Propagate, PlaneWavePicksUpExactPhase)
{
    const GridSpec g{16, 2 * std::numbers::pi};
    const double a1 = 0.7, t = 0.37;
    const Field w = plane_wave(g, {3, -1, 2});
    const double k2 = 9 + 1 + 4;
    const Field expect = w * std::polar(1.0, -a1 * k2 * t);
    EXPECT_LT(l2_norm(free_evolve(w, t, a1) - expect) / l2_norm(expect), 1e-12);
}

TEST(Propagate, UnitaryInL2AndH1)
{
    const GridSpec g{16, 5.0};
    const Field f = test::random_field(g, 2);
    for (double t : {-1.0, 0.1, 3.0}) {
        const Field u = free_evolve(f, t, 1.0);
        EXPECT_NEAR(l2_norm(u), l2_norm(f), 1e-12 * l2_norm(f));
        EXPECT_NEAR(h1_norm(u), h1_norm(f), 1e-12 * h1_norm(f));
    }
}

TEST(Propagate, GroupProperty)
{
    const GridSpec g{12, 3.0};
    const Field f = test::random_field(g, 4);
    const Field two = free_evolve(free_evolve(f, 0.2, 1.0), 0.3, 1.0);
    EXPECT_LT(test::rel_l2(two, free_evolve(f, 0.5, 1.0)), 1e-13);
    EXPECT_LT(test::rel_l2(free_evolve(free_evolve(f, 0.4, 1.0), -0.4, 1.0), f), 1e-13);
    EXPECT_EQ(test::rel_l2(free_evolve(f, 0.0, 1.0), f), 0.0);
}

TEST(Propagate, GaussianMatchesClosedForm)
{
    const GridSpec g{32, 16.0};
    const auto c = box_center(g);
    const Field phi = gaussian(g, 1.0, c);
    const Field num = free_evolve(phi, 0.25, 1.0);
    EXPECT_LT(test::rel_l2(num, free_gaussian(g, 1.0, c, 0.25, 1.0)), 1e-6);
    EXPECT_LT(test::rel_l2(free_gaussian(g, 1.0, c, 0.0, 1.0), phi), 1e-15);
}

TEST(Propagate, RejectsBadArguments)
{
    const Field f(GridSpec{4, 1.0});
    EXPECT_THROW(free_evolve(f, 1.0, 0.0), InvalidArgument);
    EXPECT_THROW(free_evolve(f, std::nan(""), 1.0), InvalidArgument);
}
