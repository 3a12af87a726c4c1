#include <gtest/gtest.h>

#include <cmath>

#include "frnse/initial.hpp"
#include "frnse/nonlinear.hpp"
#include "support.hpp"

using namespace frnse;

namespace {

const GridSpec g{12, 4.0};
const KernelSpec full = KernelSpec::full_for(g);

Field sample(std::uint64_t seed, double h1 = 1.0)
{
    std::mt19937_64 rng(seed);
    return random_in_h1_sphere(g, rng, h1);
}

} // namespace

TEST(Nonlinear, ParamsValidation)
{
    EXPECT_THROW((PhysParams{-1, 1}).validate(), InvalidArgument);
    EXPECT_THROW((PhysParams{0, 1}).validate(), InvalidArgument);
    EXPECT_THROW((PhysParams{1, -0.1}).validate(), InvalidArgument);
    EXPECT_NO_THROW((PhysParams{1, 0}).validate());
}

// g1 is homogeneous of degree 3, G1 of degree 4 and g2 of degree 5.
TEST(Nonlinear, HomogeneityDegrees)
{
    const Field psi = sample(1);
    for (double s : {0.5, 2.0, 3.0}) {
        const Field scaled = psi * cplx(s);
        EXPECT_LT(test::rel_l2(g1(scaled, full), g1(psi, full) * cplx(std::pow(s, 3))), 1e-12);
        EXPECT_NEAR(big_g1(scaled, full) / big_g1(psi, full), std::pow(s, 4), 1e-11 * std::pow(s, 4));
        EXPECT_LT(test::rel_l2(g2(scaled, full), g2(psi, full) * cplx(std::pow(s, 5))), 1e-12);
    }
}

TEST(Nonlinear, PairEnergyIsNonnegativeAndPhaseInvariant)
{
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const Field psi = sample(seed);
        const double G = big_g1(psi, full);
        EXPECT_GT(G, 0);
        EXPECT_NEAR(big_g1(psi * std::polar(1.0, 0.7 * seed), full), G, 1e-13 * G);
    }
    EXPECT_EQ(big_g1(Field(g), full), 0.0);
}

// With the full kernel 2 Re <psi, N(psi)> = 2 a2 G1 (1 - ||psi||^2), exactly on the grid.
TEST(Nonlinear, BalanceIdentity)
{
    const PhysParams p{1.0, 0.8};
    for (double m : {0.4, 1.0, 1.7}) {
        const Field psi = with_l2_norm(sample(3), m);
        const double rate = balance_rate(psi, nonlinear_term(psi, p, full));
        const double expect = 2 * p.alpha2 * big_g1(psi, full) * (1 - m * m);
        EXPECT_NEAR(rate, expect, 1e-12 * std::max(1.0, std::abs(expect)));
    }
}

TEST(Nonlinear, TruncatedTermKeepsFullNormalization)
{
    const PhysParams p{1.0, 1.0};
    const auto inner = KernelSpec::inner_truncated(0.5, full.R);
    const Field psi = sample(4);
    const Field N = nonlinear_term(psi, p, inner);
    const Field expect = g1(psi, inner) - psi * cplx(big_g1(psi, full));
    EXPECT_LT(test::rel_l2(N, expect), 1e-13);
}

TEST(Nonlinear, ZeroCouplingIsFreeEquation)
{
    const PhysParams p{1.3, 0.0};
    const Field psi = sample(5);
    EXPECT_EQ(l2_norm(nonlinear_term(psi, p, full)), 0.0);
    EXPECT_LT(test::rel_l2(rhs(psi, p, full), laplacian(psi) * cplx(0, 1.3)), 1e-15);
}

TEST(Nonlinear, TruncatedTermIsPointwiseDominated)
{
    for (double a : {0.2, 0.5, 1.0}) {
        const auto inner = KernelSpec::inner_truncated(a, full.R);
        const Field psi = sample(10 + static_cast<std::uint64_t>(10 * a));
        const Field fn = g1(psi, inner), gn = g1(psi, full);
        for (std::size_t i = 0; i < fn.size(); ++i)
            ASSERT_LE(std::abs(fn[i]), std::abs(gn[i]) + 1e-10);
    }
}

TEST(Nonlinear, LipschitzProbeSlopesFollowHomogeneity)
{
    const GridSpec small{8, 4.0};
    const auto k = KernelSpec::full_for(small);
    const auto r1 = lipschitz_probe(LipschitzProbe::G1InL2, small, k, 1.0, 4, 3);
    const auto r2 = lipschitz_probe(LipschitzProbe::G2InL2, small, k, 1.0, 4, 3);
    EXPECT_NEAR(r1.fit_slope, 2.0, 1e-6);
    EXPECT_NEAR(r2.fit_slope, 4.0, 1e-6);
    EXPECT_EQ(r1.pairs, 4);
    EXPECT_THROW(lipschitz_probe(LipschitzProbe::G1InL2, small, k, 0.0, 4, 3), InvalidArgument);
}
