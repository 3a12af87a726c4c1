#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "frnse/io/snapshot.hpp"
#include "frnse/kernel.hpp"
#include "frnse/quadrature.hpp"
#include "support.hpp"

using namespace frnse;

namespace {

const GridSpec g8{8, 2.0};

KernelSpec spec_of(KernelVariant v, const GridSpec& g, double a)
{
    const double R = min_support_radius(g);
    switch (v) {
    case KernelVariant::Full:
        return KernelSpec::full(R);
    case KernelVariant::InnerTruncated:
        return KernelSpec::inner_truncated(a, R);
    case KernelVariant::Tail:
        return KernelSpec::tail(a, R);
    }
    return KernelSpec::full(R);
}

Field density_of(const GridSpec& g, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    return random_density(g, rng);
}

} // namespace

TEST(Kernel, VariantNamesRoundTrip)
{
    for (auto v : {KernelVariant::Full, KernelVariant::InnerTruncated, KernelVariant::Tail})
        EXPECT_EQ(parse_kernel_variant(to_string(v)), v);
    EXPECT_THROW(parse_kernel_variant("outer"), InvalidArgument);
}

TEST(Kernel, SpecValidation)
{
    EXPECT_THROW(KernelSpec::full(0).validate(), InvalidArgument);
    EXPECT_THROW(KernelSpec::tail(0, 1).validate(), InvalidArgument);
    EXPECT_THROW(KernelSpec::inner_truncated(2, 1).validate(), InvalidArgument);
    EXPECT_THROW(KernelSpec::full(1.0).validate_for(g8), InvalidArgument);
    EXPECT_NO_THROW(KernelSpec::full_for(g8).validate_for(g8));
}

// Continuous transform of 1/r on a < r <= R against radial quadrature of
// (4 pi / k) int sin(k r) dr.
TEST(Kernel, MultiplierMatchesRadialQuadrature)
{
    const double a = 0.3, R = 2.5;
    for (double k : {0.0, 1e-6, 0.7, 3.0, 11.0}) {
        auto shell = [&](double lo, double hi) {
            double s = 0;
            const int pieces = 64;
            for (int i = 0; i < pieces; ++i) {
                const double x0 = lo + (hi - lo) * i / pieces, x1 = lo + (hi - lo) * (i + 1) / pieces;
                s += quadrature::integrate(
                    [&](double r) { return k == 0 ? r : std::sin(k * r) / k; }, x0, x1);
            }
            return 4 * std::numbers::pi * s;
        };
        EXPECT_NEAR(coulomb_multiplier(KernelSpec::full(R), k), shell(0, R), 1e-10);
        EXPECT_NEAR(coulomb_multiplier(KernelSpec::tail(a, R), k), shell(0, a), 1e-10);
        EXPECT_NEAR(coulomb_multiplier(KernelSpec::inner_truncated(a, R), k), shell(a, R), 1e-10);
    }
    EXPECT_THROW(coulomb_multiplier(KernelSpec::full(1), -1.0), InvalidArgument);
}

TEST(Kernel, FftMatchesDirectSumForAllVariants)
{
    for (auto v : {KernelVariant::Full, KernelVariant::InnerTruncated, KernelVariant::Tail}) {
        const auto spec = spec_of(v, g8, 0.6);
        for (std::uint64_t seed : {1u, 2u}) {
            const Field rho = density_of(g8, seed);
            EXPECT_LT(test::rel_l2(apply_kernel(spec, rho), direct_convolution_oracle(spec, rho)), 1e-10)
                << to_string(v);
        }
    }
}

TEST(Kernel, OracleRefusesLargeGrids)
{
    const GridSpec g{24, 2.0};
    EXPECT_THROW(direct_convolution_oracle(KernelSpec::full_for(g), Field(g)), InvalidArgument);
}

TEST(Kernel, ComplexInputIsLinear)
{
    const auto spec = KernelSpec::full_for(g8);
    const Field a = density_of(g8, 3), b = density_of(g8, 4);
    const Field mixed = a + b * cplx(0, 1);
    const Field out = apply_kernel(spec, mixed);
    EXPECT_LT(test::rel_l2(out, apply_kernel(spec, a) + apply_kernel(spec, b) * cplx(0, 1)), 1e-13);
}

TEST(Kernel, TablesAreNonnegativeAndSplitExactly)
{
    const double R = min_support_radius(g8), a = 0.6;
    const KernelOperator full(g8, KernelSpec::full(R)), inner(g8, KernelSpec::inner_truncated(a, R)),
        tail(g8, KernelSpec::tail(a, R));
    for (int dx = -7; dx <= 7; ++dx)
        for (int dy = -7; dy <= 7; ++dy)
            for (int dz = -7; dz <= 7; ++dz) {
                const double f = full.table(dx, dy, dz), i = inner.table(dx, dy, dz),
                             t = tail.table(dx, dy, dz);
                ASSERT_GE(t, 0);
                ASSERT_GE(i, 0);
                ASSERT_LE(i, f + 1e-12);
                ASSERT_NEAR(i + t, f, 1e-12 * f);
                ASSERT_EQ(f, full.table(-dx, dy, dz));
            }
}

TEST(Kernel, OriginCellIsTheCellAverageOfInverseDistance)
{
    // The mean of 1/|x| over the centred unit cube is 2.3800773...; by scaling
    // the integral over a cube of side h is that constant times h^2.
    const double h = 0.25;
    EXPECT_NEAR(detail::origin_cell_integral(h, 10.0) / (h * h), 2.38007736, 1e-7);
}

TEST(Kernel, TailMassMatchesBallIntegral)
{
    const GridSpec g{16, 1.6};
    for (double a : {0.4, 0.2}) {
        const KernelOperator tail(g, KernelSpec::tail(a, min_support_radius(g)));
        // Cells cut by the sphere are integrated by adaptive quadrature, which
        // resolves the ball integral to about 1e-5 relative.
        EXPECT_NEAR(tail.mass() / tail_norm_bound(a), 1.0, 2e-5);
    }
}

TEST(Kernel, InnerEqualsFullBelowResolution)
{
    // With a < h/2 the excluded ball lies inside the self cell only.
    const GridSpec g{8, 2.0};
    const double h = g.spacing(), R = min_support_radius(g);
    const KernelOperator full(g, KernelSpec::full(R)), inner(g, KernelSpec::inner_truncated(0.3 * h, R));
    EXPECT_EQ(full.table(1, 0, 0), inner.table(1, 0, 0));
    EXPECT_EQ(full.table(2, 3, 1), inner.table(2, 3, 1));
    EXPECT_LT(inner.table(0, 0, 0), full.table(0, 0, 0));
}

TEST(Kernel, PotentialOfPositiveDensityIsPositive)
{
    const auto rho = density_of(g8, 9);
    for (auto v : {KernelVariant::Full, KernelVariant::InnerTruncated, KernelVariant::Tail}) {
        const Field V = apply_kernel(spec_of(v, g8, 0.6), rho);
        for (std::size_t i = 0; i < V.size(); ++i)
            ASSERT_GT(V[i].real(), -1e-12);
    }
}

TEST(Kernel, TailNormEstimateBelowBound)
{
    const GridSpec g{16, 1.6};
    for (double p : {2.0, 1.5}) {
        const auto e = tail_norm_estimate(g, 0.3, p, 2, 7, 20);
        EXPECT_TRUE(e.resolved);
        EXPECT_GT(e.estimate, 0.5 * e.bound);
        EXPECT_LE(e.estimate, e.bound);
    }
    const auto coarse = tail_norm_estimate(g, 0.05, 2.0, 1, 7, 5);
    EXPECT_FALSE(coarse.resolved);
    EXPECT_FALSE(coarse.warning.empty());
}

TEST(Kernel, TableFileRoundTrip)
{
    const auto spec = KernelSpec::inner_truncated(0.5, min_support_radius(g8));
    const KernelOperator op(g8, spec);
    std::stringstream buf;
    io::write_kernel_table(buf, op);
    const auto back = io::read_kernel_table(buf);
    EXPECT_EQ(back->spec(), spec);
    EXPECT_EQ(back->grid(), g8);
    const Field rho = density_of(g8, 11);
    EXPECT_EQ(test::rel_l2(back->apply(rho), op.apply(rho)), 0.0);
}
