#pragma once

/**
 * @file nonlinear.hpp
 * @brief g1(psi) = psi K(|psi|^2), G1(psi) = <|psi|^2, K|psi|^2>, g2 = G1 psi.
 *
 * The evolution is psi_t = i a1 Lap psi + a2 f(psi) - a2 g2(psi), where f is
 * g1 under the configured kernel (K_n for the truncated problem) and g2 always
 * uses the full kernel.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "frnse/error.hpp"
#include "frnse/grid.hpp"
#include "frnse/kernel.hpp"
#include "frnse/random_field.hpp"

namespace frnse {

struct PhysParams {
    double alpha1 = 1.0;  ///< dispersion, hbar / 2m
    double alpha2 = 1.0;  ///< coupling, 4 pi G m^2 / hbar

    void validate() const
    {
        if (!(alpha1 > 0) || !std::isfinite(alpha1))
            throw InvalidArgument("alpha1 must be positive");
        if (!(alpha2 >= 0) || !std::isfinite(alpha2))
            throw InvalidArgument("alpha2 must be nonnegative");
    }

    friend bool operator==(const PhysParams&, const PhysParams&) = default;
};

inline Field density_field(const Field& psi)
{
    std::vector<cplx> rho(psi.size());
    for (std::size_t i = 0; i < rho.size(); ++i)
        rho[i] = std::norm(psi[i]);
    return Field::unchecked(psi.spec(), std::move(rho));
}

/// K(|psi|^2) as a real array.
inline std::vector<double> hartree_potential(const Field& psi, const KernelSpec& kspec)
{
    return apply_kernel(kspec, psi.spec(), density(psi));
}

inline Field multiply(const Field& psi, const std::vector<double>& potential)
{
    std::vector<cplx> out(psi.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = psi[i] * potential[i];
    return Field::unchecked(psi.spec(), std::move(out));
}

inline Field g1(const Field& psi, const KernelSpec& kspec)
{
    return multiply(psi, hartree_potential(psi, kspec));
}

namespace detail {

// h^3 sum rho V, with round-off negatives below 1e-12 of the scale clipped to 0.
inline double pair_energy(const GridSpec& g, const std::vector<double>& rho,
                          const std::vector<double>& potential)
{
    double acc = 0, scale = 0, vmax = 0;
    for (std::size_t i = 0; i < rho.size(); ++i) {
        acc += rho[i] * potential[i];
        scale += rho[i];
        vmax = std::max(vmax, std::abs(potential[i]));
    }
    const double vol = g.cell_volume();
    acc *= vol;
    scale *= vol * vmax;
    if (acc < 0 && -acc < 1e-12 * scale)
        return 0.0;
    return acc;
}

} // namespace detail

inline double big_g1(const Field& psi, const KernelSpec& kspec)
{
    const auto rho = density(psi);
    return detail::pair_energy(psi.spec(), rho, apply_kernel(kspec, psi.spec(), rho));
}

inline Field g2(const Field& psi, const KernelSpec& kspec)
{
    return psi * cplx(big_g1(psi, kspec));
}

/// a2 f(psi) - a2 G1(psi) psi, where f uses kspec and G1 the full kernel.
inline Field nonlinear_term(const Field& psi, const PhysParams& params, const KernelSpec& kspec)
{
    if (params.alpha2 == 0)
        return Field(psi.spec());
    const auto rho = density(psi);
    const auto full = kspec.as_full();
    const auto v_full = apply_kernel(full, psi.spec(), rho);
    const double G1 = detail::pair_energy(psi.spec(), rho, v_full);
    const auto v_f = kspec == full ? v_full : apply_kernel(kspec, psi.spec(), rho);
    std::vector<cplx> out(psi.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = params.alpha2 * (v_f[i] - G1) * psi[i];
    return Field::unchecked(psi.spec(), std::move(out));
}

inline Field rhs(const Field& psi, const PhysParams& params, const KernelSpec& kspec)
{
    params.validate();
    Field out = laplacian(psi) * cplx(0, params.alpha1);
    if (params.alpha2 != 0)
        out += nonlinear_term(psi, params, kspec);
    return out;
}

/// 2 Re <psi, N(psi)>: the rate of change of ||psi||^2 driven by the nonlinear term.
/// With the full kernel it equals 2 a2 G1 (1 - ||psi||^2).
inline double balance_rate(const Field& psi, const Field& nonlinear)
{
    return 2 * inner(psi, nonlinear).real();
}

enum class LipschitzProbe { G1InL2, G2InL2, G1InLrho };

inline std::string to_string(LipschitzProbe p)
{
    switch (p) {
    case LipschitzProbe::G1InL2:
        return "g1_in_L2";
    case LipschitzProbe::G2InL2:
        return "g2_in_L2";
    case LipschitzProbe::G1InLrho:
        return "g1_in_Lrho";
    }
    return "";
}

struct LipschitzOptions {
    double rho_prime = 1.5;  ///< target exponent of g1 differences
    double r1 = 2.25;        ///< source exponent of field differences
};

struct LipschitzReport {
    LipschitzProbe probe = LipschitzProbe::G2InL2;
    double M = 0;
    std::uint64_t seed = 0;
    int pairs = 0;
    int skipped = 0;         ///< coincident pairs (0/0)
    double max_ratio = 0;
    double half_ratio = 0;   ///< same samples scaled into the ball of radius M/2
    double fit_slope = 0;    ///< log2(max_ratio / half_ratio)
};

namespace detail {

inline double lipschitz_ratio(LipschitzProbe which, const Field& phi, const Field& psi,
                              const KernelSpec& kspec, const LipschitzOptions& opt)
{
    const Field diff = phi - psi;
    switch (which) {
    case LipschitzProbe::G1InL2: {
        const double den = l2_norm(diff);
        return den > 0 ? l2_norm(g1(phi, kspec) - g1(psi, kspec)) / den : -1.0;
    }
    case LipschitzProbe::G2InL2: {
        const double den = l2_norm(diff);
        return den > 0 ? l2_norm(g2(phi, kspec) - g2(psi, kspec)) / den : -1.0;
    }
    case LipschitzProbe::G1InLrho: {
        const double den = lp_norm(diff, opt.r1);
        return den > 0 ? lp_norm(g1(phi, kspec) - g1(psi, kspec), opt.rho_prime) / den : -1.0;
    }
    }
    return -1.0;
}

} // namespace detail

/// Seeded pairs in the H1 ball of radius M (half far pairs, half near pairs).
/// The same unit-radius samples are reused at M/2, so fit_slope measures the
/// growth of the Lipschitz ratio in M directly.
inline LipschitzReport lipschitz_probe(LipschitzProbe which, const GridSpec& grid,
                                       const KernelSpec& kspec, double M, int pairs,
                                       std::uint64_t seed, const LipschitzOptions& opt = {})
{
    if (!(M > 0))
        throw InvalidArgument("ball radius M must be positive");
    if (pairs < 1)
        throw InvalidArgument("lipschitz probe needs at least one pair");
    LipschitzReport rep;
    rep.probe = which;
    rep.M = M;
    rep.seed = seed;
    rep.pairs = pairs;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> radius(0.5, 1.0);
    for (int p = 0; p < pairs; ++p) {
        const Field phi = random_in_h1_sphere(grid, rng, radius(rng));
        Field psi = random_in_h1_sphere(grid, rng, radius(rng));
        if (p % 2 == 1) {
            // Near pair: a small step from phi, kept inside the unit ball.
            psi = (phi + psi * cplx(1e-3 / h1_norm(psi))) * cplx(0.999);
        }
        const double full = detail::lipschitz_ratio(which, phi * cplx(M), psi * cplx(M), kspec, opt);
        if (full < 0) {
            ++rep.skipped;
            continue;
        }
        const double half =
            detail::lipschitz_ratio(which, phi * cplx(0.5 * M), psi * cplx(0.5 * M), kspec, opt);
        rep.max_ratio = std::max(rep.max_ratio, full);
        rep.half_ratio = std::max(rep.half_ratio, half);
    }
    if (rep.max_ratio > 0 && rep.half_ratio > 0)
        rep.fit_slope = std::log2(rep.max_ratio / rep.half_ratio);
    return rep;
}

} // namespace frnse
