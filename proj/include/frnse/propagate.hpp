#pragma once

// Free group e^{i a1 t Lap}: solves i psi_t = -a1 Lap psi exactly on the grid
// by multiplying each Fourier coefficient by exp(-i a1 |k|^2 t).

#include <array>
#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "frnse/grid.hpp"

namespace frnse {

/// Multiplies coefficients in place by exp(-i a1 k2 t), given |k|^2 per slot.
inline void apply_free_phase(std::span<cplx> coeffs, const std::vector<double>& k2, double t,
                             double alpha1)
{
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        const double ph = -alpha1 * k2[i] * t;
        coeffs[i] *= cplx(std::cos(ph), std::sin(ph));
    }
}

inline Field free_evolve(const Field& psi, double t, double alpha1)
{
    if (!(alpha1 > 0))
        throw InvalidArgument("alpha1 must be positive");
    if (!std::isfinite(t))
        throw InvalidArgument("evolution time must be finite");
    if (t == 0)
        return psi;
    auto s = to_spectral(psi);
    apply_free_phase(s.coeffs, wavenumber_squared(psi.spec()), t, alpha1);
    return from_spectral(std::move(s));
}

/// Closed-form free evolution of exp(-|x-c|^2 / (2 sigma^2)) in free space:
/// (sigma^2 / w)^{3/2} exp(-|x-c|^2 / (2 w)) with w = sigma^2 + 2 i a1 t.
inline Field free_gaussian(const GridSpec& g, double sigma, std::array<double, 3> c, double t,
                           double alpha1)
{
    const cplx w(sigma * sigma, 2 * alpha1 * t);
    const cplx amp = std::pow(sigma * sigma / w, 1.5);
    return Field::from_function(g, [&](double x, double y, double z) {
        const double r2 = (x - c[0]) * (x - c[0]) + (y - c[1]) * (y - c[1]) + (z - c[2]) * (z - c[2]);
        return amp * std::exp(-r2 / (2.0 * w));
    });
}

} // namespace frnse
