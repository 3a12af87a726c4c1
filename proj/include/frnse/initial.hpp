#pragma once

#include <array>
#include <cmath>
#include <numbers>

#include "frnse/error.hpp"
#include "frnse/grid.hpp"

namespace frnse {

/// exp(-|x - c|^2 / (2 sigma^2)), unnormalized.
inline Field gaussian(const GridSpec& g, double sigma, std::array<double, 3> c)
{
    if (!(sigma > 0))
        throw InvalidArgument("Gaussian width sigma must be positive");
    return Field::from_function(g, [&](double x, double y, double z) {
        const double r2 = (x - c[0]) * (x - c[0]) + (y - c[1]) * (y - c[1]) + (z - c[2]) * (z - c[2]);
        return cplx(std::exp(-0.5 * r2 / (sigma * sigma)));
    });
}

inline std::array<double, 3> box_center(const GridSpec& g)
{
    return {0.5 * g.L, 0.5 * g.L, 0.5 * g.L};
}

/// Grid plane wave exp(i k.x) with k = (2 pi / L) m for integer m.
inline Field plane_wave(const GridSpec& g, std::array<int, 3> m)
{
    const double dk = 2 * std::numbers::pi / g.L;
    return Field::from_function(g, [&](double x, double y, double z) {
        const double ph = dk * (m[0] * x + m[1] * y + m[2] * z);
        return cplx(std::cos(ph), std::sin(ph));
    });
}

inline Field with_l2_norm(Field f, double target)
{
    const double n = l2_norm(f);
    if (n == 0)
        throw InvalidArgument("cannot normalize a zero field");
    return f * cplx(target / n);
}

inline Field with_h1_norm(Field f, double target)
{
    const double n = h1_norm(f);
    if (n == 0)
        throw InvalidArgument("cannot normalize a zero field");
    return f * cplx(target / n);
}

} // namespace frnse
