#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "frnse/grid.hpp"

namespace frnse {

/// Highest retained |mode number| per axis: the top third of each axis band is zeroed.
inline int band_limit(const GridSpec& g) { return g.n / 3; }

/// Complex Gaussian noise on the retained modes, zero elsewhere.
inline Field random_bandlimited(const GridSpec& g, std::mt19937_64& rng)
{
    std::normal_distribution<double> normal(0.0, 1.0);
    const int cut = band_limit(g);
    SpectralField s{g, std::vector<cplx>(g.size())};
    for_each_index(g, [&](int ix, int iy, int iz, std::size_t idx) {
        // Draw for every slot so the stream does not depend on the cut.
        const double re = normal(rng), im = normal(rng);
        if (std::abs(mode_number(ix, g.n)) <= cut && std::abs(mode_number(iy, g.n)) <= cut &&
            std::abs(mode_number(iz, g.n)) <= cut)
            s.coeffs[idx] = {re, im};
    });
    return from_spectral(std::move(s));
}

/// Real nonnegative density |u|^2 of a band-limited random field, unit mass.
inline Field random_density(const GridSpec& g, std::mt19937_64& rng)
{
    Field u = random_bandlimited(g, rng);
    double mass = 0;
    for (auto& v : u.values()) {
        v = std::norm(v);
        mass += v.real();
    }
    mass *= g.cell_volume();
    return u * cplx(1.0 / mass);
}

inline Field scaled_to_h1(Field f, double target)
{
    const double n = h1_norm(f);
    if (n == 0)
        return f;
    return f * cplx(target / n);
}

/// Band-limited random field with ||f||_{H1} = radius.
inline Field random_in_h1_sphere(const GridSpec& g, std::mt19937_64& rng, double radius)
{
    return scaled_to_h1(random_bandlimited(g, rng), radius);
}

} // namespace frnse
