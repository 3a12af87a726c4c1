#pragma once

#include <random>

#include "frnse/grid.hpp"
#include "frnse/random_field.hpp"

namespace frnse::test {

inline double rel_l2(const Field& a, const Field& b)
{
    const double den = l2_norm(b);
    return den > 0 ? l2_norm(a - b) / den : l2_norm(a - b);
}

inline Field random_field(const GridSpec& g, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    return random_bandlimited(g, rng);
}

} // namespace frnse::test
