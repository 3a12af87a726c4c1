#pragma once

#include <algorithm>
#include <vector>

#include "frnse/error.hpp"
#include "frnse/grid.hpp"
#include "frnse/kernel.hpp"
#include "frnse/nonlinear.hpp"

namespace frnse {

struct NodeDiagnostics {
    double t = 0;
    double l2 = 0;
    double h1 = 0;
    double G1 = 0;  ///< full-kernel G1
};

/// Fields at a sequence of times on one grid.
struct Trajectory {
    std::vector<double> times;
    std::vector<Field> fields;
    std::vector<NodeDiagnostics> diagnostics;

    std::size_t size() const { return fields.size(); }
    const GridSpec& grid() const
    {
        if (fields.empty())
            throw InvalidArgument("empty trajectory has no grid");
        return fields.front().spec();
    }
};

inline NodeDiagnostics diagnose(const Field& psi, double t)
{
    return {t, l2_norm(psi), h1_norm(psi),
            big_g1(psi, KernelSpec::full_for(psi.spec()))};
}

/// G1 diagnostics use the full kernel with the support radius R.
inline NodeDiagnostics diagnose(const Field& psi, double t, double R)
{
    return {t, l2_norm(psi), h1_norm(psi), big_g1(psi, KernelSpec::full(R))};
}

inline void fill_diagnostics(Trajectory& traj, double R)
{
    traj.diagnostics.clear();
    for (std::size_t j = 0; j < traj.size(); ++j)
        traj.diagnostics.push_back(diagnose(traj.fields[j], traj.times[j], R));
}

/// max_j ||a_j - b_j||_{H1}: the discrete L^inf(I, H1) distance.
inline double sup_h1_distance(const Trajectory& a, const Trajectory& b)
{
    if (a.size() != b.size())
        throw InvalidArgument("trajectories have different node counts");
    double d = 0;
    for (std::size_t j = 0; j < a.size(); ++j)
        d = std::max(d, h1_norm(a.fields[j] - b.fields[j]));
    return d;
}

} // namespace frnse
