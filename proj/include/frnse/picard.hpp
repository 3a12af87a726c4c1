#pragma once

/**
 * @file picard.hpp
 * @brief Duhamel map on node trajectories and its Picard iteration.
 *
 * With nodes t_j = j T/m (sign flipped for backward runs) the map is
 *
 *     A(psi)(t_j) = U(t_j) [ phi + int_0^{t_j} U(-s) N(psi(s)) ds ],
 *
 * U(t) = e^{i a1 t Lap}, N = a2 f - a2 g2. The integral is a cumulative
 * quadrature over the fixed nodes, so A is a map on (m+1)-tuples of fields
 * and the iteration psi_{k+1} = A psi_k has well-defined increments.
 * The X-norm is the max over nodes of the H1 norm.
 */

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "frnse/error.hpp"
#include "frnse/grid.hpp"
#include "frnse/kernel.hpp"
#include "frnse/nonlinear.hpp"
#include "frnse/propagate.hpp"
#include "frnse/trajectory.hpp"

namespace frnse {

enum class Quadrature { Trapezoid, Simpson };

inline std::string to_string(Quadrature q) { return q == Quadrature::Simpson ? "simpson" : "trapezoid"; }

inline Quadrature parse_quadrature(std::string_view s)
{
    if (s == "simpson")
        return Quadrature::Simpson;
    if (s == "trapezoid")
        return Quadrature::Trapezoid;
    throw InvalidArgument("unknown quadrature '" + std::string(s) + "' (trapezoid|simpson)");
}

enum class PicardInit { FreeTrajectory, Zero, Given };

inline std::string to_string(PicardInit i)
{
    switch (i) {
    case PicardInit::FreeTrajectory:
        return "free";
    case PicardInit::Zero:
        return "zero";
    case PicardInit::Given:
        return "given";
    }
    return "";
}

inline PicardInit parse_picard_init(std::string_view s)
{
    if (s == "free")
        return PicardInit::FreeTrajectory;
    if (s == "zero")
        return PicardInit::Zero;
    throw InvalidArgument("unknown Picard initializer '" + std::string(s) + "' (free|zero)");
}

struct PicardConfig {
    double T = 0.5;
    int m = 64;
    Quadrature quad = Quadrature::Simpson;
    int max_iter = 50;
    double tol = 1e-10;
    KernelSpec kspec;
    PhysParams params;
    int direction = 1;  ///< +1 for [0, T], -1 for [-T, 0]

    void validate() const
    {
        if (!(T > 0) || !std::isfinite(T))
            throw InvalidArgument("Picard horizon T must be positive");
        if (m < 2)
            throw InvalidArgument("Picard needs m >= 2 time nodes");
        if (quad == Quadrature::Simpson && m % 2 != 0)
            throw InvalidArgument("Simpson quadrature needs an even node count m");
        if (!(tol > 0))
            throw InvalidArgument("Picard tolerance must be positive");
        if (max_iter < 1)
            throw InvalidArgument("Picard needs max_iter >= 1");
        if (direction != 1 && direction != -1)
            throw InvalidArgument("direction must be +1 or -1");
        kspec.validate();
        params.validate();
    }

    double step() const { return direction * T / m; }

    std::vector<double> node_times() const
    {
        std::vector<double> t(m + 1);
        for (int j = 0; j <= m; ++j)
            t[j] = direction * (j * T) / m;
        return t;
    }
};

/// Row j of the cumulative rule: int_0^{t_j} v ~ I_base + dt sum local_l v_l,
/// with I_base the already accumulated integral up to an earlier node.
struct QuadratureRow {
    int base = -1;  ///< -1 means start from zero
    std::vector<std::pair<int, double>> local;
};

inline std::vector<QuadratureRow> quadrature_rows(int m, Quadrature q)
{
    if (m < 2)
        throw InvalidArgument("cumulative quadrature needs m >= 2");
    std::vector<QuadratureRow> rows(m + 1);
    for (int j = 1; j <= m; ++j) {
        auto& r = rows[j];
        if (q == Quadrature::Trapezoid) {
            r.base = j - 1;
            r.local = {{j - 1, 0.5}, {j, 0.5}};
        } else if (m % 2 != 0) {
            throw InvalidArgument("Simpson quadrature needs an even node count m");
        } else if (j % 2 == 0) {
            r.base = j - 2;
            r.local = {{j - 2, 1.0 / 3}, {j - 1, 4.0 / 3}, {j, 1.0 / 3}};
        } else if (j >= 3) {
            // Simpson up to t_{j-3}, then the 3/8 rule over the last three steps.
            r.base = j - 3;
            r.local = {{j - 3, 3.0 / 8}, {j - 2, 9.0 / 8}, {j - 1, 9.0 / 8}, {j, 3.0 / 8}};
        } else if (m >= 3) {
            // First step: integral of the cubic through nodes 0..3.
            r.local = {{0, 9.0 / 24}, {1, 19.0 / 24}, {2, -5.0 / 24}, {3, 1.0 / 24}};
        } else {
            r.local = {{0, 5.0 / 12}, {1, 8.0 / 12}, {2, -1.0 / 12}};
        }
    }
    return rows;
}

/// Dense form of quadrature_rows: w[j][l] in units of the node step.
inline std::vector<std::vector<double>> cumulative_weights(int m, Quadrature q)
{
    const auto rows = quadrature_rows(m, q);
    std::vector<std::vector<double>> w(m + 1, std::vector<double>(m + 1, 0.0));
    for (int j = 1; j <= m; ++j) {
        if (rows[j].base >= 0)
            w[j] = w[rows[j].base];
        for (const auto& [l, c] : rows[j].local)
            w[j][l] += c;
    }
    return w;
}

inline Trajectory free_trajectory(const Field& phi, const PicardConfig& cfg)
{
    Trajectory traj;
    traj.times = cfg.node_times();
    const auto s0 = to_spectral(phi);
    const auto k2 = wavenumber_squared(phi.spec());
    for (double t : traj.times) {
        if (t == 0) {
            traj.fields.push_back(phi);
            continue;
        }
        auto s = s0;
        apply_free_phase(s.coeffs, k2, t, cfg.params.alpha1);
        traj.fields.push_back(from_spectral(std::move(s)));
    }
    return traj;
}

inline Trajectory zero_trajectory(const GridSpec& g, const PicardConfig& cfg)
{
    Trajectory traj;
    traj.times = cfg.node_times();
    traj.fields.assign(traj.times.size(), Field(g));
    return traj;
}

namespace detail {

// Applies the Duhamel map; `deviation` receives max_j ||psi_j - U(t_j) phi||_{H1}.
inline Trajectory duhamel_apply(const Trajectory& traj, const Field& phi, const PicardConfig& cfg,
                                double* deviation)
{
    cfg.validate();
    const GridSpec& g = phi.spec();
    if (traj.size() != std::size_t(cfg.m + 1))
        throw InvalidArgument("trajectory node count does not match the Picard config");
    for (const auto& f : traj.fields)
        if (!(f.spec() == g))
            throw GridMismatch();

    const auto times = cfg.node_times();
    const double a1 = cfg.params.alpha1;
    if (cfg.params.alpha2 == 0) {
        if (deviation)
            *deviation = 0;
        return free_trajectory(phi, cfg);
    }

    const auto k2 = wavenumber_squared(g);
    // V_l = U(-t_l) N(psi_l), in Fourier variables.
    std::vector<std::vector<cplx>> V(cfg.m + 1);
    for (int l = 0; l <= cfg.m; ++l) {
        auto s = to_spectral(nonlinear_term(traj.fields[l], cfg.params, cfg.kspec));
        apply_free_phase(s.coeffs, k2, -times[l], a1);
        V[l] = std::move(s.coeffs);
    }

    const auto rows = quadrature_rows(cfg.m, cfg.quad);
    const double dt = cfg.step();
    const auto phi_hat = to_spectral(phi);
    Trajectory out;
    out.times = times;
    out.fields.reserve(cfg.m + 1);
    out.fields.push_back(phi);
    std::vector<std::vector<cplx>> I(cfg.m + 1);
    I[0].assign(g.size(), cplx(0));
    double dev = 0;
    for (int j = 1; j <= cfg.m; ++j) {
        const auto& row = rows[j];
        I[j] = row.base >= 0 ? I[row.base] : std::vector<cplx>(g.size());
        for (const auto& [l, c] : row.local) {
            const double wl = c * dt;
            for (std::size_t i = 0; i < g.size(); ++i)
                I[j][i] += wl * V[l][i];
        }
        SpectralField s{g, I[j]};
        // U(t_j) is unitary on H1, so the ball deviation is read off the integral.
        dev = std::max(dev, h1_norm(s));
        for (std::size_t i = 0; i < g.size(); ++i)
            s.coeffs[i] += phi_hat.coeffs[i];
        apply_free_phase(s.coeffs, k2, times[j], a1);
        out.fields.push_back(from_spectral(std::move(s)));
    }
    if (deviation)
        *deviation = dev;
    return out;
}

inline bool all_finite(const Trajectory& t)
{
    return std::all_of(t.fields.begin(), t.fields.end(), [](const Field& f) { return f.all_finite(); });
}

} // namespace detail

inline Trajectory duhamel_map(const Trajectory& traj, const Field& phi, const PicardConfig& cfg)
{
    return detail::duhamel_apply(traj, phi, cfg, nullptr);
}

enum class PicardStatus { Converged, NonConvergence, DivergenceDetected };

inline std::string to_string(PicardStatus s)
{
    switch (s) {
    case PicardStatus::Converged:
        return "converged";
    case PicardStatus::NonConvergence:
        return "non_convergence";
    case PicardStatus::DivergenceDetected:
        return "divergence_detected";
    }
    return "";
}

struct ConvergenceReport {
    PicardStatus status = PicardStatus::NonConvergence;
    int iterations = 0;
    std::vector<double> increments;  ///< delta_k = sup_j ||psi^{k+1}_j - psi^k_j||_{H1}
    double residual = 0;             ///< sup_j ||A(psi)_j - psi_j||_{H1} at the returned iterate
    double M = 0;                    ///< ||phi||_{H1}
    double scale = 0;                ///< max node H1 norm of the returned iterate
    double ball_deviation = 0;       ///< max over iterations of sup_j ||psi_j - U(t_j) phi||_{H1}
    std::vector<std::string> warnings;

    bool converged() const { return status == PicardStatus::Converged; }
};

struct PicardResult {
    Trajectory trajectory;
    ConvergenceReport report;
};

/// Iterates the Duhamel map. Failures are reported through report.status;
/// require_converged() turns them into exceptions.
inline PicardResult picard_solve(const Field& phi, const PicardConfig& cfg,
                                 PicardInit init = PicardInit::FreeTrajectory,
                                 const Trajectory* given = nullptr)
{
    cfg.validate();
    if (!phi.all_finite())
        throw InvalidArgument("initial field contains non-finite values");
    Trajectory cur;
    switch (init) {
    case PicardInit::FreeTrajectory:
        cur = free_trajectory(phi, cfg);
        break;
    case PicardInit::Zero:
        cur = zero_trajectory(phi.spec(), cfg);
        break;
    case PicardInit::Given:
        if (!given)
            throw InvalidArgument("Given initializer needs a trajectory");
        cur = *given;
        break;
    }

    ConvergenceReport rep;
    rep.M = h1_norm(phi);
    for (int k = 0; k < cfg.max_iter; ++k) {
        double dev = 0;
        Trajectory next = detail::duhamel_apply(cur, phi, cfg, &dev);
        rep.iterations = k + 1;
        if (!detail::all_finite(next)) {
            rep.status = PicardStatus::DivergenceDetected;
            rep.warnings.push_back("non-finite values at iteration " + std::to_string(k + 1));
            break;
        }
        rep.ball_deviation = std::max(rep.ball_deviation, dev);
        const double delta = sup_h1_distance(next, cur);
        rep.increments.push_back(delta);
        cur = std::move(next);
        if (!std::isfinite(delta)) {
            rep.status = PicardStatus::DivergenceDetected;
            break;
        }
        if (delta < cfg.tol) {
            rep.status = PicardStatus::Converged;
            break;
        }
    }
    if (rep.ball_deviation > rep.M && rep.M > 0)
        rep.warnings.push_back("iterates left the ball of radius ||phi||_H1 around the free trajectory");

    if (rep.status != PicardStatus::DivergenceDetected) {
        const Trajectory again = duhamel_map(cur, phi, cfg);
        rep.residual = sup_h1_distance(again, cur);
    } else {
        rep.residual = std::numeric_limits<double>::infinity();
    }
    for (const auto& f : cur.fields)
        rep.scale = std::max(rep.scale, h1_norm(f));
    fill_diagnostics(cur, cfg.kspec.R);
    return {std::move(cur), std::move(rep)};
}

inline const PicardResult& require_converged(const PicardResult& r)
{
    if (r.report.status == PicardStatus::DivergenceDetected)
        throw DivergenceDetected("Picard iteration produced non-finite values");
    if (r.report.status == PicardStatus::NonConvergence)
        throw NonConvergence("Picard iteration did not reach tolerance in " +
                             std::to_string(r.report.iterations) +
                             " iterations; T may be outside the contraction regime");
    return r;
}

struct ContractionReport {
    bool degenerate = false;         ///< increments vanish after the first (free problem)
    std::vector<double> ratios;      ///< delta_{k+1} / delta_k over increments above the noise floor
    std::vector<double> C_k;         ///< (k + 1) ratio_k / T
    double C_fit = 0;                ///< max C_k: every increment sits under the fitted envelope
    double CT = 0;
    bool monotone_after_first = true;  ///< delta_{k+1} <= delta_k for all k >= 1
    bool ratios_decreasing = true;     ///< ratio_{k+1} <= (1 + tolerance) ratio_k
    bool envelope_dominated = true;    ///< delta_k <= (C T)^k / k! delta_0 (1 + tolerance)
    std::string note;
};

/// Fits the (C T)^k / k! envelope to the recorded increments.
inline ContractionReport contraction_report(const ConvergenceReport& r, double T,
                                            double tolerance = 0.25)
{
    if (!(T > 0))
        throw InvalidArgument("contraction report needs T > 0");
    ContractionReport c;
    const auto& d = r.increments;
    if (d.size() >= 2 && d[1] == 0) {
        c.degenerate = true;
        c.note = "increments vanish after the first application (free evolution)";
        return c;
    }
    if (d.size() == 1 && d[0] == 0) {
        c.degenerate = true;
        c.note = "initial trajectory is already the fixed point";
        return c;
    }
    // Increments at round-off level carry no contraction information.
    const double floor = 1e-13 * std::max(r.scale, d.empty() ? 0.0 : d[0]);
    std::size_t used = 0;
    while (used < d.size() && d[used] > floor)
        ++used;
    if (used < 3)
        throw InvalidArgument("contraction report needs at least 3 increments above round-off");

    for (std::size_t k = 0; k + 1 < used; ++k) {
        const double ratio = d[k + 1] / d[k];
        c.ratios.push_back(ratio);
        c.C_k.push_back((k + 1) * ratio / T);
        c.C_fit = std::max(c.C_fit, c.C_k.back());
        if (k >= 1 && d[k + 1] > d[k])
            c.monotone_after_first = false;
    }
    for (std::size_t k = 0; k + 1 < c.ratios.size(); ++k)
        if (c.ratios[k + 1] > (1 + tolerance) * c.ratios[k])
            c.ratios_decreasing = false;
    c.CT = c.C_fit * T;
    double beta = 1;
    for (std::size_t k = 1; k < used; ++k) {
        beta *= c.CT / double(k);
        if (d[k] > beta * d[0] * (1 + tolerance))
            c.envelope_dominated = false;
    }
    return c;
}

} // namespace frnse
