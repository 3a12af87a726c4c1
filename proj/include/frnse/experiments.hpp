#pragma once

/**
 * @file experiments.hpp
 * @brief Measurable checks built on the solvers: truncation convergence,
 * continuous dependence, the normalization law, inequality and Lipschitz
 * batteries, tail-norm scaling and convergence-order studies.
 *
 * No unknown constant is assumed numerically. Every check is a scaling law,
 * a monotonicity, a stabilization test or a self-consistency budget.
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
#include "frnse/nonlinear.hpp"
#include "frnse/picard.hpp"
#include "frnse/random_field.hpp"
#include "frnse/report.hpp"
#include "frnse/stepper.hpp"

namespace frnse {

// ---------------------------------------------------------------- truncation

struct TruncationRow {
    double a = 0;
    double E = 0;  ///< sup-node H1 distance to the full solution
    int iterations = 0;
    PicardStatus status = PicardStatus::Converged;
};

struct TruncationResult {
    std::vector<TruncationRow> rows;
    int full_iterations = 0;
    bool monotone = true;  ///< E nonincreasing as a decreases
    double slope = 0;      ///< log-log slope of E against a

    Table table() const
    {
        Table t{"truncation_convergence", {"a", "E", "iterations", "status"}, {}};
        for (const auto& r : rows)
            t.add({cell(r.a), cell(r.E), cell(r.iterations), to_string(r.status)});
        return t;
    }
};

/// Solves the truncated problem for each radius and the full problem once.
/// Radii must be decreasing and resolved by the grid (h < a).
inline TruncationResult truncation_convergence(const Field& phi, const PicardConfig& base,
                                               const std::vector<double>& a_list)
{
    const double h = phi.spec().spacing();
    for (std::size_t i = 0; i < a_list.size(); ++i) {
        if (!(a_list[i] > h))
            throw InvalidArgument("truncation radius " + io::format_double(a_list[i]) +
                                  " is not resolved by the grid (h = " + io::format_double(h) + ")");
        if (i > 0 && !(a_list[i] < a_list[i - 1]))
            throw InvalidArgument("truncation radii must be decreasing");
    }
    PicardConfig full_cfg = base;
    full_cfg.kspec = base.kspec.as_full();
    const auto full = require_converged(picard_solve(phi, full_cfg));

    TruncationResult res;
    res.full_iterations = full.report.iterations;
    std::vector<double> as, es;
    for (double a : a_list) {
        PicardConfig cfg = base;
        cfg.kspec = KernelSpec::inner_truncated(a, full_cfg.kspec.R);
        const auto run = require_converged(picard_solve(phi, cfg));
        TruncationRow row{a, sup_h1_distance(run.trajectory, full.trajectory),
                          run.report.iterations, run.report.status};
        if (!res.rows.empty() && row.E > res.rows.back().E)
            res.monotone = false;
        res.rows.push_back(row);
        as.push_back(a);
        es.push_back(row.E);
    }
    res.slope = loglog_slope(as, es);
    return res;
}

// ------------------------------------------------------- continuous dependence

struct DependenceRow {
    double delta = 0;
    double ratio = 0;  ///< sup-node ||psi - psi~||_{H1} / delta
};

struct DependenceResult {
    std::vector<DependenceRow> rows;
    double C_fit = 0;
    double T = 0;
    double envelope = 0;   ///< exp(C_fit T)
    double spread = 0;     ///< max ratio / min ratio across the ladder
    double max_ratio = 0;

    Table table() const
    {
        Table t{"continuous_dependence", {"delta", "ratio", "envelope"}, {}};
        for (const auto& r : rows)
            t.add({cell(r.delta), cell(r.ratio), cell(envelope)});
        return t;
    }
};

inline DependenceResult continuous_dependence(const Field& phi, const std::vector<double>& deltas,
                                              const PicardConfig& cfg, std::uint64_t seed)
{
    for (std::size_t i = 1; i < deltas.size(); ++i)
        if (!(deltas[i] < deltas[i - 1]))
            throw InvalidArgument("perturbation sizes must be decreasing");
    const auto base = require_converged(picard_solve(phi, cfg));
    const auto contraction = contraction_report(base.report, cfg.T);

    std::mt19937_64 rng(seed);
    const Field direction = random_in_h1_sphere(phi.spec(), rng, 1.0);

    DependenceResult res;
    res.C_fit = contraction.C_fit;
    res.T = cfg.T;
    res.envelope = std::exp(res.C_fit * cfg.T);
    double lo = std::numeric_limits<double>::infinity(), hi = 0;
    for (double d : deltas) {
        if (d == 0)
            continue;
        const Field perturbed = phi + direction * cplx(d);
        const auto run = require_converged(picard_solve(perturbed, cfg));
        const double r = sup_h1_distance(run.trajectory, base.trajectory) / d;
        res.rows.push_back({d, r});
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    res.max_ratio = hi;
    res.spread = res.rows.empty() ? 1.0 : hi / lo;
    return res;
}

// ------------------------------------------------------------ normalization law

struct NormLawResult {
    double max_residual = 0;    ///< max |d/dt ||psi||^2 - 2 a2 G1 (1 - ||psi||^2)|
    double min_derivative = 0;  ///< smallest central-difference d/dt ||psi||^2
    double max_derivative = 0;
    int nodes = 0;              ///< interior nodes examined
};

namespace detail {

inline NormLawResult norm_law(const std::vector<double>& t, const std::vector<double>& l2,
                              const std::vector<double>& G1, const PhysParams& params)
{
    NormLawResult res;
    if (t.size() < 3)
        throw InvalidArgument("normalization law check needs at least 3 nodes");
    res.min_derivative = std::numeric_limits<double>::infinity();
    res.max_derivative = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 1; j + 1 < t.size(); ++j) {
        const double d = (l2[j + 1] * l2[j + 1] - l2[j - 1] * l2[j - 1]) / (t[j + 1] - t[j - 1]);
        const double law = 2 * params.alpha2 * G1[j] * (1 - l2[j] * l2[j]);
        res.max_residual = std::max(res.max_residual, std::abs(d - law));
        res.min_derivative = std::min(res.min_derivative, d);
        res.max_derivative = std::max(res.max_derivative, d);
        ++res.nodes;
    }
    return res;
}

} // namespace detail

/// Central differences of the node L2 norms against the balance law.
inline NormLawResult norm_law_check(const Trajectory& traj, const PhysParams& params)
{
    std::vector<double> t, l2, G1;
    for (const auto& d : traj.diagnostics) {
        t.push_back(d.t);
        l2.push_back(d.l2);
        G1.push_back(d.G1);
    }
    return detail::norm_law(t, l2, G1, params);
}

inline NormLawResult norm_law_check(const std::vector<StepDiagnostics>& diag,
                                    const PhysParams& params)
{
    std::vector<double> t, l2, G1;
    for (const auto& d : diag) {
        t.push_back(d.t);
        l2.push_back(d.l2);
        G1.push_back(d.G1);
    }
    return detail::norm_law(t, l2, G1, params);
}

// ------------------------------------------------------------ inequality battery

struct RatioStats {
    std::string name;
    double sup_n = 0;    ///< supremum over the first `samples` draws
    double sup_2n = 0;   ///< supremum over twice as many draws
    double median = 0;   ///< median over all 2n draws
    double growth() const { return sup_n > 0 ? sup_2n / sup_n : 1.0; }
    double max_over_median() const { return median > 0 ? sup_2n / median : 0.0; }
};

struct InequalityReport {
    int samples = 0;
    std::vector<RatioStats> ratios;
    std::vector<double> g1_ratio_M;
    std::vector<double> g1_ratio_sup;
    double g1_ratio_slope = 0;

    const RatioStats& find(const std::string& name) const
    {
        for (const auto& r : ratios)
            if (r.name == name)
                return r;
        throw InvalidArgument("no ratio named " + name);
    }

    Table table() const
    {
        Table t{"inequality_battery", {"ratio", "sup_n", "sup_2n", "growth", "median", "max_over_median"}, {}};
        for (const auto& r : ratios)
            t.add({r.name, cell(r.sup_n), cell(r.sup_2n), cell(r.growth()), cell(r.median),
                   cell(r.max_over_median())});
        return t;
    }
};

namespace detail {

inline RatioStats ratio_stats(std::string name, const std::vector<double>& values, int n)
{
    RatioStats s;
    s.name = std::move(name);
    for (int i = 0; i < int(values.size()); ++i) {
        if (i < n)
            s.sup_n = std::max(s.sup_n, values[i]);
        s.sup_2n = std::max(s.sup_2n, values[i]);
    }
    auto sorted = values;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t k = sorted.size();
    s.median = k % 2 ? sorted[k / 2] : 0.5 * (sorted[k / 2 - 1] + sorted[k / 2]);
    return s;
}

} // namespace detail

/// Empirical suprema of the Sobolev, Riesz and g1 ratios (without constants)
/// over seeded band-limited samples, at `samples` and at 2 * samples draws.
inline InequalityReport inequality_battery(const GridSpec& grid, int samples, std::uint64_t seed,
                                           double riesz_p = 1.125)
{
    if (samples < 1)
        throw InvalidArgument("inequality battery needs samples >= 1");
    if (!(riesz_p > 1 && riesz_p < 1.5))
        throw InvalidArgument("Riesz exponent p must lie in (1, 3/2)");
    const double riesz_q = 3 * riesz_p / (3 - 2 * riesz_p);
    const auto kfull = KernelSpec::full_for(grid);
    const std::vector<double> sob_p{2, 3, 4, 6};

    std::vector<std::vector<double>> sob(sob_p.size());
    std::vector<double> riesz, g1_ratio;
    std::mt19937_64 rng(seed);
    for (int s = 0; s < 2 * samples; ++s) {
        const Field psi = random_in_h1_sphere(grid, rng, 1.0);
        const double h1sq = std::pow(h1_norm(psi), 2);
        for (std::size_t i = 0; i < sob_p.size(); ++i)
            sob[i].push_back(std::pow(lp_norm(psi, sob_p[i]), 2) / h1sq);
        g1_ratio.push_back(l2_norm(g1(psi, kfull)) / h1sq);
        const Field rho = density_field(psi);
        riesz.push_back(lp_norm(apply_kernel(kfull, rho), riesz_q) / lp_norm(rho, riesz_p));
    }

    InequalityReport rep;
    rep.samples = samples;
    for (std::size_t i = 0; i < sob_p.size(); ++i)
        rep.ratios.push_back(
            detail::ratio_stats("sobolev_L" + io::format_double(sob_p[i]), sob[i], samples));
    rep.ratios.push_back(detail::ratio_stats("riesz", riesz, samples));
    rep.ratios.push_back(detail::ratio_stats("g1_over_h1sq", g1_ratio, samples));

    // Ratio ||g1||_{L2} / ||psi||^2_{H1} on the spheres of radius M: slope 1 in M.
    for (double M : {0.5, 1.0, 2.0}) {
        std::mt19937_64 r2(seed + 1);
        double sup = 0;
        for (int s = 0; s < samples; ++s) {
            const Field psi = random_in_h1_sphere(grid, r2, M);
            sup = std::max(sup, l2_norm(g1(psi, kfull)) / std::pow(h1_norm(psi), 2));
        }
        rep.g1_ratio_M.push_back(M);
        rep.g1_ratio_sup.push_back(sup);
    }
    rep.g1_ratio_slope = loglog_slope(rep.g1_ratio_M, rep.g1_ratio_sup);
    return rep;
}

// ------------------------------------------------------------ Lipschitz battery

struct LipschitzBattery {
    std::vector<LipschitzReport> reports;
    double slope_g1_L2 = 0;
    double slope_g2_L2 = 0;
    double slope_g1_Lrho = 0;

    Table table() const
    {
        Table t{"lipschitz_battery", {"probe", "M", "seed", "pairs", "max_ratio", "fit_slope"}, {}};
        for (const auto& r : reports)
            t.add({to_string(r.probe), cell(r.M), cell(r.seed), cell(r.pairs), cell(r.max_ratio),
                   cell(r.fit_slope)});
        return t;
    }
};

inline LipschitzBattery lipschitz_battery(const GridSpec& grid, const KernelSpec& kspec,
                                          const std::vector<double>& M_list, int pairs,
                                          std::uint64_t seed, const LipschitzOptions& opt = {})
{
    LipschitzBattery b;
    for (auto probe : {LipschitzProbe::G1InL2, LipschitzProbe::G2InL2, LipschitzProbe::G1InLrho}) {
        std::vector<double> ms, rs;
        for (double M : M_list) {
            b.reports.push_back(lipschitz_probe(probe, grid, kspec, M, pairs, seed, opt));
            ms.push_back(M);
            rs.push_back(b.reports.back().max_ratio);
        }
        const double slope = loglog_slope(ms, rs);
        if (probe == LipschitzProbe::G1InL2)
            b.slope_g1_L2 = slope;
        else if (probe == LipschitzProbe::G2InL2)
            b.slope_g2_L2 = slope;
        else
            b.slope_g1_Lrho = slope;
    }
    return b;
}

// ------------------------------------------------------- pointwise domination

struct DominationResult {
    int samples = 0;
    double max_excess = 0;          ///< max over samples, points, radii of |f_n| - |g1|
    double max_tail_identity = 0;   ///< max |g1 - f_n - psi Tail(|psi|^2)| relative to max |g1|
};

/// |f_n(psi)| <= |g1(psi)| pointwise for inner-truncated kernels of the given radii.
inline DominationResult domination_check(const GridSpec& grid, const std::vector<double>& radii,
                                         int samples, std::uint64_t seed)
{
    const double R = min_support_radius(grid);
    const auto kfull = KernelSpec::full(R);
    DominationResult res;
    res.samples = samples;
    std::mt19937_64 rng(seed);
    for (int s = 0; s < samples; ++s) {
        const Field psi = random_in_h1_sphere(grid, rng, 1.0);
        const Field full = g1(psi, kfull);
        const double scale = max_abs(full);
        for (double a : radii) {
            const Field fn = g1(psi, KernelSpec::inner_truncated(a, R));
            for (std::size_t i = 0; i < psi.size(); ++i)
                res.max_excess = std::max(res.max_excess, std::abs(fn[i]) - std::abs(full[i]));
            const Field tail = g1(psi, KernelSpec::tail(a, R));
            const Field gap = full - fn - tail;
            if (scale > 0)
                res.max_tail_identity = std::max(res.max_tail_identity, max_abs(gap) / scale);
        }
    }
    return res;
}

// ------------------------------------------------------------ tail norm study

struct TailNormStudy {
    std::vector<TailNormEstimate> rows;
    double slope = 0;

    Table table() const
    {
        Table t{"tail_norms", {"a", "p", "estimate", "bound", "estimate_over_bound", "resolved"}, {}};
        for (const auto& r : rows)
            t.add({cell(r.a), cell(r.p), cell(r.estimate), cell(r.bound), cell(r.estimate / r.bound),
                   r.resolved ? "yes" : "no"});
        return t;
    }
};

inline TailNormStudy tail_norm_study(const GridSpec& grid, const std::vector<double>& a_list,
                                     double p, int trials, std::uint64_t seed,
                                     int power_iterations = 60)
{
    TailNormStudy st;
    std::vector<double> as, es;
    for (double a : a_list) {
        st.rows.push_back(tail_norm_estimate(grid, a, p, trials, seed, power_iterations));
        as.push_back(a);
        es.push_back(st.rows.back().estimate);
    }
    st.slope = loglog_slope(as, es);
    return st;
}

// ------------------------------------------------------------ order studies

/// Self-convergence of a sequence of refinements by factor 2 each.
struct OrderStudy {
    std::vector<double> steps;         ///< dt per level (coarse to fine)
    std::vector<double> differences;   ///< ||level_i - level_{i+1}||_{H1} at the terminal time
    std::vector<double> sup_differences;  ///< sup over shared nodes (Picard) or = differences
    double order = 0;                  ///< log2 of the last difference ratio
    double factor = 0;                 ///< last difference ratio
    double budget = 0;                 ///< error budget of the finest level: its last self-difference
    Field terminal;                    ///< finest terminal state

    Table table(const std::string& name) const
    {
        Table t{name, {"dt", "terminal_difference", "sup_node_difference"}, {}};
        for (std::size_t i = 0; i < differences.size(); ++i)
            t.add({cell(steps[i]), cell(differences[i]), cell(sup_differences[i])});
        return t;
    }
};

/// Picard at node counts m_list (each twice the previous). Differences compare
/// each level with the next finer one on the coarse nodes.
inline OrderStudy picard_order_study(const Field& phi, const PicardConfig& cfg,
                                     const std::vector<int>& m_list)
{
    if (m_list.size() < 3)
        throw InvalidArgument("order study needs at least three levels");
    std::vector<PicardResult> runs;
    for (int m : m_list) {
        if (!runs.empty() && std::size_t(m) != 2 * runs.back().trajectory.size() - 2)
            throw InvalidArgument("node counts must double between levels");
        PicardConfig c = cfg;
        c.m = m;
        runs.push_back(require_converged(picard_solve(phi, c)));
    }
    OrderStudy st;
    for (std::size_t i = 0; i + 1 < runs.size(); ++i) {
        const auto& a = runs[i].trajectory;
        const auto& b = runs[i + 1].trajectory;
        double sup = 0;
        for (std::size_t j = 0; j < a.size(); ++j)
            sup = std::max(sup, h1_norm(a.fields[j] - b.fields[2 * j]));
        st.steps.push_back(cfg.T / m_list[i]);
        st.differences.push_back(h1_norm(a.fields.back() - b.fields.back()));
        st.sup_differences.push_back(sup);
    }
    const auto& d = st.differences;
    st.factor = d[d.size() - 2] / d.back();
    st.order = std::log2(st.factor);
    st.budget = d.back();
    st.terminal = runs.back().trajectory.fields.back();
    return st;
}

/// IFRK4 at steps dt, dt/2 compared against a dt/8 reference; factor is
/// e(dt) / e(dt/2), which is close to 16 for a fourth-order method.
struct StepperOrderStudy {
    double dt = 0;
    double error_dt = 0;
    double error_half = 0;
    double error_quarter = 0;
    double factor = 0;
    double order = 0;
    double budget = 0;  ///< ||psi_{dt/4} - psi_{dt/8}||_{H1}: budget of the dt/8 run
    Field terminal;     ///< dt/8 terminal state

    Table table() const
    {
        Table t{"stepper_order", {"dt", "error_vs_reference"}, {}};
        t.add({cell(dt), cell(error_dt)});
        t.add({cell(dt / 2), cell(error_half)});
        t.add({cell(dt / 4), cell(error_quarter)});
        return t;
    }
};

inline StepperOrderStudy stepper_order_study(const Field& phi, const StepConfig& cfg)
{
    auto run = [&](double dt) {
        StepConfig c = cfg;
        c.dt = dt;
        auto r = evolve(phi, c);
        if (r.report.status != StepStatus::Completed)
            throw DivergenceDetected("order study run did not complete: " + r.report.message);
        return r.trajectory.fields.back();
    };
    StepperOrderStudy st;
    st.dt = cfg.dt;
    const Field a = run(cfg.dt), b = run(cfg.dt / 2), c = run(cfg.dt / 4), ref = run(cfg.dt / 8);
    st.error_dt = h1_norm(a - ref);
    st.error_half = h1_norm(b - ref);
    st.error_quarter = h1_norm(c - ref);
    st.factor = st.error_dt / st.error_half;
    st.order = std::log2(st.factor);
    st.budget = st.error_quarter;
    st.terminal = ref;
    return st;
}

} // namespace frnse
