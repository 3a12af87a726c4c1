#pragma once

/**
 * @file verify.hpp
 * @brief The desk-scale verification battery, one entry per acceptance item.
 *
 * Each criterion builds its own problem (grids and data are part of the
 * criterion, not of the user config), returns pass/fail rows and CSV tables,
 * and is deterministic given the seed.
 */

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "frnse/experiments.hpp"
#include "frnse/initial.hpp"
#include "frnse/io/csv.hpp"
#include "frnse/io/snapshot.hpp"
#include "frnse/kernel.hpp"
#include "frnse/nonlinear.hpp"
#include "frnse/picard.hpp"
#include "frnse/propagate.hpp"
#include "frnse/report.hpp"
#include "frnse/stepper.hpp"

namespace frnse::verify {

struct Options {
    std::uint64_t seed = 20261014;
    bool quick = false;  ///< reduced sizes, used by the determinism check and smoke tests
};

struct CriterionResult {
    int id = 0;
    std::string title;
    std::vector<Assertion> checks;
    std::vector<Table> tables;
    std::vector<std::string> notes;

    bool passed() const
    {
        for (const auto& c : checks)
            if (!c.passed)
                return false;
        return !checks.empty();
    }
};

inline const std::vector<std::pair<int, std::string>>& criteria()
{
    static const std::vector<std::pair<int, std::string>> list{
        {1, "kernel_oracle"},       {2, "propagator"},          {3, "tail_norm_scaling"},
        {4, "picard_convergence"},  {5, "cross_method"},        {6, "normalization_law"},
        {7, "truncation"},          {8, "continuous_dependence"}, {9, "nonlinearity_bounds"},
        {10, "determinism"}};
    return list;
}

inline std::string criterion_name(int id)
{
    for (const auto& [i, name] : criteria())
        if (i == id)
            return name;
    throw InvalidArgument("unknown criterion " + std::to_string(id));
}

inline int criterion_id(const std::string& name)
{
    for (const auto& [i, n] : criteria())
        if (n == name || std::to_string(i) == name)
            return i;
    throw InvalidArgument("unknown battery entry '" + name + "'");
}

namespace detail {

// Small-data problem shared by the Picard criteria: centred Gaussian, sigma = 1,
// on a box wide enough that it decays below 1e-8 at the faces.
inline GridSpec small_data_grid(bool quick) { return quick ? GridSpec{16, 12.8} : GridSpec{32, 12.8}; }

inline Field small_data(const GridSpec& g, double h1 = 0.5)
{
    return with_h1_norm(gaussian(g, 1.0, box_center(g)), h1);
}

inline PicardConfig small_data_picard(const GridSpec& g, int m, double T, double tol)
{
    PicardConfig cfg;
    cfg.T = T;
    cfg.m = m;
    cfg.quad = Quadrature::Simpson;
    cfg.tol = tol;
    cfg.max_iter = 60;
    cfg.kspec = KernelSpec::full_for(g);
    cfg.params = {1.0, 1.0};
    return cfg;
}

inline std::string tag(double v) { return io::format_double(v); }

} // namespace detail

// 1. FFT convolution against the direct double sum, all variants, 8^3.
inline CriterionResult kernel_oracle(const Options& opt)
{
    CriterionResult res{1, criterion_name(1), {}, {}, {}};
    const GridSpec g{8, 2.0};
    const double R = min_support_radius(g);
    const std::vector<KernelSpec> specs{KernelSpec::full(R), KernelSpec::inner_truncated(0.5, R),
                                        KernelSpec::tail(0.5, R)};
    std::mt19937_64 rng(opt.seed);
    Table t{"kernel_oracle", {"variant", "sample", "relative_l2_error"}, {}};
    for (const auto& spec : specs) {
        double worst = 0;
        for (int s = 0; s < 3; ++s) {
            const Field rho = random_density(g, rng);
            const Field fast = apply_kernel(spec, rho);
            const Field direct = direct_convolution_oracle(spec, rho);
            const double err = l2_norm(fast - direct) / l2_norm(direct);
            worst = std::max(worst, err);
            t.add({to_string(spec.variant), cell(s), cell(err)});
        }
        res.checks.push_back(check_lt("kernel_oracle", "relative_l2_" + to_string(spec.variant),
                                      worst, 1e-10, "oracle"));
    }
    res.tables.push_back(std::move(t));
    return res;
}

// 2. Plane-wave phase, unitarity, free Gaussian closed form.
inline CriterionResult propagator(const Options& opt)
{
    CriterionResult res{2, criterion_name(2), {}, {}, {}};
    const double a1 = 1.0;
    {
        const GridSpec g{opt.quick ? 8 : 16, 2 * std::numbers::pi};
        const std::array<int, 3> m{1, 2, -3};
        const double t = 0.7;
        const Field pw = plane_wave(g, m);
        const double k2 = m[0] * m[0] + m[1] * m[1] + m[2] * m[2];
        const Field exact = pw * std::exp(cplx(0, -a1 * k2 * t));
        res.checks.push_back(check_lt("propagator", "plane_wave_max_error",
                                      max_abs(free_evolve(pw, t, a1) - exact), 1e-12, "identity"));
    }
    {
        const GridSpec g{opt.quick ? 16 : 32, 8.0};
        std::mt19937_64 rng(opt.seed);
        const Field psi = random_bandlimited(g, rng);
        const Field out = free_evolve(psi, 0.37, a1);
        res.checks.push_back(check_lt("propagator", "l2_unitarity",
                                      std::abs(l2_norm(out) / l2_norm(psi) - 1), 1e-12, "identity"));
        res.checks.push_back(check_lt("propagator", "h1_unitarity",
                                      std::abs(h1_norm(out) / h1_norm(psi) - 1), 1e-12, "identity"));
    }
    {
        const GridSpec g{32, 16.0};
        const double sigma = 1.0, t = 0.25;
        const auto c = box_center(g);
        const Field psi0 = gaussian(g, sigma, c);
        const Field num = free_evolve(psi0, t, a1);
        const Field exact = free_gaussian(g, sigma, c, t, a1);
        const double err = l2_norm(num - exact) / l2_norm(exact);
        res.checks.push_back(check_lt("propagator", "free_gaussian_relative_l2", err, 1e-6, "oracle"));
        // |psi| has width |w| / sigma with w = sigma^2 + 2 i a1 t.
        const double width = std::abs(cplx(sigma * sigma, 2 * a1 * t)) / sigma;
        res.checks.push_back(check_gt("propagator", "free_gaussian_boundary_distance_over_width",
                                      0.5 * g.L / width, 6.0, "precondition"));
    }
    return res;
}

// 3. Tail operator norms against 2 pi a^2 and their scaling in a.
inline CriterionResult tail_norm_scaling(const Options& opt)
{
    CriterionResult res{3, criterion_name(3), {}, {}, {}};
    const GridSpec g{32, 1.6};  // h = 0.05
    const std::vector<double> as{0.4, 0.2, 0.1};
    const auto st = tail_norm_study(g, as, 2.0, opt.quick ? 2 : 4, opt.seed, opt.quick ? 20 : 60);
    for (const auto& r : st.rows)
        res.checks.push_back(check_le("tail_norm_scaling", "estimate_over_bound_a=" + detail::tag(r.a),
                                      r.estimate / r.bound, 1.0, "bound"));
    res.checks.push_back(check_in("tail_norm_scaling", "loglog_slope", st.slope, 1.7, 2.3, "scaling-law"));
    res.tables.push_back(st.table());
    return res;
}

// 4. Picard increments on small data and the factorial envelope.
inline CriterionResult picard_convergence(const Options& opt)
{
    CriterionResult res{4, criterion_name(4), {}, {}, {}};
    const GridSpec g = detail::small_data_grid(opt.quick);
    const Field phi = detail::small_data(g);
    const auto cfg = detail::small_data_picard(g, opt.quick ? 16 : 64, 0.5, 1e-10);
    const auto run = picard_solve(phi, cfg);
    const auto& rep = run.report;
    res.checks.push_back(check_true("picard_convergence", "converged", rep.converged(), "status"));
    Table inc{"picard_increments", {"iteration", "increment"}, {}};
    for (std::size_t k = 0; k < rep.increments.size(); ++k)
        inc.add({cell(int(k)), cell(rep.increments[k])});
    res.tables.push_back(std::move(inc));
    const auto c = contraction_report(rep, cfg.T);
    res.checks.push_back(check_lt("picard_convergence", "fitted_CT", c.CT, 0.5, "precondition"));
    res.checks.push_back(check_true("picard_convergence", "monotone_after_first",
                                    c.monotone_after_first, "envelope"));
    res.checks.push_back(check_true("picard_convergence", "ratios_decreasing_25pct",
                                    c.ratios_decreasing, "envelope"));
    res.checks.push_back(check_true("picard_convergence", "factorial_envelope_25pct",
                                    c.envelope_dominated, "envelope"));
    res.checks.push_back(check_lt("picard_convergence", "fixed_point_residual", rep.residual, 1e-8,
                                  "identity"));
    // A different starting trajectory reaches the same fixed point. (Starting
    // from zero is no test here: A(0) is exactly the free trajectory.)
    const Trajectory other = free_trajectory(phi * cplx(0.5, 0.5), cfg);
    const auto from_other = picard_solve(phi, cfg, PicardInit::Given, &other);
    res.checks.push_back(check_true("picard_convergence", "second_initializer_converged",
                                    from_other.report.converged(), "status"));
    res.checks.push_back(check_le("picard_convergence", "initializer_agreement",
                                  sup_h1_distance(from_other.trajectory, run.trajectory),
                                  10 * cfg.tol, "uniqueness"));
    Table ratios{"picard_ratios", {"k", "ratio", "C_k"}, {}};
    for (std::size_t k = 0; k < c.ratios.size(); ++k)
        ratios.add({cell(int(k)), cell(c.ratios[k]), cell(c.C_k[k])});
    res.tables.push_back(std::move(ratios));
    return res;
}

// 5. Picard and IFRK4 terminal states against their self-convergence budgets.
inline CriterionResult cross_method(const Options& opt)
{
    CriterionResult res{5, criterion_name(5), {}, {}, {}};
    const GridSpec g = detail::small_data_grid(opt.quick);
    const Field phi = detail::small_data(g, 1.0);
    const double T = 0.5;
    const auto pcfg = detail::small_data_picard(g, 16, T, 1e-13);
    const std::vector<int> ms = opt.quick ? std::vector<int>{8, 16, 32} : std::vector<int>{16, 32, 64};
    const auto pst = picard_order_study(phi, pcfg, ms);

    StepConfig scfg;
    scfg.T = T;
    scfg.dt = T / (opt.quick ? 4 : 8);
    scfg.kspec = pcfg.kspec;
    scfg.params = pcfg.params;
    const auto sst = stepper_order_study(phi, scfg);

    res.checks.push_back(check_in("cross_method", "picard_simpson_order", pst.order, 3.2, 4.8,
                                  "self-convergence"));
    res.checks.push_back(check_in("cross_method", "ifrk4_halving_factor", sst.factor, 12.8, 19.2,
                                  "self-convergence"));
    const double diff = h1_norm(pst.terminal - sst.terminal);
    res.checks.push_back(check_le("cross_method", "terminal_h1_difference", diff,
                                  pst.budget + sst.budget, "budget"));
    res.tables.push_back(pst.table("picard_order"));
    res.tables.push_back(sst.table());
    Table t{"cross_method", {"picard_budget", "stepper_budget", "terminal_difference"}, {}};
    t.add({cell(pst.budget), cell(sst.budget), cell(diff)});
    res.tables.push_back(std::move(t));
    return res;
}

// 6. Unit sphere invariance and attraction from below.
inline CriterionResult normalization_law(const Options& opt)
{
    CriterionResult res{6, criterion_name(6), {}, {}, {}};
    const GridSpec g = detail::small_data_grid(opt.quick);
    StepConfig cfg;
    cfg.T = 0.5;
    cfg.dt = opt.quick ? 1e-2 : 1e-3;
    cfg.kspec = KernelSpec::full_for(g);
    cfg.params = {1.0, 1.0};
    const Field unit = with_l2_norm(gaussian(g, 1.0, box_center(g)), 1.0);
    const auto run = evolve(unit, cfg);
    double drift = 0;
    for (const auto& d : run.report.diagnostics)
        drift = std::max(drift, std::abs(d.l2 * d.l2 - 1));
    res.checks.push_back(check_true("normalization_law", "unit_run_completed",
                                    run.report.status == StepStatus::Completed, "status"));
    res.checks.push_back(check_lt("normalization_law", "unit_norm_drift", drift, 1e-6, "identity"));

    StepConfig sub = cfg;
    const Field half = with_l2_norm(gaussian(g, 1.0, box_center(g)), 0.5);
    const auto run2 = evolve(half, sub);
    const auto law = norm_law_check(run2.report.diagnostics, cfg.params);
    res.checks.push_back(check_gt("normalization_law", "subunit_min_dnorm2_dt", law.min_derivative,
                                  0.0, "sign"));
    res.checks.push_back(check_lt("normalization_law", "subunit_balance_residual", law.max_residual,
                                  1e-6, "identity"));
    Table t{"normalization_law", {"t", "l2_unit", "l2_subunit"}, {}};
    const auto& a = run.report.diagnostics;
    const auto& b = run2.report.diagnostics;
    const std::size_t stride = std::max<std::size_t>(1, (a.size() - 1) / (b.size() - 1));
    for (std::size_t j = 0; j < b.size(); ++j)
        t.add({cell(b[j].t), cell(a[std::min(a.size() - 1, j * stride)].l2), cell(b[j].l2)});
    res.tables.push_back(std::move(t));
    return res;
}

// 7. Truncated solutions approaching the full one as a shrinks.
inline CriterionResult truncation(const Options& opt)
{
    CriterionResult res{7, criterion_name(7), {}, {}, {}};
    const GridSpec g{opt.quick ? 16 : 32, 3.0};
    const double sigma = 0.22;  // decays below 1e-8 at the faces
    const Field phi = with_h1_norm(gaussian(g, sigma, box_center(g)), 0.5);
    PicardConfig cfg = detail::small_data_picard(g, 16, 0.01, 1e-12);
    const std::vector<double> as = opt.quick ? std::vector<double>{0.4, 0.2}
                                             : std::vector<double>{0.4, 0.2, 0.1};
    const auto tr = truncation_convergence(phi, cfg, as);
    res.checks.push_back(check_true("truncation", "E_nonincreasing", tr.monotone, "monotonicity"));
    res.checks.push_back(check_lt("truncation", "boundary_decay", boundary_max_abs(phi) / max_abs(phi),
                                  1e-8, "precondition"));
    res.notes.push_back("loglog slope of E(a): " + io::format_double(tr.slope));
    res.tables.push_back(tr.table());
    return res;
}

// 8. Lipschitz dependence on the initial data.
inline CriterionResult continuous_dependence_check(const Options& opt)
{
    CriterionResult res{8, criterion_name(8), {}, {}, {}};
    const GridSpec g = detail::small_data_grid(opt.quick);
    const Field phi = detail::small_data(g);
    const auto cfg = detail::small_data_picard(g, opt.quick ? 8 : 32, 0.5, 1e-12);
    const std::vector<double> deltas{1e-2, 1e-3, 1e-4};
    const auto dep = continuous_dependence(phi, deltas, cfg, opt.seed);
    res.checks.push_back(check_lt("continuous_dependence", "ratio_spread", dep.spread, 2.0, "stability"));
    res.checks.push_back(check_le("continuous_dependence", "max_ratio_over_envelope",
                                  dep.max_ratio / (dep.envelope * 1.25), 1.0, "envelope"));
    res.tables.push_back(dep.table());
    return res;
}

// 9. Pointwise domination, g2 Lipschitz growth, g1 ratio stability.
inline CriterionResult nonlinearity_bounds(const Options& opt)
{
    CriterionResult res{9, criterion_name(9), {}, {}, {}};
    const GridSpec g{16, 4.0};  // h = 0.25
    const auto dom = domination_check(g, {0.1, 0.3, 0.6, 1.0}, opt.quick ? 20 : 200, opt.seed);
    res.checks.push_back(check_le("nonlinearity_bounds", "domination_max_excess", dom.max_excess, 1e-10,
                                  "pointwise"));
    res.checks.push_back(check_lt("nonlinearity_bounds", "tail_identity_relative",
                                  dom.max_tail_identity, 1e-12, "identity"));

    const auto lip = lipschitz_battery(g, KernelSpec::full_for(g), {0.5, 1.0, 2.0},
                                       opt.quick ? 4 : 16, opt.seed + 7);
    res.checks.push_back(check_le("nonlinearity_bounds", "g2_lipschitz_slope", lip.slope_g2_L2, 3.5,
                                  "scaling-law"));
    res.tables.push_back(lip.table());

    const auto ineq = inequality_battery(g, opt.quick ? 10 : 50, opt.seed + 11);
    const auto& gr = ineq.find("g1_over_h1sq");
    res.checks.push_back(check_true("nonlinearity_bounds", "g1_ratio_finite",
                                    std::isfinite(gr.sup_2n) && gr.sup_2n > 0, "stability"));
    res.checks.push_back(check_lt("nonlinearity_bounds", "g1_ratio_doubling_growth", gr.growth(), 2.0,
                                  "stability"));
    res.checks.push_back(check_lt("nonlinearity_bounds", "g1_ratio_max_over_median",
                                  gr.max_over_median(), 10.0, "stability"));
    res.tables.push_back(ineq.table());
    res.notes.push_back("g1 Lipschitz slope in M: " + io::format_double(lip.slope_g1_L2) +
                        "; g1 ratio slope in M: " + io::format_double(ineq.g1_ratio_slope));
    return res;
}

CriterionResult run_criterion(int id, const Options& opt);

inline std::string render_csv(const std::vector<CriterionResult>& results)
{
    std::ostringstream out;
    std::vector<Assertion> rows;
    for (const auto& r : results)
        rows.insert(rows.end(), r.checks.begin(), r.checks.end());
    io::write_csv(out, assertion_table(rows));
    for (const auto& r : results)
        for (const auto& t : r.tables)
            io::write_csv(out, t);
    return out.str();
}

// 10. Byte-identical CSV output across repeated runs, snapshot round trip.
inline CriterionResult determinism(const Options& opt)
{
    CriterionResult res{10, criterion_name(10), {}, {}, {}};
    Options q = opt;
    q.quick = true;
    auto battery = [&] {
        std::vector<CriterionResult> rs;
        for (int id : {1, 2, 4, 9})
            rs.push_back(run_criterion(id, q));
        return render_csv(rs);
    };
    const std::string first = battery();
    const std::string second = battery();
    res.checks.push_back(check_true("determinism", "csv_byte_identical", first == second, "format"));

    const GridSpec g{8, 1.5};
    std::mt19937_64 rng(opt.seed);
    const Field f = random_bandlimited(g, rng);
    std::stringstream buf;
    io::write_field(buf, f, 0.125);
    const auto back = io::read_field(buf);
    bool same = back.field.spec() == g && back.t == 0.125;
    for (std::size_t i = 0; same && i < f.size(); ++i)
        same = std::memcmp(&f[i], &back.field[i], sizeof(cplx)) == 0;
    res.checks.push_back(check_true("determinism", "snapshot_round_trip_bitwise", same, "format"));
    return res;
}

inline CriterionResult run_criterion(int id, const Options& opt)
{
    switch (id) {
    case 1:
        return kernel_oracle(opt);
    case 2:
        return propagator(opt);
    case 3:
        return tail_norm_scaling(opt);
    case 4:
        return picard_convergence(opt);
    case 5:
        return cross_method(opt);
    case 6:
        return normalization_law(opt);
    case 7:
        return truncation(opt);
    case 8:
        return continuous_dependence_check(opt);
    case 9:
        return nonlinearity_bounds(opt);
    case 10:
        return determinism(opt);
    }
    throw InvalidArgument("unknown criterion " + std::to_string(id));
}

} // namespace frnse::verify
