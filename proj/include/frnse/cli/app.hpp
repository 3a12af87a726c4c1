#pragma once

/**
 * @file app.hpp
 * @brief Command dispatch for the `frnse` executable.
 *
 * Exit codes: 0 success, 1 a checked assertion failed, 2 solver failure
 * (non-convergence, divergence, suspected blow-up), 3 bad usage or config,
 * 4 I/O failure.
 */

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "frnse/experiments.hpp"
#include "frnse/initial.hpp"
#include "frnse/io/config.hpp"
#include "frnse/io/csv.hpp"
#include "frnse/io/run_dir.hpp"
#include "frnse/io/snapshot.hpp"
#include "frnse/io/svg.hpp"
#include "frnse/picard.hpp"
#include "frnse/stepper.hpp"
#include "frnse/verify.hpp"

namespace frnse::cli {

enum Exit : int { Ok = 0, AssertionFailed = 1, SolverFailed = 2, UsageError = 3, IoFailure = 4 };

/// The data field described by [initial], on the configured grid.
inline Field make_initial(const io::ExperimentConfig& c)
{
    const auto& in = c.initial;
    Field f;
    switch (in.type) {
    case io::InitialType::Gaussian:
        f = gaussian(c.grid, in.sigma, in.center ? *in.center : box_center(c.grid));
        break;
    case io::InitialType::PlaneWave:
        f = plane_wave(c.grid, in.k);
        break;
    case io::InitialType::File: {
        auto snap = io::read_field(in.path);
        if (!(snap.field.spec() == c.grid))
            throw InvalidArgument("initial field " + in.path + " is not on the configured grid");
        f = std::move(snap.field);
        break;
    }
    }
    if (in.h1_norm)
        return with_h1_norm(std::move(f), *in.h1_norm);
    if (in.l2_norm)
        return with_l2_norm(std::move(f), *in.l2_norm);
    return in.type == io::InitialType::File ? f : with_l2_norm(std::move(f), 1.0);
}

inline StepConfig step_config(const io::ExperimentConfig& c)
{
    StepConfig s;
    s.T = c.stepper.T;
    s.dt = c.stepper.dt;
    s.kspec = c.kernel_spec();
    s.params = c.physics;
    s.h1_cap = c.stepper.h1_cap;
    s.dt_min = c.stepper.dt_min;
    s.snapshot_every = c.stepper.snapshot_every;
    return s;
}

struct Outcome {
    int code = Ok;
    std::string status;
    std::string detail;
};

// ---------------------------------------------------------------- commands

inline Outcome run_solve(const io::ExperimentConfig& cfg, io::RunDir& run, std::ostream& out)
{
    const Field phi = make_initial(cfg);
    const auto res = evolve(phi, step_config(cfg));
    const auto& rep = res.report;

    Table diag{"diagnostics", {"t", "l2", "h1", "G1", "balance_residual", "dt"}, {}};
    for (const auto& d : rep.diagnostics)
        diag.add({cell(d.t), cell(d.l2), cell(d.h1), cell(d.G1), cell(d.balance_residual), cell(d.dt)});
    run.write_table(diag);
    {
        io::Series l2{"l2", {}, {}}, h1{"h1", {}, {}};
        for (const auto& d : rep.diagnostics) {
            l2.x.push_back(d.t);
            l2.y.push_back(d.l2);
            h1.x.push_back(d.t);
            h1.y.push_back(d.h1);
        }
        run.write_text("diagnostics.svg", io::render_svg({l2, h1}, {"norms", "t", false, 640, 400}));
    }
    for (std::size_t i = 0; i < res.trajectory.size(); ++i)
        run.write_snapshot("psi_" + std::to_string(i), res.trajectory.fields[i], res.trajectory.times[i]);

    Table summary{"summary", {"status", "steps", "retries", "t_final", "escape_time", "message"}, {}};
    summary.add({to_string(rep.status), cell(rep.steps), cell(rep.retries), cell(rep.t_final),
                 cell(rep.escape_time), rep.message});
    run.write_table(summary);

    const auto& last = rep.diagnostics.back();
    out << "solve: " << to_string(rep.status) << " after " << rep.steps << " steps, t = "
        << io::format_double(rep.t_final) << ", l2 = " << io::format_double(last.l2)
        << ", h1 = " << io::format_double(last.h1) << '\n';
    if (rep.status != StepStatus::Completed) {
        out << "solve: " << rep.message << '\n';
        return {SolverFailed, to_string(rep.status), rep.message};
    }
    return {Ok, to_string(rep.status),
            "steps=" + std::to_string(rep.steps) + " l2=" + io::format_double(last.l2) +
                " h1=" + io::format_double(last.h1)};
}

inline Outcome run_picard(const io::ExperimentConfig& cfg, io::RunDir& run, std::ostream& out)
{
    const Field phi = make_initial(cfg);
    const auto pc = cfg.picard_config();
    const auto res = picard_solve(phi, pc, cfg.picard.init);
    const auto& rep = res.report;

    Table conv{"convergence", {"iteration", "increment", "residual"}, {}};
    for (std::size_t k = 0; k < rep.increments.size(); ++k)
        conv.add({cell(static_cast<int>(k + 1)), cell(rep.increments[k]),
                  k + 1 == rep.increments.size() ? cell(rep.residual) : ""});
    run.write_table(conv);
    {
        io::Series inc{"increment", {}, {}};
        for (std::size_t k = 0; k < rep.increments.size(); ++k) {
            inc.x.push_back(double(k + 1));
            inc.y.push_back(rep.increments[k]);
        }
        run.write_text("convergence.svg",
                       io::render_svg({inc}, {"Picard increments", "iteration", true, 640, 400}));
    }

    Table nodes{"nodes", {"t", "l2", "h1", "G1"}, {}};
    for (const auto& d : res.trajectory.diagnostics)
        nodes.add({cell(d.t), cell(d.l2), cell(d.h1), cell(d.G1)});
    run.write_table(nodes);
    run.write_snapshot("psi_T", res.trajectory.fields.back(), res.trajectory.times.back());

    std::string detail = "iterations=" + std::to_string(rep.iterations) +
                         " residual=" + io::format_double(rep.residual);
    Table ct{"contraction",
             {"C_fit", "CT", "monotone_after_first", "ratios_decreasing", "envelope_dominated", "note"},
             {}};
    try {
        const auto cr = contraction_report(rep, pc.T);
        ct.add({cell(cr.C_fit), cell(cr.CT), cr.monotone_after_first ? "yes" : "no",
                cr.ratios_decreasing ? "yes" : "no", cr.envelope_dominated ? "yes" : "no", cr.note});
        detail += " C_fit=" + io::format_double(cr.C_fit) + " CT=" + io::format_double(cr.CT);
    } catch (const InvalidArgument& e) {
        // Too few increments above round-off to fit an envelope.
        ct.add({"", "", "", "", "", e.what()});
    }
    run.write_table(ct);
    for (const auto& w : rep.warnings) {
        out << "picard: warning: " << w << '\n';
        detail += " warning=\"" + w + "\"";
    }
    out << "picard: " << to_string(rep.status) << " after " << rep.iterations
        << " iterations, residual " << io::format_double(rep.residual) << '\n';
    return {rep.converged() ? Ok : SolverFailed, to_string(rep.status), detail};
}

inline std::vector<int> battery_ids(const std::vector<std::string>& battery)
{
    std::vector<int> ids;
    for (const auto& b : battery) {
        if (b == "all") {
            for (const auto& [id, name] : verify::criteria())
                ids.push_back(id);
            continue;
        }
        auto n = io::parse_int<int>(b);
        ids.push_back(n ? *n : verify::criterion_id(b));
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

inline Outcome run_verify(const io::ExperimentConfig& cfg, io::RunDir& run, std::ostream& out)
{
    verify::Options opt;
    opt.seed = cfg.experiment.seed;
    opt.quick = cfg.experiment.quick;
    std::vector<Assertion> rows;
    int failed = 0;
    for (int id : battery_ids(cfg.experiment.battery)) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto r = verify::run_criterion(id, opt);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        rows.insert(rows.end(), r.checks.begin(), r.checks.end());
        char tag[8];
        std::snprintf(tag, sizeof tag, "c%02d_", id);
        for (auto t : r.tables) {
            t.name = tag + t.name;
            run.write_table(t);
        }
        std::string detail;
        for (const auto& c : r.checks)
            if (!c.passed)
                detail += (detail.empty() ? "" : "; ") + describe(c);
        for (const auto& n : r.notes)
            detail += (detail.empty() ? "" : "; ") + n;
        run.record({r.title, r.passed() ? "pass" : "fail", detail});
        out << (r.passed() ? "PASS" : "FAIL") << "  " << id << ' ' << r.title << "  ("
            << io::format_fixed(std::round(secs * 10) / 10) << " s)\n";
        for (const auto& c : r.checks)
            if (!c.passed)
                out << "      " << describe(c) << '\n';
        failed += r.passed() ? 0 : 1;
    }
    run.write_table(assertion_table(rows));
    return {failed ? AssertionFailed : Ok, failed ? "fail" : "pass",
            std::to_string(failed) + " criteria failed"};
}

inline Outcome run_kernel_norms(const io::ExperimentConfig& cfg, io::RunDir& run, std::ostream& out)
{
    const auto& x = cfg.experiment;
    const auto st = tail_norm_study(cfg.grid, x.a_list, x.p, x.trials, x.seed);
    run.write_table(st.table());
    int over = 0;
    for (const auto& r : st.rows) {
        out << "kernel-norms: a = " << io::format_double(r.a) << "  estimate "
            << io::format_double(r.estimate) << "  bound " << io::format_double(r.bound)
            << (r.resolved ? "" : "  (unresolved: a below grid spacing)") << '\n';
        if (r.estimate > r.bound)
            ++over;
        if (!r.warning.empty())
            run.record_error("kernel-norms", r.warning);
    }
    out << "kernel-norms: log-log slope " << io::format_double(st.slope) << '\n';
    return {over ? AssertionFailed : Ok, over ? "fail" : "pass",
            "slope=" + io::format_double(st.slope) + " above_bound=" + std::to_string(over)};
}

using Command = Outcome (*)(const io::ExperimentConfig&, io::RunDir&, std::ostream&);

inline Command find_command(const std::string& name)
{
    if (name == "solve")
        return run_solve;
    if (name == "picard")
        return run_picard;
    if (name == "verify")
        return run_verify;
    if (name == "kernel-norms")
        return run_kernel_norms;
    return nullptr;
}

/// One command inside its own run directory, with the manifest always
/// written: errors become a nonzero code and an entry in the error summary.
inline int execute(const std::string& name, const io::ExperimentConfig& cfg,
                   const std::filesystem::path& root, std::ostream& out, std::ostream& err,
                   std::string* run_path = nullptr, Outcome* outcome = nullptr)
{
    auto run = std::make_unique<io::RunDir>(root, cfg, name);
    if (run_path)
        *run_path = run->path().string();
    Outcome o;
    try {
        o = find_command(name)(cfg, *run, out);
    } catch (const IoError& e) {
        err << name << ": I/O error: " << e.what() << '\n';
        o = {IoFailure, "error", e.what()};
        run->record_error(name, e.what());
        // Leave PARTIAL in place and note the cause there.
        try {
            io::write_atomic(run->path() / "PARTIAL", std::string("aborted: ") + e.what() + "\n");
        } catch (const std::exception&) {
        }
        if (outcome)
            *outcome = o;
        return o.code;
    } catch (const InvalidArgument& e) {
        err << name << ": " << e.what() << '\n';
        o = {UsageError, "error", e.what()};
        run->record_error(name, e.what());
    } catch (const Error& e) {
        err << name << ": " << e.what() << '\n';
        o = {SolverFailed, "error", e.what()};
        run->record_error(name, e.what());
    }
    run->record({name, o.status, o.detail});
    run->finish(o.code);
    out << name << ": results in " << run->path().string() << '\n';
    if (outcome)
        *outcome = o;
    return o.code;
}

/// Every point of the [sweep] product, each in its own subdirectory of one
/// parent run, on a pool of `jobs` threads. Output is replayed in order.
inline int execute_sweep(const std::string& sub, const io::ExperimentConfig& cfg,
                         const std::filesystem::path& root, int jobs, std::ostream& out, std::ostream& err)
{
    if (cfg.sweep.empty())
        throw InvalidArgument("sweep needs a [sweep] section with at least one axis");
    const auto points = io::expand_sweep(cfg);
    io::RunDir parent(root, cfg, "sweep " + sub);

    struct Slot {
        std::ostringstream out, err;
        std::string path;
        Outcome outcome;
        int code = 0;
    };
    std::vector<Slot> slots(points.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < points.size();)
            slots[i].code = execute(sub, points[i], parent.path(), slots[i].out, slots[i].err,
                                    &slots[i].path, &slots[i].outcome);
    };
    const int n = std::max(1, std::min<int>(jobs, static_cast<int>(points.size())));
    std::vector<std::thread> pool;
    for (int j = 1; j < n; ++j)
        pool.emplace_back(worker);
    worker();
    for (auto& t : pool)
        t.join();

    std::vector<std::string> axes;
    for (const auto& [k, v] : cfg.sweep)
        axes.push_back(k);
    Table summary{"sweep", {"index"}, {}};
    summary.header.insert(summary.header.end(), axes.begin(), axes.end());
    for (auto h : {"config_hash", "status", "exit_code", "directory", "detail"})
        summary.header.push_back(h);

    // Index of each point in the product (last axis fastest).
    int worst = Ok;
    for (std::size_t i = 0; i < points.size(); ++i) {
        out << slots[i].out.str();
        err << slots[i].err.str();
        std::vector<std::string> row{std::to_string(i)};
        std::size_t rem = i, stride = points.size();
        for (const auto& [k, v] : cfg.sweep) {
            stride /= v.size();
            row.push_back(v[rem / stride]);
            rem %= stride;
        }
        row.push_back(io::hash_prefix(points[i]));
        row.push_back(slots[i].outcome.status);
        row.push_back(std::to_string(slots[i].code));
        row.push_back(std::filesystem::path(slots[i].path).filename().string());
        row.push_back(slots[i].outcome.detail);
        summary.add(row);
        parent.record({"point " + std::to_string(i), slots[i].outcome.status,
                       std::filesystem::path(slots[i].path).filename().string()});
        worst = std::max(worst, slots[i].code);
    }
    parent.write_table(summary);
    parent.finish(worst);
    out << "sweep: " << points.size() << " runs in " << parent.path().string() << '\n';
    return worst;
}

inline int execute_plot(const std::string& input, std::string output, const std::string& title,
                        const std::string& x_column, bool log_y, std::ostream& out)
{
    const std::string text = io::read_file(input);
    io::ChartOptions opt;
    opt.title = title.empty() ? std::filesystem::path(input).stem().string() : title;
    opt.x_label = x_column;
    opt.log_y = log_y;
    if (output.empty())
        output = std::filesystem::path(input).replace_extension(".svg").string();
    io::write_atomic(output, io::render_svg(io::series_from_csv(text, x_column), opt));
    out << "plot: wrote " << output << '\n';
    return Ok;
}

// ---------------------------------------------------------------- entry point

inline io::ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& sets,
                                        const std::string& seed)
{
    const std::string text = path.empty() ? std::string() : io::read_file(path);
    std::vector<io::Override> ov;
    for (const auto& s : sets)
        ov.push_back(io::parse_override(s));
    if (!seed.empty())
        ov.push_back({"experiment.seed", seed});
    return io::parse_config(text, ov);
}

inline int main(int argc, const char* const* argv, std::ostream& out = std::cout,
                std::ostream& err = std::cerr)
{
    CLI::App app{"frnse: numerical experiments for the frictional Newton-Schroedinger equation"};
    app.set_version_flag("--version", std::string(version));
    app.require_subcommand(1);

    std::string config_path, out_dir;
    std::vector<std::string> sets;
    std::string seed;
    int jobs = 1;
    auto common = [&](CLI::App* c) {
        c->add_option("--config", config_path, "configuration file")->check(CLI::ExistingFile);
        c->add_option("--out", out_dir, "output root (default: [output] dir, $FRNSE_OUT, runs)");
        c->add_option("--seed", seed, "override experiment.seed (u64)");
        c->add_option("--set", sets, "override, section.key=value (repeatable)");
    };

    auto* solve = app.add_subcommand("solve", "integrate with IFRK4 using [stepper]");
    auto* picard = app.add_subcommand("picard", "Picard fixed point using [picard], with contraction report");
    auto* ver = app.add_subcommand("verify", "run the verification battery ([experiment] battery)");
    auto* sweep = app.add_subcommand("sweep", "run a command over the [sweep] product");
    auto* norms = app.add_subcommand("kernel-norms", "estimate tail kernel norms over [experiment] a_list");
    auto* plot = app.add_subcommand("plot", "render a CSV table as an SVG line chart");
    for (auto* c : {solve, picard, ver, sweep, norms})
        common(c);
    bool quick = false;
    ver->add_flag("--quick", quick, "reduced problem sizes");
    std::string sweep_cmd = "solve";
    sweep->add_option("--command", sweep_cmd, "command run at each point")
        ->check(CLI::IsMember({"solve", "picard", "verify", "kernel-norms"}));
    sweep->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);

    std::string input, output, title, x_column = "t";
    bool log_y = false;
    plot->add_option("--input", input, "CSV file")->required()->check(CLI::ExistingFile);
    plot->add_option("--output", output, "SVG path (default: input with .svg)");
    plot->add_option("--title", title, "chart title");
    plot->add_option("--x", x_column, "abscissa column");
    plot->add_flag("--log-y", log_y, "logarithmic ordinate");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e, out, err);
        return rc == 0 ? Ok : UsageError;
    }

    try {
        if (plot->parsed())
            return execute_plot(input, output, title, x_column, log_y, out);
        auto cfg = load_config(config_path, sets, seed);
        if (quick)
            cfg.experiment.quick = true;
        const auto root = io::output_root(out_dir, cfg);
        if (sweep->parsed())
            return execute_sweep(sweep_cmd, cfg, root, jobs, out, err);
        for (auto* c : {solve, picard, ver, norms})
            if (c->parsed())
                return execute(c->get_name(), cfg, root, out, err);
    } catch (const io::ConfigError& e) {
        err << e.what() << '\n';
        return UsageError;
    } catch (const IoError& e) {
        err << "I/O error: " << e.what() << '\n';
        return IoFailure;
    } catch (const Error& e) {
        err << e.what() << '\n';
        return UsageError;
    }
    return UsageError;
}

} // namespace frnse::cli
