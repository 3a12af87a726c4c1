#pragma once

/**
 * @file config.hpp
 * @brief Sectioned `key = value` configuration with strict validation.
 *
 *     # comment
 *     [grid]
 *     n = 32
 *     L = 12.8
 *
 * Sections: grid, physics, kernel, initial, picard, stepper, experiment,
 * output, sweep. Unknown sections or keys, duplicate keys, malformed values
 * and violated invariants are all errors that cite the offending line.
 * Missing keys take the defaults below. serialize() writes the canonical
 * form (every key, fixed order, shortest round-trip numbers); config_hash()
 * is FNV-1a 64 over that form without the [output] section.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "frnse/error.hpp"
#include "frnse/grid.hpp"
#include "frnse/io/format.hpp"
#include "frnse/kernel.hpp"
#include "frnse/nonlinear.hpp"
#include "frnse/picard.hpp"

namespace frnse::io {

enum class ConfigErrorKind { Syntax, UnknownKey, DuplicateKey, TypeError, ConstraintViolation };

inline std::string to_string(ConfigErrorKind k)
{
    switch (k) {
    case ConfigErrorKind::Syntax:
        return "SyntaxError";
    case ConfigErrorKind::UnknownKey:
        return "UnknownKey";
    case ConfigErrorKind::DuplicateKey:
        return "DuplicateKey";
    case ConfigErrorKind::TypeError:
        return "TypeError";
    case ConfigErrorKind::ConstraintViolation:
        return "ConstraintViolation";
    }
    return "";
}

struct ConfigIssue {
    ConfigErrorKind kind;
    int line;  ///< 1-based; 0 for command-line overrides and whole-file problems
    std::string message;

    std::string str() const
    {
        return (line > 0 ? "line " + std::to_string(line) : std::string("override")) + ": " +
               to_string(kind) + ": " + message;
    }
};

class ConfigError : public InvalidArgument {
public:
    explicit ConfigError(std::vector<ConfigIssue> issues)
        : InvalidArgument(render(issues)), issues_(std::move(issues))
    {
    }
    const std::vector<ConfigIssue>& issues() const { return issues_; }

private:
    static std::string render(const std::vector<ConfigIssue>& issues)
    {
        std::string s = "invalid configuration";
        for (const auto& i : issues)
            s += "\n  " + i.str();
        return s;
    }
    std::vector<ConfigIssue> issues_;
};

enum class InitialType { Gaussian, PlaneWave, File };

struct InitialConfig {
    InitialType type = InitialType::Gaussian;
    double sigma = 1.0;
    std::optional<std::array<double, 3>> center;  ///< empty: box centre
    std::optional<double> l2_norm;                ///< default 1 when neither norm is given
    std::optional<double> h1_norm;
    std::array<int, 3> k{1, 0, 0};
    std::string path;

    friend bool operator==(const InitialConfig&, const InitialConfig&) = default;
};

struct KernelConfig {
    KernelVariant variant = KernelVariant::Full;
    double a = 0.1;
    std::optional<double> R;  ///< empty: sqrt(3) L

    KernelSpec spec(const GridSpec& g) const
    {
        const double r = R ? *R : min_support_radius(g);
        switch (variant) {
        case KernelVariant::Full:
            return KernelSpec::full(r);
        case KernelVariant::InnerTruncated:
            return KernelSpec::inner_truncated(a, r);
        case KernelVariant::Tail:
            return KernelSpec::tail(a, r);
        }
        return KernelSpec::full(r);
    }

    friend bool operator==(const KernelConfig&, const KernelConfig&) = default;
};

struct PicardSection {
    double T = 0.5;
    int m = 64;
    Quadrature quad = Quadrature::Simpson;
    double tol = 1e-10;
    int max_iter = 50;
    PicardInit init = PicardInit::FreeTrajectory;

    friend bool operator==(const PicardSection&, const PicardSection&) = default;
};

struct StepperSection {
    double T = 0.5;
    double dt = 1e-3;
    double h1_cap = 1e3;
    double dt_min = 1e-8;
    int snapshot_every = 0;

    friend bool operator==(const StepperSection&, const StepperSection&) = default;
};

struct ExperimentSection {
    std::vector<std::string> battery{"all"};
    std::uint64_t seed = 20261014;
    bool quick = false;
    std::vector<double> a_list{0.4, 0.2, 0.1};  ///< radii for kernel-norms
    double p = 2.0;                             ///< exponent for kernel-norms
    int trials = 4;

    friend bool operator==(const ExperimentSection&, const ExperimentSection&) = default;
};

struct ExperimentConfig {
    GridSpec grid{32, 12.8};
    PhysParams physics;
    KernelConfig kernel;
    InitialConfig initial;
    PicardSection picard;
    StepperSection stepper;
    ExperimentSection experiment;
    std::string output_dir;  ///< empty: $FRNSE_OUT, then "runs"
    std::map<std::string, std::vector<std::string>> sweep;  ///< "section.key" -> values

    KernelSpec kernel_spec() const { return kernel.spec(grid); }

    PicardConfig picard_config() const
    {
        PicardConfig c;
        c.T = picard.T;
        c.m = picard.m;
        c.quad = picard.quad;
        c.tol = picard.tol;
        c.max_iter = picard.max_iter;
        c.kspec = kernel_spec();
        c.params = physics;
        return c;
    }

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

namespace detail {

struct Entry {
    std::string value;
    int line = 0;
};

using Entries = std::map<std::string, Entry>;  // "section.key" -> value

struct Issues {
    std::vector<ConfigIssue> list;
    void add(ConfigErrorKind k, int line, std::string msg) { list.push_back({k, line, std::move(msg)}); }
};

inline std::vector<std::string> split_list(std::string_view s)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = s.find(',', start);
        out.emplace_back(trim(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start)));
        if (comma == std::string_view::npos)
            break;
        start = comma + 1;
    }
    return out;
}

struct Reader {
    Issues& issues;
    int line;
    std::string key;

    bool fail(const std::string& what)
    {
        issues.add(ConfigErrorKind::TypeError, line, key + ": " + what);
        return false;
    }
    bool number(const std::string& v, double& out)
    {
        auto d = parse_double(trim(v));
        if (!d || !std::isfinite(*d))
            return fail("expected a finite number, got '" + v + "'");
        out = *d;
        return true;
    }
    bool integer(const std::string& v, int& out)
    {
        auto d = parse_int<int>(trim(v));
        if (!d)
            return fail("expected an integer, got '" + v + "'");
        out = *d;
        return true;
    }
    bool u64(const std::string& v, std::uint64_t& out)
    {
        auto d = parse_int<std::uint64_t>(trim(v));
        if (!d)
            return fail("expected an unsigned 64-bit integer, got '" + v + "'");
        out = *d;
        return true;
    }
    bool boolean(const std::string& v, bool& out)
    {
        if (v == "true")
            out = true;
        else if (v == "false")
            out = false;
        else
            return fail("expected true or false, got '" + v + "'");
        return true;
    }
    bool numbers(const std::string& v, std::vector<double>& out)
    {
        std::vector<double> vals;
        for (const auto& item : split_list(v)) {
            double d;
            if (!number(item, d))
                return false;
            vals.push_back(d);
        }
        out = std::move(vals);
        return true;
    }
    template <class T, class Fn>
    bool triple(const std::string& v, std::array<T, 3>& out, Fn&& one)
    {
        const auto items = split_list(v);
        if (items.size() != 3)
            return fail("expected three comma-separated values, got '" + v + "'");
        std::array<T, 3> r{};
        for (int i = 0; i < 3; ++i)
            if (!one(items[i], r[i]))
                return false;
        out = r;
        return true;
    }
    template <class E, class Parse>
    bool enumeration(const std::string& v, E& out, Parse&& parse)
    {
        try {
            out = parse(v);
        } catch (const InvalidArgument& e) {
            return fail(e.what());
        }
        return true;
    }
};

using Setter = std::function<void(ExperimentConfig&, const std::string&, Reader&)>;

inline InitialType parse_initial_type(std::string_view s)
{
    if (s == "gaussian")
        return InitialType::Gaussian;
    if (s == "plane_wave")
        return InitialType::PlaneWave;
    if (s == "file")
        return InitialType::File;
    throw InvalidArgument("unknown initial type '" + std::string(s) + "' (gaussian|plane_wave|file)");
}

inline std::string initial_type_name(InitialType t)
{
    switch (t) {
    case InitialType::Gaussian:
        return "gaussian";
    case InitialType::PlaneWave:
        return "plane_wave";
    case InitialType::File:
        return "file";
    }
    return "";
}

// Registry of every accepted key, in canonical order.
inline const std::vector<std::pair<std::string, Setter>>& registry()
{
    static const std::vector<std::pair<std::string, Setter>> keys{
        {"grid.n", [](ExperimentConfig& c, const std::string& v, Reader& r) { r.integer(v, c.grid.n); }},
        {"grid.L", [](ExperimentConfig& c, const std::string& v, Reader& r) { r.number(v, c.grid.L); }},
        {"physics.alpha1",
         [](ExperimentConfig& c, const std::string& v, Reader& r) { r.number(v, c.physics.alpha1); }},
        {"physics.alpha2",
         [](ExperimentConfig& c, const std::string& v, Reader& r) { r.number(v, c.physics.alpha2); }},
        {"kernel.variant",
         [](ExperimentConfig& c, const std::string& v, Reader& r) {
             r.enumeration(v, c.kernel.variant, parse_kernel_variant);
         }},
        {"kernel.a", [](ExperimentConfig& c, const std::string& v, Reader& r) { r.number(v, c.kernel.a); }},
        {"kernel.R",
         [](ExperimentConfig& c, const std::string& v, Reader& r) {
             if (v == "auto") {
                 c.kernel.R.reset();
                 return;
             }
             double d;
             if (r.number(v, d))
                 c.kernel.R = d;
         }},
        {"initial.type",
         [](ExperimentConfig& c, const std::string& v, Reader& r) {
             r.enumeration(v, c.initial.type, parse_initial_type);
         }},
        {"initial.sigma",
         [](ExperimentConfig& c, const std::string& v, Reader& r) { r.number(v, c.initial.sigma); }},
        {"initial.center",
         [](ExperimentConfig& c, const std::string& v, Reader& r) {
             if (v == "auto") {
                 c.initial.center.reset();
                 return;
             }
             std::array<double, 3> a;
             if (r.triple(v, a, [&](const std::string& s, double& o) { return r.number(s, o); }))
                 c.initial.center = a;
         }},
        {"initial.l2_norm",
         [](ExperimentConfig& c, const std::string& v, Reader& r) {
             double d;
             if (r.number(v, d))
                 c.initial.l2_norm = d;
         }},
        {"initial.h1_norm",
         [](ExperimentConfig& c, const std::string& v, Reader& r) {
             double d;
             if (r.number(v, d))
                 c.initial.h1_norm = d;
         }},
        {"initial.k",
         [](ExperimentConfig& c, const std::string& v, Reader& r) {
             r.triple(v, c.initial.k, [&](const std::string& s, int& o) { return r.integer(s, o); });
         }},
        {"initial.path", [](ExperimentConfig& c, const std::string& v, Reader&) { c.initial.path = v; }},
        {"picard.T", [](ExperimentConfig& c, const std::string& v, Reader& r) { r.number(v, c.picard.T); }},
        {"picard.m", [](ExperimentConfig& c, const std::string& v, Reader& r) { r.integer(v, c.picard.m); }},
        {"picard.quad",
         [](ExperimentConfig& c, const std::string& v, Reader& r) {
             r.enumeration(v, c.picard.quad, parse_quadrature);
         }},
        {"picard.tol",
         [](ExperimentConfig& c, const std::string& v, Reader& r) { r.number(v, c.picard.tol); }},
        {"picard.max_iter",
         [](ExperimentConfig& c, const std::string& v, Reader& r) { r.integer(v, c.picard.max_iter); }},
        {"picard.init",
         [](ExperimentConfig& c, const std::string& v, Reader& r) {
             r.enumeration(v, c.picard.init, parse_picard_init);
         }},
        {"stepper.T", [](ExperimentConfig& c, const std::string& v, Reader& r) { r.number(v, c.stepper.T); }},
        {"stepper.dt",
         [](ExperimentConfig& c, const std::string& v, Reader& r) { r.number(v, c.stepper.dt); }},
        {"stepper.h1_cap",
         [](ExperimentConfig& c, const std::string& v, Reader& r) { r.number(v, c.stepper.h1_cap); }},
        {"stepper.dt_min",
         [](ExperimentConfig& c, const std::string& v, Reader& r) { r.number(v, c.stepper.dt_min); }},
        {"stepper.snapshot_every",
         [](ExperimentConfig& c, const std::string& v, Reader& r) {
             r.integer(v, c.stepper.snapshot_every);
         }},
        {"experiment.battery",
         [](ExperimentConfig& c, const std::string& v, Reader&) { c.experiment.battery = split_list(v); }},
        {"experiment.seed",
         [](ExperimentConfig& c, const std::string& v, Reader& r) { r.u64(v, c.experiment.seed); }},
        {"experiment.quick",
         [](ExperimentConfig& c, const std::string& v, Reader& r) { r.boolean(v, c.experiment.quick); }},
        {"experiment.a_list",
         [](ExperimentConfig& c, const std::string& v, Reader& r) { r.numbers(v, c.experiment.a_list); }},
        {"experiment.p",
         [](ExperimentConfig& c, const std::string& v, Reader& r) { r.number(v, c.experiment.p); }},
        {"experiment.trials",
         [](ExperimentConfig& c, const std::string& v, Reader& r) { r.integer(v, c.experiment.trials); }},
        {"output.dir", [](ExperimentConfig& c, const std::string& v, Reader&) { c.output_dir = v; }},
    };
    return keys;
}

inline const Setter* find_setter(const std::string& key)
{
    for (const auto& [k, s] : registry())
        if (k == key)
            return &s;
    return nullptr;
}

inline bool known_section(std::string_view s)
{
    for (auto name : {"grid", "physics", "kernel", "initial", "picard", "stepper", "experiment",
                      "output", "sweep"})
        if (s == name)
            return true;
    return false;
}

inline int line_of(const Entries& e, const std::string& key)
{
    auto it = e.find(key);
    return it == e.end() ? 0 : it->second.line;
}

inline void check_constraints(const ExperimentConfig& c, const Entries& e, Issues& issues)
{
    auto violate = [&](const std::string& key, const std::string& msg) {
        issues.add(ConfigErrorKind::ConstraintViolation, line_of(e, key), key + ": " + msg);
    };
    if (c.grid.n < 2)
        violate("grid.n", "requires n >= 2");
    if (!(c.grid.L > 0))
        violate("grid.L", "requires L > 0");
    if (!(c.physics.alpha1 > 0))
        violate("physics.alpha1", "requires alpha1 > 0");
    if (!(c.physics.alpha2 >= 0))
        violate("physics.alpha2", "requires alpha2 >= 0");

    const GridSpec& g = c.grid;
    const double R = c.kernel.R ? *c.kernel.R : min_support_radius(g);
    if (c.kernel.R && g.n >= 2 && g.L > 0 && *c.kernel.R < min_support_radius(g) * (1 - 1e-12))
        violate("kernel.R", "requires R >= sqrt(3) L = " + format_double(min_support_radius(g)));
    if (c.kernel.variant != KernelVariant::Full && !(c.kernel.a > 0 && c.kernel.a < R))
        violate("kernel.a", "requires 0 < a < R");
    if (c.kernel.variant == KernelVariant::Full && e.count("kernel.a"))
        violate("kernel.a", "only applies to truncated variants (inner, tail)");

    const auto& in = c.initial;
    auto only_for = [&](const std::string& key, InitialType t) {
        if (e.count(key) && in.type != t)
            violate(key, "only applies to initial.type = " + initial_type_name(t));
    };
    only_for("initial.sigma", InitialType::Gaussian);
    only_for("initial.center", InitialType::Gaussian);
    only_for("initial.k", InitialType::PlaneWave);
    only_for("initial.path", InitialType::File);
    if (in.type == InitialType::Gaussian && !(in.sigma > 0))
        violate("initial.sigma", "requires sigma > 0");
    if (in.l2_norm && in.h1_norm)
        violate("initial.h1_norm", "give either l2_norm or h1_norm, not both");
    if (in.l2_norm && !(*in.l2_norm > 0))
        violate("initial.l2_norm", "requires l2_norm > 0");
    if (in.h1_norm && !(*in.h1_norm > 0))
        violate("initial.h1_norm", "requires h1_norm > 0");
    if (in.type == InitialType::File && in.path.empty())
        violate("initial.path", "file initial data needs a path");

    const auto& p = c.picard;
    if (!(p.T > 0))
        violate("picard.T", "requires T > 0");
    if (p.m < 2)
        violate("picard.m", "requires m >= 2");
    if (p.quad == Quadrature::Simpson && p.m % 2 != 0)
        violate("picard.m", "simpson quadrature requires an even m");
    if (!(p.tol > 0))
        violate("picard.tol", "requires tol > 0");
    if (p.max_iter < 1)
        violate("picard.max_iter", "requires max_iter >= 1");

    const auto& s = c.stepper;
    if (!(s.T > 0))
        violate("stepper.T", "requires T > 0");
    if (!(s.dt_min > 0))
        violate("stepper.dt_min", "requires dt_min > 0");
    if (!(s.dt > s.dt_min))
        violate("stepper.dt", "requires dt > dt_min");
    if (!(s.h1_cap > 0))
        violate("stepper.h1_cap", "requires h1_cap > 0");
    if (s.snapshot_every < 0)
        violate("stepper.snapshot_every", "requires snapshot_every >= 0");

    const auto& x = c.experiment;
    if (x.battery.empty())
        violate("experiment.battery", "requires at least one entry");
    for (const auto& b : x.battery) {
        if (b == "all")
            continue;
        bool ok = false;
        for (const auto& n : {"kernel_oracle", "propagator", "tail_norm_scaling", "picard_convergence",
                              "cross_method", "normalization_law", "truncation",
                              "continuous_dependence", "nonlinearity_bounds", "determinism", "1", "2",
                              "3", "4", "5", "6", "7", "8", "9", "10"})
            ok = ok || b == n;
        if (!ok)
            violate("experiment.battery", "unknown battery entry '" + b + "'");
    }
    if (x.a_list.empty())
        violate("experiment.a_list", "requires at least one radius");
    for (double a : x.a_list)
        if (!(a > 0))
            violate("experiment.a_list", "radii must be positive");
    if (!(x.p > 1))
        violate("experiment.p", "requires p > 1");
    if (x.trials < 1)
        violate("experiment.trials", "requires trials >= 1");
}

// Lines to entries; collects syntax, unknown-key and duplicate-key issues.
inline Entries tokenize(std::string_view text, Issues& issues,
                        std::map<std::string, std::vector<std::string>>& sweep,
                        std::map<std::string, int>& sweep_lines)
{
    Entries entries;
    std::string section;
    int lineno = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view raw = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++lineno;
        const auto hash = raw.find('#');
        const std::string_view line = trim(hash == std::string_view::npos ? raw : raw.substr(0, hash));
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                issues.add(ConfigErrorKind::Syntax, lineno, "malformed section header");
                continue;
            }
            section = std::string(trim(line.substr(1, line.size() - 2)));
            if (!known_section(section))
                issues.add(ConfigErrorKind::UnknownKey, lineno, "unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            issues.add(ConfigErrorKind::Syntax, lineno, "expected 'key = value'");
            continue;
        }
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (section.empty()) {
            issues.add(ConfigErrorKind::Syntax, lineno, "key '" + key + "' outside any section");
            continue;
        }
        if (!known_section(section))
            continue;
        if (key.empty() || value.empty()) {
            issues.add(ConfigErrorKind::Syntax, lineno, "empty key or value");
            continue;
        }
        if (section == "sweep") {
            if (sweep.count(key)) {
                issues.add(ConfigErrorKind::DuplicateKey, lineno,
                           "sweep." + key + " already set on line " + std::to_string(sweep_lines[key]));
                continue;
            }
            sweep[key] = split_list(value);
            sweep_lines[key] = lineno;
            continue;
        }
        const std::string full = section + "." + key;
        if (!find_setter(full)) {
            issues.add(ConfigErrorKind::UnknownKey, lineno, "unknown key '" + key + "' in [" + section + "]");
            continue;
        }
        if (auto it = entries.find(full); it != entries.end()) {
            issues.add(ConfigErrorKind::DuplicateKey, lineno,
                       full + " already set on line " + std::to_string(it->second.line));
            continue;
        }
        entries[full] = {value, lineno};
    }
    return entries;
}

inline ExperimentConfig build(const Entries& entries, Issues& issues)
{
    ExperimentConfig c;
    // Apply in registry order so the result does not depend on file order.
    for (const auto& [key, setter] : registry()) {
        auto it = entries.find(key);
        if (it == entries.end())
            continue;
        Reader r{issues, it->second.line, key};
        setter(c, it->second.value, r);
    }
    return c;
}

} // namespace detail

/// A `section.key=value` override from the command line.
struct Override {
    std::string key;
    std::string value;
};

inline Override parse_override(const std::string& s)
{
    const auto eq = s.find('=');
    if (eq == std::string::npos)
        throw ConfigError({{ConfigErrorKind::Syntax, 0, "override '" + s + "' is not section.key=value"}});
    return {std::string(trim(std::string_view(s).substr(0, eq))),
            std::string(trim(std::string_view(s).substr(eq + 1)))};
}

/// Parses and validates; throws ConfigError with every issue found.
inline ExperimentConfig parse_config(std::string_view text, const std::vector<Override>& overrides = {})
{
    detail::Issues issues;
    std::map<std::string, std::vector<std::string>> sweep;
    std::map<std::string, int> sweep_lines;
    auto entries = detail::tokenize(text, issues, sweep, sweep_lines);
    for (const auto& o : overrides) {
        if (!detail::find_setter(o.key)) {
            issues.add(ConfigErrorKind::UnknownKey, 0, "unknown key '" + o.key + "'");
            continue;
        }
        entries[o.key] = {o.value, 0};
    }
    ExperimentConfig cfg = detail::build(entries, issues);
    if (issues.list.empty())
        detail::check_constraints(cfg, entries, issues);

    // Every sweep axis must name a real key, and every value must be accepted there.
    for (const auto& [key, values] : sweep) {
        const int line = sweep_lines[key];
        if (key.rfind("sweep.", 0) == 0 || key.rfind("output.", 0) == 0 || !detail::find_setter(key)) {
            issues.add(ConfigErrorKind::UnknownKey, line, "sweep axis '" + key + "' is not a sweepable key");
            continue;
        }
        for (const auto& v : values) {
            if (v.empty()) {
                issues.add(ConfigErrorKind::Syntax, line, "empty value in sweep axis " + key);
                continue;
            }
            auto trial = entries;
            trial[key] = {v, line};
            detail::Issues sub;
            const auto c = detail::build(trial, sub);
            if (sub.list.empty())
                detail::check_constraints(c, trial, sub);
            for (auto& i : sub.list)
                if (i.line == line)
                    issues.list.push_back(i);
        }
    }
    if (!issues.list.empty()) {
        std::stable_sort(issues.list.begin(), issues.list.end(),
                         [](const ConfigIssue& a, const ConfigIssue& b) { return a.line < b.line; });
        throw ConfigError(issues.list);
    }
    cfg.sweep = std::move(sweep);
    return cfg;
}

namespace detail {

inline std::string join(const std::vector<std::string>& items)
{
    std::string s;
    for (std::size_t i = 0; i < items.size(); ++i)
        s += (i ? ", " : "") + items[i];
    return s;
}

inline std::string join_numbers(const std::vector<double>& v)
{
    std::vector<std::string> s;
    for (double d : v)
        s.push_back(format_double(d));
    return join(s);
}

template <class T>
std::string triple_text(const std::array<T, 3>& a)
{
    std::vector<std::string> s;
    for (const auto& v : a) {
        if constexpr (std::is_floating_point_v<T>)
            s.push_back(format_double(v));
        else
            s.push_back(std::to_string(v));
    }
    return join(s);
}

inline void serialize_body(std::ostream& out, const ExperimentConfig& c, bool with_output)
{
    out << "[grid]\nn = " << c.grid.n << "\nL = " << format_double(c.grid.L) << "\n\n";
    out << "[physics]\nalpha1 = " << format_double(c.physics.alpha1)
        << "\nalpha2 = " << format_double(c.physics.alpha2) << "\n\n";
    out << "[kernel]\nvariant = " << to_string(c.kernel.variant) << '\n';
    if (c.kernel.variant != KernelVariant::Full)
        out << "a = " << format_double(c.kernel.a) << '\n';
    out << "R = " << (c.kernel.R ? format_double(*c.kernel.R) : "auto") << "\n\n";
    const auto& in = c.initial;
    out << "[initial]\ntype = " << initial_type_name(in.type) << '\n';
    if (in.type == InitialType::Gaussian) {
        out << "sigma = " << format_double(in.sigma) << '\n';
        out << "center = " << (in.center ? triple_text(*in.center) : "auto") << '\n';
    } else if (in.type == InitialType::PlaneWave) {
        out << "k = " << triple_text(in.k) << '\n';
    } else {
        out << "path = " << in.path << '\n';
    }
    if (in.l2_norm)
        out << "l2_norm = " << format_double(*in.l2_norm) << '\n';
    if (in.h1_norm)
        out << "h1_norm = " << format_double(*in.h1_norm) << '\n';
    out << '\n';
    const auto& p = c.picard;
    out << "[picard]\nT = " << format_double(p.T) << "\nm = " << p.m << "\nquad = " << to_string(p.quad)
        << "\ntol = " << format_double(p.tol) << "\nmax_iter = " << p.max_iter
        << "\ninit = " << to_string(p.init) << "\n\n";
    const auto& s = c.stepper;
    out << "[stepper]\nT = " << format_double(s.T) << "\ndt = " << format_double(s.dt)
        << "\nh1_cap = " << format_double(s.h1_cap) << "\ndt_min = " << format_double(s.dt_min)
        << "\nsnapshot_every = " << s.snapshot_every << "\n\n";
    const auto& x = c.experiment;
    out << "[experiment]\nbattery = " << join(x.battery) << "\nseed = " << x.seed
        << "\nquick = " << (x.quick ? "true" : "false") << "\na_list = " << join_numbers(x.a_list)
        << "\np = " << format_double(x.p) << "\ntrials = " << x.trials << '\n';
    if (!c.sweep.empty()) {
        out << "\n[sweep]\n";
        for (const auto& [k, v] : c.sweep)
            out << k << " = " << join(v) << '\n';
    }
    if (with_output && !c.output_dir.empty())
        out << "\n[output]\ndir = " << c.output_dir << '\n';
}

} // namespace detail

/// Canonical text: every key in fixed order; parse(serialize(c)) == c.
inline std::string serialize(const ExperimentConfig& c)
{
    std::ostringstream out;
    detail::serialize_body(out, c, true);
    return out.str();
}

inline std::uint64_t fnv1a64(std::string_view s)
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    return h;
}

/// Hash of every result-affecting field (the canonical form minus [output]).
inline std::uint64_t config_hash(const ExperimentConfig& c)
{
    std::ostringstream out;
    detail::serialize_body(out, c, false);
    return fnv1a64(out.str());
}

inline std::string hash_hex(std::uint64_t h)
{
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i, h >>= 4)
        s[i] = digits[h & 0xf];
    return s;
}

inline std::string hash_prefix(const ExperimentConfig& c) { return hash_hex(config_hash(c)).substr(0, 8); }

/// Cartesian product of the sweep axes, in sorted-key order with the last
/// axis varying fastest. Each result has an empty sweep section.
inline std::vector<ExperimentConfig> expand_sweep(const ExperimentConfig& base)
{
    ExperimentConfig plain = base;
    plain.sweep.clear();
    if (base.sweep.empty())
        return {plain};
    const std::string text = serialize(plain);
    std::vector<std::pair<std::string, std::vector<std::string>>> axes(base.sweep.begin(), base.sweep.end());
    std::vector<std::size_t> idx(axes.size(), 0);
    std::vector<ExperimentConfig> out;
    while (true) {
        std::vector<Override> ov;
        for (std::size_t i = 0; i < axes.size(); ++i)
            ov.push_back({axes[i].first, axes[i].second[idx[i]]});
        out.push_back(parse_config(text, ov));
        std::size_t i = axes.size();
        while (i > 0) {
            --i;
            if (++idx[i] < axes[i].second.size())
                break;
            idx[i] = 0;
            if (i == 0)
                return out;
        }
    }
}

} // namespace frnse::io
