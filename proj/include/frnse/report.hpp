#pragma once

// Pass/fail rows and string tables shared by the experiment battery and the CLI.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "frnse/io/format.hpp"

namespace frnse {

struct Assertion {
    std::string experiment;
    std::string name;
    double measured = 0;
    std::string relation;  ///< "<=", ">=", "<", ">", "in", "=="
    double threshold = 0;
    double threshold_hi = 0;  ///< upper end for "in"
    bool passed = false;
    std::string basis;  ///< scaling-law, identity, oracle, stability, envelope, budget, format
};

inline Assertion check_le(std::string exp, std::string name, double measured, double threshold,
                          std::string basis)
{
    return {std::move(exp), std::move(name), measured, "<=", threshold, 0.0,
            measured <= threshold, std::move(basis)};
}

inline Assertion check_lt(std::string exp, std::string name, double measured, double threshold,
                          std::string basis)
{
    return {std::move(exp), std::move(name), measured, "<", threshold, 0.0,
            measured < threshold, std::move(basis)};
}

inline Assertion check_gt(std::string exp, std::string name, double measured, double threshold,
                          std::string basis)
{
    return {std::move(exp), std::move(name), measured, ">", threshold, 0.0,
            measured > threshold, std::move(basis)};
}

inline Assertion check_in(std::string exp, std::string name, double measured, double lo, double hi,
                          std::string basis)
{
    return {std::move(exp), std::move(name), measured, "in", lo, hi,
            measured >= lo && measured <= hi, std::move(basis)};
}

inline Assertion check_true(std::string exp, std::string name, bool ok, std::string basis)
{
    return {std::move(exp), std::move(name), ok ? 1.0 : 0.0, "==", 1.0, 0.0, ok, std::move(basis)};
}

inline std::string describe(const Assertion& a)
{
    std::string s = a.experiment + "/" + a.name + ": measured " + io::format_double(a.measured) +
                    " " + a.relation + " ";
    if (a.relation == "in")
        s += "[" + io::format_double(a.threshold) + ", " + io::format_double(a.threshold_hi) + "]";
    else
        s += io::format_double(a.threshold);
    return s;
}

struct Table {
    std::string name;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
};

inline std::string cell(double v) { return io::format_double(v); }
inline std::string cell(int v) { return std::to_string(v); }
inline std::string cell(std::uint64_t v) { return std::to_string(v); }

inline Table assertion_table(const std::vector<Assertion>& rows)
{
    Table t{"assertions",
            {"experiment", "name", "measured", "relation", "threshold", "threshold_hi", "passed", "basis"},
            {}};
    for (const auto& a : rows)
        t.add({a.experiment, a.name, cell(a.measured), a.relation, cell(a.threshold),
               a.relation == "in" ? cell(a.threshold_hi) : "", a.passed ? "pass" : "fail", a.basis});
    return t;
}

/// Least-squares slope of log y against log x over positive pairs.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
        if (!(x[i] > 0) || !(y[i] > 0))
            continue;
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++n;
    }
    if (n < 2)
        return std::nan("");
    const double den = n * sxx - sx * sx;
    return den == 0 ? std::nan("") : (n * sxy - sx * sy) / den;
}

} // namespace frnse
