// Acceptance runner: one PASS/FAIL line per criterion, with the measured
// value of every failing check underneath.
//
//   frnse_acceptance                 all criteria
//   frnse_acceptance --criterion 4   one criterion
//   frnse_acceptance --quick         reduced sizes (smoke run, not the gate)

#include <chrono>
#include <cstdio>
#include <cstring>
#include <iostream>
#include <string>
#include <vector>

#include "frnse/verify.hpp"

int main(int argc, char** argv)
{
    using namespace frnse;
    verify::Options opt;
    std::vector<int> ids;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--criterion" && i + 1 < argc) {
            ids.push_back(std::atoi(argv[++i]));
        } else if (arg == "--seed" && i + 1 < argc) {
            opt.seed = std::strtoull(argv[++i], nullptr, 10);
        } else if (arg == "--quick") {
            opt.quick = true;
        } else {
            std::cerr << "usage: frnse_acceptance [--criterion N]... [--seed S] [--quick]\n";
            return 2;
        }
    }
    if (ids.empty())
        for (const auto& [id, name] : verify::criteria())
            ids.push_back(id);

    int failed = 0;
    for (int id : ids) {
        const auto t0 = std::chrono::steady_clock::now();
        verify::CriterionResult r;
        std::string error;
        try {
            r = verify::run_criterion(id, opt);
        } catch (const std::exception& e) {
            error = e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool ok = error.empty() && r.passed();
        std::printf("%s criterion %d %s (%.1f s)\n", ok ? "PASS" : "FAIL", id,
                    verify::criterion_name(id).c_str(), secs);
        if (!error.empty())
            std::printf("    error: %s\n", error.c_str());
        for (const auto& c : r.checks)
            std::printf("    [%s] %s\n", c.passed ? "ok" : "FAILED", describe(c).c_str());
        for (const auto& n : r.notes)
            std::printf("    note: %s\n", n.c_str());
        failed += ok ? 0 : 1;
    }
    std::fflush(stdout);
    return failed ? 1 : 0;
}
