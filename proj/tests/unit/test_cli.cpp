#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "frnse/cli/app.hpp"

using namespace frnse;
namespace fs = std::filesystem;

namespace {

struct Cli {
    std::ostringstream out, err;
    int code = -1;

    explicit Cli(std::vector<std::string> args)
    {
        args.insert(args.begin(), "frnse");
        std::vector<const char*> argv;
        for (const auto& a : args)
            argv.push_back(a.c_str());
        code = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
    }
};

fs::path scratch(const std::string& name)
{
    const auto p = fs::temp_directory_path() / ("frnse_cli_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

fs::path write(const fs::path& p, const std::string& text)
{
    std::ofstream(p) << text;
    return p;
}

std::vector<fs::path> run_dirs(const fs::path& root)
{
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(root))
        if (e.is_directory())
            out.push_back(e.path());
    std::sort(out.begin(), out.end());
    return out;
}

fs::path find_file(const fs::path& dir, const std::string& suffix)
{
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().filename().string().size() >= suffix.size() &&
            e.path().filename().string().ends_with(suffix))
            return e.path();
    return {};
}

const char* small = "[grid]\nn = 8\nL = 6.4\n[initial]\nh1_norm = 0.5\n"
                    "[picard]\nT = 0.1\nm = 8\ntol = 1e-12\n[stepper]\nT = 0.1\ndt = 0.025\n";

} // namespace

TEST(Cli, PicardWithoutCouplingTakesOneIteration)
{
    const auto root = scratch("picard0");
    const auto cfg = write(root / "c.conf", small);
    Cli c({"picard", "--config", cfg.string(), "--out", (root / "runs").string(), "--set",
           "physics.alpha2=0"});
    EXPECT_EQ(c.code, 0) << c.err.str();
    EXPECT_NE(c.out.str().find("converged after 1 iterations"), std::string::npos) << c.out.str();
    const auto dirs = run_dirs(root / "runs");
    ASSERT_EQ(dirs.size(), 1u);
    const auto rows = io::parse_csv(io::read_file(find_file(dirs[0], "_convergence.csv")));
    EXPECT_EQ(rows.size(), 2u);
    EXPECT_FALSE(fs::exists(dirs[0] / "PARTIAL"));
    fs::remove_all(root);
}

TEST(Cli, SolveWritesDiagnosticsSnapshotsAndManifest)
{
    const auto root = scratch("solve");
    const auto cfg = write(root / "c.conf", small);
    Cli c({"solve", "--config", cfg.string(), "--out", (root / "runs").string()});
    ASSERT_EQ(c.code, 0) << c.err.str();
    const auto dir = run_dirs(root / "runs").at(0);
    const auto diag = io::parse_csv(io::read_file(find_file(dir, "_diagnostics.csv")));
    EXPECT_EQ(diag[0], (std::vector<std::string>{"t", "l2", "h1", "G1", "balance_residual", "dt"}));
    EXPECT_EQ(diag.size(), 6u);
    EXPECT_FALSE(find_file(dir, "_psi_1.field").empty());
    const auto m = nlohmann::json::parse(io::read_file(find_file(dir, "_manifest.json")));
    EXPECT_EQ(m["experiments"][0]["status"], "completed");
    EXPECT_EQ(m["command"], "solve");
    fs::remove_all(root);
}

TEST(Cli, IdenticalRunsProduceIdenticalCsv)
{
    const auto root = scratch("determinism");
    const auto cfg = write(root / "c.conf", small);
    for (int i = 0; i < 2; ++i)
        ASSERT_EQ(Cli({"picard", "--config", cfg.string(), "--out", (root / "runs").string()}).code, 0);
    const auto dirs = run_dirs(root / "runs");
    ASSERT_EQ(dirs.size(), 2u);
    EXPECT_EQ(dirs[0].filename().string().substr(0, 8), dirs[1].filename().string().substr(0, 8));
    for (const char* f : {"_convergence.csv", "_nodes.csv", "_psi_T.field"})
        EXPECT_EQ(io::read_file(find_file(dirs[0], f)), io::read_file(find_file(dirs[1], f))) << f;
    fs::remove_all(root);
}

TEST(Cli, ConfigErrorsExitWithUsageCode)
{
    const auto root = scratch("bad");
    const auto cfg = write(root / "c.conf", "[physics]\nalpha1 = -1\n");
    Cli c({"solve", "--config", cfg.string(), "--out", (root / "runs").string()});
    EXPECT_EQ(c.code, cli::UsageError);
    EXPECT_NE(c.err.str().find("line 2: ConstraintViolation"), std::string::npos) << c.err.str();
    EXPECT_FALSE(fs::exists(root / "runs"));
    EXPECT_EQ(Cli({"solve", "--set", "grid.zz=1", "--out", (root / "runs").string()}).code, cli::UsageError);
    EXPECT_EQ(Cli({"frobnicate"}).code, cli::UsageError);
    EXPECT_EQ(Cli({}).code, cli::UsageError);
    fs::remove_all(root);
}

TEST(Cli, SolverFailureIsRecordedInManifest)
{
    const auto root = scratch("nonconv");
    const auto cfg = write(root / "c.conf", small);
    Cli c({"picard", "--config", cfg.string(), "--out", (root / "runs").string(), "--set",
           "picard.max_iter=1"});
    EXPECT_EQ(c.code, cli::SolverFailed);
    const auto dir = run_dirs(root / "runs").at(0);
    const auto m = nlohmann::json::parse(io::read_file(find_file(dir, "_manifest.json")));
    EXPECT_EQ(m["experiments"][0]["status"], "non_convergence");
    EXPECT_EQ(m["exit_code"], cli::SolverFailed);
    fs::remove_all(root);
}

TEST(Cli, SweepRunsEveryPointInParallel)
{
    const auto root = scratch("sweep");
    const auto cfg = write(root / "c.conf", std::string(small) + "[sweep]\nphysics.alpha2 = 0, 0.5, 1\n");
    Cli c({"sweep", "--command", "picard", "--jobs", "2", "--config", cfg.string(), "--out",
           (root / "runs").string()});
    ASSERT_EQ(c.code, 0) << c.err.str();
    const auto parent = run_dirs(root / "runs").at(0);
    EXPECT_EQ(run_dirs(parent).size(), 3u);
    const auto rows = io::parse_csv(io::read_file(find_file(parent, "_sweep.csv")));
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_EQ(rows[0][1], "physics.alpha2");
    EXPECT_EQ(rows[1][1], "0");
    EXPECT_EQ(rows[3][1], "1");
    EXPECT_EQ(rows[3][3], "converged");
    EXPECT_NE(rows[1][2], rows[2][2]);  // distinct config hashes
    fs::remove_all(root);
}

TEST(Cli, SweepWithoutAxesIsUsageError)
{
    const auto root = scratch("sweep0");
    EXPECT_EQ(Cli({"sweep", "--out", (root / "runs").string()}).code, cli::UsageError);
    fs::remove_all(root);
}

TEST(Cli, KernelNorms)
{
    const auto root = scratch("norms");
    Cli c({"kernel-norms", "--out", (root / "runs").string(), "--set", "grid.n=16", "--set", "grid.L=1.6",
           "--set", "experiment.a_list=0.4,0.2", "--set", "experiment.trials=1"});
    EXPECT_EQ(c.code, 0) << c.err.str();
    const auto rows = io::parse_csv(io::read_file(find_file(run_dirs(root / "runs").at(0), "_tail_norms.csv")));
    EXPECT_EQ(rows.size(), 3u);
    fs::remove_all(root);
}

TEST(Cli, VerifySubsetQuick)
{
    const auto root = scratch("verify");
    Cli c({"verify", "--quick", "--out", (root / "runs").string(), "--set", "experiment.battery=1,2"});
    EXPECT_EQ(c.code, 0) << c.out.str() << c.err.str();
    EXPECT_NE(c.out.str().find("PASS  1 kernel_oracle"), std::string::npos) << c.out.str();
    EXPECT_NE(c.out.str().find("PASS  2 propagator"), std::string::npos);
    const auto dir = run_dirs(root / "runs").at(0);
    EXPECT_FALSE(find_file(dir, "_assertions.csv").empty());
    fs::remove_all(root);
}

TEST(Cli, PlotIsDeterministic)
{
    const auto root = scratch("plot");
    const auto csv = write(root / "d.csv", "t,l2,h1\n0,1,2\n0.5,0.9,2.2\n1,0.8,2.1\n");
    ASSERT_EQ(Cli({"plot", "--input", csv.string()}).code, 0);
    const std::string first = io::read_file(root / "d.svg");
    ASSERT_EQ(Cli({"plot", "--input", csv.string(), "--output", (root / "e.svg").string()}).code, 0);
    EXPECT_EQ(first, io::read_file(root / "e.svg"));
    EXPECT_NE(first.find(">l2<"), std::string::npos);
    EXPECT_NE(first.find(">t<"), std::string::npos);
    EXPECT_EQ(Cli({"plot", "--input", (root / "missing.csv").string()}).code, cli::UsageError);
    fs::remove_all(root);
}
