#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <sstream>

#include "json.hpp"

#include "frnse/io/csv.hpp"
#include "frnse/io/run_dir.hpp"
#include "frnse/io/snapshot.hpp"
#include "frnse/io/svg.hpp"
#include "support.hpp"

using namespace frnse;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const auto p = fs::temp_directory_path() / ("frnse_io_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(p);
    return p;
}

} // namespace

TEST(Format, ShortestRoundTrip)
{
    for (double v : {0.1, 1.0 / 3, 1e-300, 6.02214076e23, -0.0, 12.8}) {
        const auto s = io::format_double(v);
        EXPECT_EQ(*io::parse_double(s), v) << s;
    }
    EXPECT_EQ(io::format_double(12.8), "12.8");
    EXPECT_EQ(io::format_double(std::nan("")), "nan");
    EXPECT_FALSE(io::parse_double("1.5x"));
    EXPECT_FALSE(io::parse_double("1,5"));
}

TEST(Csv, QuotingFollowsRfc4180)
{
    EXPECT_EQ(io::csv_escape("plain"), "plain");
    EXPECT_EQ(io::csv_escape("a,b"), "\"a,b\"");
    EXPECT_EQ(io::csv_escape("say \"hi\""), "\"say \"\"hi\"\"\"");
    EXPECT_EQ(io::csv_escape("two\nlines"), "\"two\nlines\"");
    Table t{"t", {"x", "note"}, {{"1.5", "a,b"}, {"2", "q\"uote"}}};
    const std::string text = io::to_csv(t);
    EXPECT_EQ(text, "x,note\n1.5,\"a,b\"\n2,\"q\"\"uote\"\n");
    const auto rows = io::parse_csv(text);
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[1][1], "a,b");
    EXPECT_EQ(rows[2][1], "q\"uote");
    EXPECT_THROW(io::parse_csv("\"open"), IoError);
}

TEST(Snapshot, RoundTripIsBitIdentical)
{
    const GridSpec g{6, 1.3};
    Field f = test::random_field(g, 8);
    f[0] = cplx(-0.0, 1e-310);  // signed zero and a subnormal survive too
    std::stringstream buf;
    io::write_field(buf, f, 0.375);
    EXPECT_EQ(buf.str().rfind("FRNSE-FIELD v1", 0), 0u);
    const auto back = io::read_field(buf);
    EXPECT_EQ(back.t, 0.375);
    EXPECT_EQ(back.field.spec(), g);
    EXPECT_EQ(std::memcmp(back.field.values().data(), f.values().data(), f.size() * sizeof(cplx)), 0);
}

TEST(Snapshot, RejectsForeignOrTruncatedData)
{
    std::stringstream bad("NOT-A-FIELD v1 n=2 L=1 t=0\n");
    EXPECT_THROW(io::read_field(bad), IoError);
    std::stringstream buf;
    io::write_field(buf, Field(GridSpec{4, 1.0}), 0.0);
    std::string s = buf.str();
    s.resize(s.size() - 5);
    std::stringstream cut(s);
    EXPECT_THROW(io::read_field(cut), IoError);
}

TEST(Svg, DeterministicAndWellFormed)
{
    const std::string csv = "t,l2,h1\n0,1,2\n0.5,1,2.5\n1,1,3\n";
    const auto series = io::series_from_csv(csv);
    ASSERT_EQ(series.size(), 2u);
    EXPECT_EQ(series[0].name, "l2");
    io::ChartOptions opt;
    opt.title = "norms & <more>";
    const std::string a = io::render_svg(series, opt), b = io::render_svg(io::series_from_csv(csv), opt);
    EXPECT_EQ(a, b);
    EXPECT_EQ(a.rfind("<svg", 0), 0u);
    EXPECT_NE(a.find("norms &amp; &lt;more&gt;"), std::string::npos);
    EXPECT_EQ(std::count(a.begin(), a.end(), '\n') > 5, true);
    EXPECT_NE(a.find("<polyline"), std::string::npos);
    EXPECT_THROW(io::series_from_csv("name\nfoo\n"), InvalidArgument);
}

TEST(Svg, LogAxisSkipsNonPositive)
{
    io::ChartOptions opt;
    opt.log_y = true;
    const auto svg = io::render_svg({{"d", {1, 2, 3}, {1e-2, 0.0, 1e-6}}}, opt);
    const auto at = svg.find("points=\"");
    const auto end = svg.find('"', at + 8);
    const std::string pts = svg.substr(at + 8, end - at - 8);
    EXPECT_EQ(std::count(pts.begin(), pts.end(), ','), 2);
}

TEST(RunDir, EmptyRunWritesManifestOnly)
{
    const auto root = scratch("empty");
    const io::ExperimentConfig cfg;
    io::RunDir run(root, cfg, "verify");
    EXPECT_TRUE(fs::exists(run.path() / "PARTIAL"));
    run.finish(0);
    std::vector<std::string> names;
    for (const auto& e : fs::directory_iterator(run.path()))
        names.push_back(e.path().filename().string());
    ASSERT_EQ(names.size(), 1u);
    EXPECT_EQ(names[0], run.prefix() + "_manifest.json");
    const auto m = nlohmann::json::parse(io::read_file(run.path() / names[0]));
    EXPECT_EQ(m["config_hash"], io::hash_hex(io::config_hash(cfg)));
    EXPECT_EQ(m["files"].size(), 0u);
    EXPECT_EQ(m["exit_code"], 0);
    EXPECT_EQ(io::parse_config(m["config"].get<std::string>()), cfg);
    fs::remove_all(root);
}

TEST(RunDir, IdenticalConfigsShareHashButNotDirectories)
{
    const auto root = scratch("twice");
    const io::ExperimentConfig cfg;
    io::RunDir a(root, cfg, "solve"), b(root, cfg, "solve");
    EXPECT_EQ(a.hash(), b.hash());
    EXPECT_NE(a.path(), b.path());
    EXPECT_EQ(a.path().filename().string().substr(0, 9), a.prefix() + "-");
    fs::remove_all(root);
}

TEST(RunDir, FilesCarryHashPrefixAndAreIndexed)
{
    const auto root = scratch("files");
    io::RunDir run(root, io::ExperimentConfig{}, "solve");
    run.write_table(Table{"diag", {"t"}, {{"0"}}});
    run.write_snapshot("psi", Field(GridSpec{4, 1.0}), 0.0);
    ASSERT_EQ(run.files().size(), 2u);
    EXPECT_EQ(run.files()[0], run.prefix() + "_diag.csv");
    EXPECT_EQ(io::read_file(run.file_path("diag.csv")), "t\n0\n");
    EXPECT_EQ(io::read_field(run.file_path("psi.field").string()).field.spec(), (GridSpec{4, 1.0}));
    run.finish(0);
    EXPECT_FALSE(fs::exists(run.path() / "PARTIAL"));
    fs::remove_all(root);
}

TEST(RunDir, OutputRootResolution)
{
    io::ExperimentConfig cfg;
    EXPECT_EQ(io::output_root("flag", cfg), fs::path("flag"));
    cfg.output_dir = "fromconfig";
    EXPECT_EQ(io::output_root("", cfg), fs::path("fromconfig"));
    cfg.output_dir.clear();
    ::setenv("FRNSE_OUT", "fromenv", 1);
    EXPECT_EQ(io::output_root("", cfg), fs::path("fromenv"));
    ::unsetenv("FRNSE_OUT");
    EXPECT_EQ(io::output_root("", cfg), fs::path("runs"));
}
