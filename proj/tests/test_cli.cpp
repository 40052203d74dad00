#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
};

Result cli(const std::string& args) {
    const std::string cmd = std::string(CELLEVO_CLI) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return {-1, ""};
    std::string out;
    char buf[4096];
    while (std::fgets(buf, sizeof buf, pipe)) out += buf;
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("cellevo_cli_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST(Cli, ListsScenarios) {
    const auto r = cli("list");
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("fig1-healthy"), std::string::npos);
    EXPECT_NE(r.out.find("dose-analysis-sec4"), std::string::npos);
}

TEST(Cli, UnknownScenarioWritesNothing) {
    const auto dir = scratch("unknown");
    const auto r = cli("run --scenario nope --out " + dir.string());
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.out.find("unknown scenario"), std::string::npos);
    EXPECT_FALSE(fs::exists(dir));
}

TEST(Cli, BadArguments) {
    EXPECT_EQ(cli("").code, 2);
    EXPECT_EQ(cli("run --bogus").code, 2);
    EXPECT_EQ(cli("run").code, 2);
    EXPECT_EQ(cli("run --scenario fig1-healthy --grid-points 1 --out /tmp/x").code, 2);
}

TEST(Cli, BadConfigReportsKey) {
    const auto dir = scratch("badcfg");
    fs::create_directories(dir);
    std::ofstream(dir / "c.ini") << "scenario.name = fig1-healthy\n[grdi]\nm = 100\n";
    const auto r = cli("run --config " + (dir / "c.ini").string() + " --out " + (dir / "out").string());
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.out.find("grdi.m"), std::string::npos);
    EXPECT_FALSE(fs::exists(dir / "out"));
}

TEST(Cli, SmallRunIsDeterministic) {
    const auto a = scratch("run_a"), b = scratch("run_b");
    const std::string common = "run --scenario fig-f3f4-combo-1 --grid-points 300 --steps 20 --quiet --out ";
    ASSERT_EQ(cli(common + a.string()).code, 0);
    ASSERT_EQ(cli(common + b.string()).code, 0);
    for (const char* f : {"timeseries.csv", "snapshots.csv", "meta.ini"}) {
        ASSERT_TRUE(fs::exists(a / f)) << f;
        EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
    }
}

TEST(Cli, NumericalFailureExitCode) {
    const auto dir = scratch("overflow");
    const auto r = cli("run --scenario fig2-resistance-raw --grid-points 400 --steps 400000 --out " + dir.string());
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.out.find("renormalized"), std::string::npos);
    EXPECT_FALSE(fs::exists(dir / "timeseries.csv"));
}

TEST(Cli, AnalyzeDose) {
    const auto r = cli("analyze-dose --r0 1 --d 0.245 --a 0.5 --c 0.3025");
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("regime = interior-maximum"), std::string::npos);
    EXPECT_NE(r.out.find("resistance = yes"), std::string::npos);
    EXPECT_NE(r.out.find("x_c = 0.8164965809"), std::string::npos);
    const auto grid = cli("analyze-dose --c-grid 0.1,0.5,1.2");
    EXPECT_EQ(grid.code, 0);
    EXPECT_NE(grid.out.find("c_star = 1.2"), std::string::npos);
    EXPECT_EQ(cli("analyze-dose --a 1.5 --c 0.3").code, 2);
    EXPECT_EQ(cli("analyze-dose").code, 2);
}

TEST(Cli, Sweep) {
    const auto dir = scratch("sweep");
    const auto r = cli("sweep --scenario fig-f3f4-combo-0 --grid-points 300 --steps 30 --c1 0,2 --c2 0,2 --quiet --out " +
                       dir.string());
    EXPECT_EQ(r.code, 0) << r.out;
    const auto csv = slurp(dir / "sweep.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "c1,c2,rho_H_final,rho_C_final,xbar_C_final,eradicated");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
    EXPECT_EQ(cli("sweep --scenario fig1-healthy --c1 0 --c2 0 --out " + dir.string()).code, 2);
}
