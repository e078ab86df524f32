#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "hjbmarch/reproduce.hpp"
#include "hjbmarch/sweep.hpp"

namespace hjb {
namespace {

namespace fs = std::filesystem;

class Runner : public ::testing::Test {
protected:
    void SetUp() override {
        root = fs::temp_directory_path() /
               ("hjbmarch-runner-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(root);
        fs::create_directories(root);
        opt.cache_dir = root / "cache";
    }
    void TearDown() override { fs::remove_all(root); }

    RunSpec spec(const std::string& text) {
        std::istringstream in(text);
        RunSpec s = parse_config(in, "runner.ini");
        s.out_dir = root / "out";
        return s;
    }

    static std::vector<std::string> lines(const fs::path& file) {
        std::ifstream in(file);
        std::vector<std::string> out;
        for (std::string l; std::getline(in, l);) out.push_back(l);
        return out;
    }

    // Drops the wall_ms column so runs can be compared byte for byte.
    static std::vector<std::string> without_timing(const std::vector<std::string>& rows) {
        std::vector<std::string> out;
        for (const auto& row : rows) {
            std::vector<std::string> cols;
            std::stringstream ss(row);
            for (std::string c; std::getline(ss, c, ',');) cols.push_back(c);
            cols.erase(cols.begin() + 4);
            std::string joined;
            for (const auto& c : cols) joined += c + ",";
            out.push_back(joined);
        }
        return out;
    }

    fs::path root;
    SweepOptions opt;
    std::ostringstream log;
};

TEST_F(Runner, SingleCellWritesOneRow) {
    const auto s = spec("[problem]\nname = experiment1\n[run]\nresolutions = 64\ntiming_runs = 1\n");
    const auto recs = cmd_run(s, opt, log);
    const auto rows = lines(s.out_dir / "sweep.csv");
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0], "scheme,resolution,k,r,wall_ms,updates,l1,linf");
    EXPECT_EQ(rows[1].rfind("explicit,64,", 0), 0u);
    ASSERT_EQ(recs.size(), 1u);
    EXPECT_GT(recs[0].updates, 0u);
    EXPECT_TRUE(fs::exists(s.out_dir / "fields" / "explicit_n64_r1_t0.csv"));
    EXPECT_NE(log.str().find("explicit"), std::string::npos);
}

TEST_F(Runner, CrossProductRowCount) {
    auto s = spec(
        "[problem]\nname = experiment3\ngamma = 11\n[run]\nscheme = implicit\nresolutions = 64, 128\nr = 1, 2, 4, 8\n"
        "timing_runs = 1\n[output]\nfields = false\n");
    cmd_run(s, opt, log);
    const auto rows = lines(s.out_dir / "sweep.csv");
    EXPECT_EQ(rows.size(), 9u);
    EXPECT_FALSE(fs::exists(s.out_dir / "fields"));
}

TEST_F(Runner, FieldsPerReportTime) {
    const auto s = spec(
        "[problem]\nname = experiment2\n[run]\nscheme = explicit, hybrid\nresolutions = 16\nr = 1, 2\nreport = 0, 0.6, 1.2\n"
        "timing_runs = 1\n");
    auto cells = run_sweep(s, opt);
    cmd_run(s, opt, log);
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(s.out_dir / "fields")) files += e.is_regular_file();
    EXPECT_EQ(files, 2u * 2u * 3u);
    // The recorded T slice is the terminal data.
    const auto p = experiment2(0.1);
    std::ifstream in(s.out_dir / "fields" / "hybrid_n16_r2_t1.2.csv");
    const Field top = read_csv(in, unit_grid(2, 16));
    for (std::size_t x = 0; x < top.size(); ++x) EXPECT_EQ(top[x], p.terminal(top.grid().point(x)));
    EXPECT_EQ(cells.size(), 4u);
}

TEST_F(Runner, IdempotentAcrossRunsAndJobCounts) {
    auto s = spec(
        "[problem]\nname = experiment3\ngamma = 5\n[run]\nscheme = explicit, implicit, hybrid\nresolutions = 16, 32\n"
        "r = 1, 4\ntiming_runs = 1\n");
    cmd_run(s, opt, log);
    const auto first = without_timing(lines(s.out_dir / "sweep.csv"));
    const auto field = lines(s.out_dir / "fields" / "hybrid_n32_r4_t0.csv");
    opt.jobs = 3;
    cmd_run(s, opt, log);
    EXPECT_EQ(without_timing(lines(s.out_dir / "sweep.csv")), first);
    EXPECT_EQ(lines(s.out_dir / "fields" / "hybrid_n32_r4_t0.csv"), field);
    EXPECT_EQ(first.size(), 13u);
}

TEST_F(Runner, GroundTruthComputedOnDemand) {
    const auto s = spec(
        "[problem]\nname = experiment4\n[run]\nscheme = hybrid\nresolutions = 16, 32\nr = 4\nfine_resolution = 64\n"
        "timing_runs = 1\n");
    EXPECT_FALSE(fs::exists(opt.cache_dir / "experiment4_64.csv"));
    std::ostringstream progress;
    opt.log = &progress;
    const auto recs = cmd_run(s, opt, log);
    EXPECT_TRUE(fs::exists(opt.cache_dir / "experiment4_64.csv"));
    EXPECT_NE(progress.str().find("computed"), std::string::npos);
    ASSERT_EQ(recs.size(), 2u);
    EXPECT_EQ(recs[0].error.nodes_compared, 17u * 17u);
    cmd_run(s, opt, log);
    EXPECT_NE(progress.str().find("loaded"), std::string::npos);
}

TEST_F(Runner, FailureLeavesNoOutputs) {
    const auto s = spec(
        "[problem]\nname = experiment4\n[run]\nresolutions = 16, 24\nfine_resolution = 64\ntiming_runs = 1\n");
    EXPECT_THROW(cmd_run(s, opt, log), ConfigError);
    EXPECT_FALSE(fs::exists(s.out_dir));
}

TEST_F(Runner, TransactionRemovesPartialFiles) {
    {
        OutputTransaction tx(root / "partial");
        tx.open("sweep.csv") << "header\n";
        tx.open("fields/a.csv") << "1\n";
        EXPECT_TRUE(fs::exists(root / "partial" / "fields" / "a.csv"));
    }
    EXPECT_FALSE(fs::exists(root / "partial"));
    {
        OutputTransaction tx(root / "kept");
        tx.open("sweep.csv") << "header\n";
        tx.commit();
    }
    EXPECT_TRUE(fs::exists(root / "kept" / "sweep.csv"));
}

TEST_F(Runner, AdvectionSweep) {
    const auto s = spec(
        "[problem]\nname = advection1d\ncase = fig2d\n[run]\nscheme = explicit, implicit, hybrid, semi-lagrangian\n"
        "resolutions = 64, 128\nr = 1\ntiming_runs = 1\n");
    const auto recs = cmd_run(s, opt, log);
    ASSERT_EQ(recs.size(), 8u);
    for (const auto& r : recs) {
        EXPECT_TRUE(std::isfinite(r.error.l1));
        EXPECT_GT(r.error.l1, 0.0);
    }
    EXPECT_TRUE(fs::exists(s.out_dir / "fields" / "semi-lagrangian_n128_r1_t1.csv"));
}

TEST(Reproduce, FigurePlans) {
    for (const auto& id : figure_ids()) {
        const auto f = figure_plan(id);
        EXPECT_FALSE(f.panels.empty()) << id;
        for (const auto& p : f.panels) {
            EXPECT_EQ(p.explicit_sweep.schemes, (std::vector<std::string>{"explicit"}));
            EXPECT_EQ(p.explicit_sweep.r, (std::vector<double>{1.0}));
            EXPECT_GE(p.stepped_sweep.r.size(), 5u);
            EXPECT_NO_THROW(validate(p.stepped_sweep));
            EXPECT_NE(plot_script(f).find("\"" + p.name + "\""), std::string::npos);
            for (auto n : p.stepped_sweep.resolutions) EXPECT_LE(n, p.stepped_sweep.is_1d() ? 1024u : 512u);
        }
    }
    EXPECT_EQ(figure_plan("fig2").panels.size(), 4u);
    EXPECT_EQ(figure_plan("fig8").panels.size(), 2u);
    EXPECT_THROW(figure_plan("fig4"), std::invalid_argument);
}

}  // namespace
}  // namespace hjb
