#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "hjbmarch/config.hpp"

namespace hjb {
namespace {

RunSpec parse(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in, "test.ini");
}

std::string error_of(const std::string& text) {
    try {
        parse(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

TEST(ParseConfig, MinimalFileGetsDefaults) {
    const auto s = parse("[problem]\nname = experiment1\n[run]\nresolutions = 32\n");
    EXPECT_EQ(s.problem, "experiment1");
    EXPECT_EQ(s.resolutions, (std::vector<std::size_t>{32}));
    EXPECT_EQ(s.r, (std::vector<double>{1.0}));
    EXPECT_EQ(s.report, (std::vector<double>{0.0}));
    EXPECT_FALSE(s.report_given);
    EXPECT_EQ(s.schemes, (std::vector<std::string>{"explicit"}));
    EXPECT_EQ(s.timing_runs, 3u);
    EXPECT_EQ(s.fine_resolution, 512u);
    EXPECT_TRUE(s.write_fields);
    EXPECT_EQ(s.cells(), 1u);
}

TEST(ParseConfig, UnknownKeyNamesKeyAndLine) {
    const auto msg = error_of("[problem]\nname = experiment1\nfoo = 3\n[run]\nresolutions = 8\n");
    EXPECT_NE(msg.find("foo"), std::string::npos) << msg;
    EXPECT_NE(msg.find("test.ini:3"), std::string::npos) << msg;
}

TEST(ParseConfig, GammaFlowsIntoExperiment3) {
    const auto s = parse("[problem]\nname = experiment3\ngamma = 11\n[run]\nresolutions = 16\n");
    const auto p = make_problem(s.problem, s.parameters);
    EXPECT_EQ(p.parameters.at("gamma"), 11.0);
    EXPECT_DOUBLE_EQ(p.speed_min, std::pow(0.5, 11));
}

TEST(ParseConfig, ListsCommentsAndOutput) {
    const auto s = parse(
        "# sweep\n[problem]\nname = experiment2 ; inline comment\nlambda = 0.8\n"
        "[run]\nscheme = explicit, implicit,hybrid\nresolutions = 16, 32 ,64\nr = 1, 2.5, 4\nreport = 0, 0.6\n"
        "timing_runs = 5\nfine_resolution = 256\nseed = 9\n[output]\ndir = out/x\nfields = no\n");
    EXPECT_EQ(s.schemes.size(), 3u);
    EXPECT_EQ(s.resolutions, (std::vector<std::size_t>{16, 32, 64}));
    EXPECT_EQ(s.r, (std::vector<double>{1.0, 2.5, 4.0}));
    EXPECT_EQ(s.report, (std::vector<double>{0.0, 0.6}));
    EXPECT_TRUE(s.report_given);
    EXPECT_EQ(s.timing_runs, 5u);
    EXPECT_EQ(s.fine_resolution, 256u);
    EXPECT_EQ(s.seed, 9u);
    EXPECT_EQ(s.out_dir, std::filesystem::path("out/x"));
    EXPECT_FALSE(s.write_fields);
    EXPECT_EQ(s.cells(), 27u);
}

TEST(ParseConfig, AdvectionCase) {
    const auto s = parse("[problem]\nname = advection1d\ncase = fig2d\n[run]\nscheme = semi-lagrangian\nresolutions = 64\n");
    EXPECT_TRUE(s.is_1d());
    EXPECT_EQ(s.case_id, "fig2d");
    EXPECT_NE(error_of("[problem]\nname = advection1d\ncase = fig9z\n[run]\nresolutions = 64\n").find("fig9z"),
              std::string::npos);
    EXPECT_NE(error_of("[problem]\nname = experiment1\n[run]\nscheme = semi-lagrangian\nresolutions = 8\n")
                  .find("semi-lagrangian"),
              std::string::npos);
}

TEST(ParseConfig, RejectsMalformedInput) {
    EXPECT_NE(error_of("[problem]\nname = experiment1\n").find("resolutions"), std::string::npos);
    EXPECT_NE(error_of("[weird]\n").find("test.ini:1"), std::string::npos);
    EXPECT_NE(error_of("name = experiment1\n").find("outside"), std::string::npos);
    EXPECT_NE(error_of("[problem]\nname\n").find("test.ini:2"), std::string::npos);
    EXPECT_NE(error_of("[problem]\nname = experiment3\ngamma = abc\n[run]\nresolutions = 8\n").find("test.ini:3"),
              std::string::npos);
    EXPECT_NE(error_of("[run]\nresolutions = 8, -2\n").find("test.ini:2"), std::string::npos);
    EXPECT_NE(error_of("[problem]\nname = experiment9\n[run]\nresolutions = 8\n").find("experiment9"),
              std::string::npos);
    EXPECT_FALSE(error_of("[problem]\nname = experiment3\ngamma = 0.5\n[run]\nresolutions = 8\n").empty());
    EXPECT_FALSE(error_of("[run]\nresolutions = 8\nreport = 2.0\n").empty());
    EXPECT_FALSE(error_of("[run]\nresolutions = 8\nr = 0\n").empty());
    EXPECT_FALSE(error_of("[output]\nfields = maybe\n[run]\nresolutions = 8\n").empty());
}

TEST(ParseConfig, MissingFile) {
    EXPECT_THROW(parse_config(std::filesystem::path("/nonexistent/run.ini")), ConfigError);
}

}  // namespace
}  // namespace hjb
