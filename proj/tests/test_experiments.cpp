#include "experiments.hpp"

#include "cubeskel/errors.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace cubeskel::tools;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const auto p = fs::temp_directory_path() / "cubeskel_experiments_test" / name;
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST(ExperimentConfig, JsonRoundTripWithoutOutputDir)
{
    ExperimentConfig c;
    c.command = "transport";
    c.seed = 42;
    c.format = "json";
    c.out = "/somewhere";
    c.params = {{"N", 2}, {"ells", {2, 4}}};
    const auto back = ExperimentConfig::from_json(c.to_json());
    EXPECT_EQ(back.to_json(), c.to_json());
    EXPECT_FALSE(c.to_json().contains("out"));
    EXPECT_EQ(back.get("N", 0), 2);
    EXPECT_EQ(back.get("missing", 7), 7);

    const auto loose = ExperimentConfig::from_json({{"command", "hopf"}, {"pairs", 3}, {"out", "x"}});
    EXPECT_EQ(loose.get("pairs", 0), 3);
    EXPECT_EQ(loose.out, fs::path("x"));
    EXPECT_THROW(ExperimentConfig::from_json(nlohmann::json::array()), cubeskel::ParameterError);
}

TEST(Summary, AssertionsAreAnded)
{
    ExperimentConfig c;
    c.command = "x";
    Summary s(c);
    s.assertion("AC1", true, {{"v", 1.0 / 3.0}});
    EXPECT_TRUE(s.all_pass());
    s.assertion("AC1", false);
    EXPECT_FALSE(s.assertion_pass("AC1"));
    EXPECT_FALSE(s.all_pass());
    const auto j = s.to_json();
    EXPECT_FALSE(j["pass"].get<bool>());
    EXPECT_TRUE(j["assertions"]["AC1"].contains("parts"));
    s.check("side", true);
    EXPECT_TRUE(s.to_json()["checks"]["side"]["pass"].get<bool>());
}

TEST(Rounded, TwelveDigits)
{
    const auto j = rounded({{"a", 1.0 / 3.0}, {"b", {2.0 / 3.0, 1}}, {"c", "s"}});
    EXPECT_EQ(j["a"].get<double>(), 0.333333333333);
    EXPECT_EQ(j["b"][0].get<double>(), 0.666666666667);
    EXPECT_EQ(j["b"][1], 1);
    EXPECT_EQ(j["c"], "s");
}

TEST(Table, CsvAndJson)
{
    Table t({"a", "b", "c"});
    t.row({1, 0.5, "x"});
    EXPECT_THROW(t.row({1}), cubeskel::ShapeError);
    ExperimentConfig c;
    c.out = scratch("table");
    fs::create_directories(c.out);
    t.write(c, "t");
    EXPECT_EQ(slurp(c.out / "t.csv"), "a,b,c\n1,0.5,x\n");
    c.format = "json";
    t.write(c, "t");
    EXPECT_EQ(nlohmann::json::parse(slurp(c.out / "t.json")), nlohmann::json::parse(R"([{"a":1,"b":0.5,"c":"x"}])"));
}

TEST(RunExperiment, Errors)
{
    ExperimentConfig c;
    c.out = scratch("errors");
    c.command = "nope";
    EXPECT_THROW(run_experiment(c), cubeskel::ParameterError);
    c.command = "hopf";
    c.format = "xml";
    EXPECT_THROW(run_experiment(c), cubeskel::ParameterError);
    auto h = smoke_config("hopf", 1);
    h.out = scratch("hopf_n2");
    h.params["n"] = 2;
    EXPECT_THROW(run_experiment(h), cubeskel::UnsupportedError);
}

class Smoke : public ::testing::TestWithParam<std::string> {};

TEST_P(Smoke, RunsPassesAndIsDeterministic)
{
    auto a = smoke_config(GetParam(), 7);
    auto b = a;
    a.out = scratch(GetParam() + "_a");
    b.out = scratch(GetParam() + "_b");
    const auto sa = run_experiment(a);
    run_experiment(b);
    ASSERT_TRUE(fs::exists(a.out / "summary.json"));
    EXPECT_EQ(slurp(a.out / "summary.json"), slurp(b.out / "summary.json"));
    const auto j = nlohmann::json::parse(slurp(a.out / "summary.json"));
    EXPECT_EQ(j["config"]["command"], GetParam());
    for (const auto& [name, check] : j["checks"].items()) EXPECT_TRUE(check["pass"].get<bool>()) << name;
    if (GetParam() != "transport") EXPECT_TRUE(sa.all_pass()) << sa.dump();
}

INSTANTIATE_TEST_SUITE_P(AllExperiments, Smoke, ::testing::ValuesIn(experiment_names()),
                         [](const auto& info) {
                             std::string s = info.param;
                             for (auto& ch : s)
                                 if (ch == '-') ch = '_';
                             return s;
                         });
