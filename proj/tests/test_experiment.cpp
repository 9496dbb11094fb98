#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "med/experiment.hpp"

namespace {

const char* kDist1 = R"({
  "name": "two-bernoulli",
  "arms": [{"kind": "bernoulli", "p": 0.55}, {"kind": "bernoulli", "p": 0.45}],
  "policies": [{"policy": "med", "r": 2, "d": 0.01}, {"policy": "ucb1"}],
  "horizon": 500,
  "runs": 8,
  "seed": 3
})";

std::string config_error_path(const std::string& text) {
  try {
    med::parse_config_text(text);
  } catch (const med::ConfigError& e) {
    return e.path();
  }
  return "<no error>";
}

TEST(ParseConfig, ValidBernoulliConfig) {
  const auto c = med::parse_config_text(kDist1);
  EXPECT_EQ(c.name, "two-bernoulli");
  ASSERT_EQ(c.arms.size(), 2u);
  EXPECT_EQ(med::arm_mean(c.arms[0]), 0.55);
  ASSERT_EQ(c.policies.size(), 2u);
  EXPECT_EQ(med::label_of(c.policies[0]), "med(r=2,d=0.01)");
  EXPECT_EQ(c.horizon, 500u);
  EXPECT_EQ(c.runs, 8u);
  EXPECT_EQ(c.seed, 3u);
  EXPECT_TRUE(c.checkpoints.empty());
}

TEST(ParseConfig, BetaAndDiscreteArms) {
  const auto c = med::parse_config_text(R"({
    "bounds": [0, 1],
    "arms": [{"kind": "beta", "alpha": 7, "beta": 3},
             {"kind": "discrete", "points": [0.2, 0.6], "probs": [0.5, 0.5]}],
    "policies": [{"policy": "ucb2", "alpha": 0.001}, {"policy": "med", "anchor": "arm"}],
    "horizon": 100, "checkpoints": [10, 50, 100]
  })");
  EXPECT_NEAR(med::arm_mean(c.arms[0]), 0.7, 1e-15);
  EXPECT_NEAR(med::arm_mean(c.arms[1]), 0.4, 1e-15);
  EXPECT_EQ(c.policies[1].anchor, med::PolicyConfig::Anchor::arm_mean);
  EXPECT_EQ(c.checkpoints, (std::vector<std::uint64_t>{10, 50, 100}));
}

TEST(ParseConfig, ErrorsNameTheOffendingKey) {
  const std::string arms = R"("arms": [{"kind": "bernoulli", "p": 0.5}, {"kind": "bernoulli", "p": 0.4}])";
  const std::string pol = R"("policies": [{"policy": "med"}])";
  EXPECT_EQ(config_error_path("{" + arms + "," + pol + R"(, "horizon": 10, "runs": 0})"), "$.runs");
  EXPECT_EQ(config_error_path("{" + arms + R"(, "policies": [{"policy": "thompson"}], "horizon": 10})"),
            "$.policies[0].policy");
  EXPECT_EQ(config_error_path(R"({"arms": [{"kind": "gauss"}, {"kind": "bernoulli", "p": 0.4}],)" +
                              pol + R"(, "horizon": 10})"),
            "$.arms[0].kind");
  EXPECT_EQ(config_error_path("{" + arms + "," + pol + "}"), "$.horizon");
  EXPECT_EQ(config_error_path("{" + pol + R"(, "horizon": 10})"), "$.arms");
  EXPECT_EQ(config_error_path(R"({"arms": [{"kind": "bernoulli"}, {"kind": "bernoulli", "p": 0.4}],)" +
                              pol + R"(, "horizon": 10})"),
            "$.arms[0].p");
  EXPECT_EQ(config_error_path("{" + arms + "," + pol + R"(, "horizon": 10, "colour": 1})"),
            "$.colour");
  EXPECT_EQ(config_error_path("{" + arms + "," + pol + R"(, "horizon": 1})"), "$.horizon");
  EXPECT_EQ(config_error_path("{" + arms + "," + pol + R"(, "horizon": 10, "checkpoints": [5, 5]})"),
            "$.checkpoints[1]");
  EXPECT_EQ(config_error_path("{" + arms + R"(, "policies": [{"policy": "ucb1"}, {"policy": "ucb1"}], "horizon": 10})"),
            "$.policies[1]");
  EXPECT_EQ(config_error_path(R"({"arms": [{"kind": "discrete", "points": [0.1, 0.2], "probs": [0.5, 0.6]},
                                           {"kind": "bernoulli", "p": 0.4}],)" +
                              pol + R"(, "horizon": 10})"),
            "$.arms[0]");
  EXPECT_EQ(config_error_path("{not json"), "$");
}

TEST(Presets, AllParse) {
  for (const auto& p : med::kPresets) {
    const auto c = med::parse_config_text(std::string(p.json));
    EXPECT_EQ(c.name, p.name);
    EXPECT_EQ(c.policies.size(), 3u);
    EXPECT_EQ(c.horizon, 10000u);
    EXPECT_NO_THROW(c.environment()) << p.name;
  }
  EXPECT_EQ(med::find_preset("dist7"), nullptr);
  EXPECT_NO_THROW(med::load_config("dist3"));
  EXPECT_THROW(med::load_config("/nonexistent/file.json"), std::runtime_error);
}

TEST(Csv, EmptyRowsGiveHeaderOnly) {
  EXPECT_EQ(med::to_csv({}), std::string(med::kCsvHeader) + "\n");
}

TEST(Csv, SingleRow) {
  const std::vector<med::ResultRow> rows{{"ucb1", 10, 1.5, 0.25, 0.875, 2.0}};
  const auto text = med::to_csv(rows);
  EXPECT_EQ(text, std::string(med::kCsvHeader) + "\nucb1,10,1.5,0.25,0.875,2\n");
}

TEST(Csv, LabelsWithCommasAreQuoted) {
  const std::vector<med::ResultRow> rows{{"med(r=2,d=0.01)", 10, 1.0, 0.0, 1.0, 0.0},
                                         {"say \"hi\"", 20, 1.0, 0.0, 1.0, 0.0}};
  EXPECT_EQ(med::to_csv(rows), std::string(med::kCsvHeader) +
                                   "\n\"med(r=2,d=0.01)\",10,1,0,1,0\n"
                                   "\"say \"\"hi\"\"\",20,1,0,1,0\n");
  EXPECT_EQ(med::parse_csv(med::to_csv(rows)), rows);
}

TEST(Csv, RoundTripIsExact) {
  const std::vector<med::ResultRow> rows{
      {"med(r=2,d=0.01)", 10000, 0.1 + 0.2, 1.0 / 3.0, 0.9876543210123457, 45.897623174},
      {"ucb2(alpha=0.001)", 7, 5e-324, 1.7976931348623157e308, 0.0, 0.0}};
  EXPECT_EQ(med::parse_csv(med::to_csv(rows)), rows);
}

TEST(RunExperiment, RowsSortedAndComplete) {
  const auto c = med::parse_config_text(kDist1);
  const auto r = med::run_experiment(c);
  const auto grid = med::log_checkpoints(500);
  ASSERT_EQ(r.rows.size(), 2 * grid.size());
  for (std::size_t i = 1; i < r.rows.size(); ++i) {
    const auto& a = r.rows[i - 1];
    const auto& b = r.rows[i];
    EXPECT_TRUE(a.policy < b.policy || (a.policy == b.policy && a.n < b.n));
  }
  for (const auto& row : r.rows) {
    EXPECT_GE(row.pct_best_mean, 0.0);
    EXPECT_LE(row.pct_best_mean, 1.0);
    EXPECT_NEAR(row.dmin_bound, r.bound.at(row.n), 1e-12);
  }
  const auto summary = med::emit_summary(r);
  EXPECT_NE(summary.find("ucb1"), std::string::npos);
  EXPECT_NE(summary.find("med(r=2,d=0.01)"), std::string::npos);
}

TEST(RunExperiment, ByteIdenticalAcrossRepeatsAndWorkers) {
  const auto c = med::parse_config_text(kDist1);
  const auto a = med::to_csv(med::run_experiment(c, {1, false}).rows);
  const auto b = med::to_csv(med::run_experiment(c, {1, false}).rows);
  const auto w = med::to_csv(med::run_experiment(c, {4, false}).rows);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, w);
}

TEST(RunExperiment, ShadowCheckReported) {
  auto c = med::parse_config_text(kDist1);
  c.runs = 2;
  const auto r = med::run_experiment(c, {1, true});
  EXPECT_GT(r.curves.at("med(r=2,d=0.01)").shadow.pairs, 0u);
  EXPECT_NE(med::emit_summary(r).find("shadow check"), std::string::npos);
}

TEST(EmitCsv, WritesFileAndReportsFailure) {
  const auto dir = std::filesystem::temp_directory_path() / "med_emit_csv_test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "out.csv").string();
  const std::vector<med::ResultRow> rows{{"ucb1", 10, 1.5, 0.25, 0.875, 2.0}};
  med::emit_csv(rows, path);
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(), med::to_csv(rows));
  std::filesystem::remove_all(dir);

  EXPECT_THROW(med::emit_csv(rows, "/nonexistent-dir/sub/out.csv"), std::runtime_error);
}

}  // namespace
