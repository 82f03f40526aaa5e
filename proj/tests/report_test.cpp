#include <gtest/gtest.h>

#include <sstream>

#include "coalgame/report.hpp"

using namespace coalgame;

namespace {

std::string instance_path(const std::string& name) {
  return std::string(COALGAME_INSTANCE_DIR) + "/" + name;
}

std::string expect_error(const std::string& text) {
  try {
    (void)parse_instance(text, "test.json");
  } catch (const InstanceError& e) {
    return e.what();
  }
  ADD_FAILURE() << "no error for: " << text;
  return {};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST(Instance, LoadsShippedInstances) {
  for (const char* name : {"two_players.json", "severe_congestion.json",
                           "limited_resources.json", "major_link.json",
                           "figure1_sweep.json", "figure2_sweep.json", "tabular_three.json"}) {
    const auto c = load_instance(instance_path(name));
    EXPECT_GT(c.players, 0u) << name;
    EXPECT_TRUE(c.warnings.empty()) << name;
  }
  const auto t = load_instance(instance_path("tabular_three.json"));
  EXPECT_EQ(t.mode, CongestionMode::tabular);
  EXPECT_DOUBLE_EQ(t.model().reward(1, 2), 0.4);
}

TEST(Instance, DefaultsAndGrid) {
  const auto c = parse_instance(R"({"schema_version":1,"players":2,"links":[1.0,0.4]})");
  EXPECT_EQ(c.mode, CongestionMode::equi_divisible);
  EXPECT_FALSE(c.beta_grid.has_value());
  EXPECT_DOUBLE_EQ(c.epsilon, kDefaultEpsilon);
  EXPECT_EQ(BetaGrid({0.0, 1.0, 0.01}).values().size(), 101u);
  EXPECT_NEAR(BetaGrid({0.0, 1.0, 0.01}).values().back(), 1.0, 1e-12);
}

TEST(Instance, ValidationErrors) {
  EXPECT_NE(expect_error(R"({"schema_version":1,"players":2,"links":[1.0,0.0]})")
                .find("positive"),
            std::string::npos);
  EXPECT_NE(expect_error(R"({"schema_version":2,"players":2,"links":[1.0]})")
                .find("schema_version"),
            std::string::npos);
  EXPECT_NE(expect_error(R"({"schema_version":1,"players":2,"links":[]})").find("links"),
            std::string::npos);
  EXPECT_NE(expect_error(R"({"schema_version":1,"players":2,"mode":"fluid","links":[1]})")
                .find("mode"),
            std::string::npos);
  EXPECT_NE(expect_error(R"({"schema_version":1,"players":2,"mode":"tabular",
                             "links":[{"table":[1.0]}]})")
                .find("table entries"),
            std::string::npos);
  EXPECT_NE(expect_error(R"({"schema_version":1,"players":2,"mode":"tabular",
                             "links":[{"table":[1.0,0.5]}],"sweep":{"mu1":[1.0]}})")
                .find("equi-divisible"),
            std::string::npos);
  EXPECT_NE(expect_error(R"({"schema_version":1,"players":2,"links":[1.0],
                             "beta":{"start":0.5,"stop":0.1,"step":0.1}})")
                .find("beta"),
            std::string::npos);
  EXPECT_NE(expect_error(R"({"schema_version":1,"links":[1.0]})").find("test.json"),
            std::string::npos);
}

TEST(Instance, ParseErrorCarriesLine) {
  const auto msg = expect_error("{\n  \"schema_version\": 1,\n  \"players\": 2,\n  \"links\": [1.0,\n}");
  EXPECT_NE(msg.find("test.json"), std::string::npos);
  EXPECT_NE(msg.find("line 5"), std::string::npos) << msg;
}

TEST(Instance, UnsortedLinksAreResortedWithWarning) {
  const auto c = parse_instance(R"({"schema_version":1,"players":2,"links":[0.4,1.0]})");
  ASSERT_EQ(c.warnings.size(), 1u);
  EXPECT_DOUBLE_EQ(c.links[0].mu, 1.0);
  EXPECT_DOUBLE_EQ(c.model().solo(1), 0.4);
}

TEST(Instance, FewerLinksThanPlayersWarns) {
  const auto c = parse_instance(R"({"schema_version":1,"players":3,"links":[1.0,0.4]})");
  ASSERT_EQ(c.warnings.size(), 1u);
  EXPECT_NE(c.warnings[0].find("fewer links"), std::string::npos);
}

TEST(Instance, EmitParseRoundTrip) {
  for (const char* name : {"two_players.json", "tabular_three.json", "figure2_sweep.json"}) {
    const auto c = load_instance(instance_path(name));
    const auto again = parse_instance(emit_instance(c));
    EXPECT_EQ(emit_instance(again), emit_instance(c)) << name;
    EXPECT_EQ(emit_report(run_analysis(again)), emit_report(run_analysis(c))) << name;
  }
}

TEST(Report, TwoPlayerJson) {
  const auto report = run_analysis(load_instance(instance_path("two_players.json")));
  EXPECT_FALSE(report.degenerate());
  const auto j = to_json(report);
  EXPECT_EQ(j["schema_version"], 1);
  ASSERT_EQ(j["instances"].size(), 1u);
  const auto& inst = j["instances"][0];
  ASSERT_EQ(inst["grid_check"]["disagreements"], 0);
  EXPECT_GT(inst["grid_check"]["evaluations"].get<int>(), 0);
  EXPECT_EQ(report.instances[0].cycles.size(), 2u);
  EXPECT_EQ(emit_report(report), emit_report(run_analysis(report.config)));
}

TEST(Report, InfinityIsSpelledOut) {
  const auto text = emit_report(run_analysis(load_instance(instance_path("two_players.json"))));
  EXPECT_NE(text.find("\"inf\""), std::string::npos);
  EXPECT_EQ(text.find("null"), std::string::npos);
}

TEST(Report, FigureDataRows) {
  const auto csv = lines(
      emit_figure_data(run_analysis(load_instance(instance_path("two_players.json")))));
  ASSERT_EQ(csv.size(), 3u);
  EXPECT_EQ(csv[0], "mu1,mu1_half_minus_mubar,partition,interval_lo,interval_hi");
  EXPECT_EQ(csv[1], "1.0,-0.2,\"[2]\",0.0,0.4");
  EXPECT_EQ(csv[2], "1.0,-0.2,\"[1,1]\",0.4,inf");
}

TEST(Report, NeverStablePartitionsHaveNoRows) {
  const auto report = run_analysis(load_instance(instance_path("limited_resources.json")));
  const auto csv = emit_figure_data(report);
  EXPECT_EQ(csv.find("\"[5]\""), std::string::npos);
  EXPECT_EQ(csv.find("\"[3,2]\""), std::string::npos);
  EXPECT_NE(csv.find("\"[1,1,1,1,1]\""), std::string::npos);
}

TEST(Report, SweepProducesOneInstancePerPoint) {
  const auto c = load_instance(instance_path("figure1_sweep.json"));
  const auto report = run_analysis(c);
  ASSERT_EQ(report.instances.size(), c.mu1_sweep.size());
  for (std::size_t i = 0; i < c.mu1_sweep.size(); ++i)
    EXPECT_DOUBLE_EQ(*report.instances[i].sweep_mu1, c.mu1_sweep[i]);
  // below the second link the links get re-sorted
  const auto low = parse_instance(
      R"({"schema_version":1,"players":2,"links":[1.0,0.4],"sweep":{"mu1":[0.3]}})");
  const auto r = run_analysis(low);
  EXPECT_DOUBLE_EQ(r.instances[0].model.solo(0), 0.4);
  EXPECT_FALSE(r.instances[0].warnings.empty());
}

TEST(Report, TiedOptimizerIsDegenerate) {
  const auto report = run_analysis(
      parse_instance(R"({"schema_version":1,"players":2,"mode":"tabular",
                         "links":[{"table":[1.0,0.7]},{"table":[0.4,0.2]}]})"));
  EXPECT_TRUE(report.degenerate());
  EXPECT_EQ(report.instances[0].gc_optimizer_count, 2u);
  EXPECT_FALSE(report.instances[0].gc.has_value());
}
