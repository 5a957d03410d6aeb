#include <gtest/gtest.h>

#include <sstream>

#include <nlohmann/json.hpp>

#include "hetprice_cli/cli.hpp"

namespace {

const std::string kData = HETPRICE_DATA_DIR;

struct Run {
  int code;
  std::string out;
  nlohmann::json report() const { return nlohmann::json::parse(out); }
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = hetprice::cli::run(args, out, err);
  return {code, out.str()};
}

std::string data(const std::string& name) { return kData + "/" + name; }

}  // namespace

using namespace hetprice::cli;

TEST(Cli, GarpExitCodes) {
  auto bad = run({"garp", "--panel", data("warp_pair.json"), "--consumer", "1"});
  EXPECT_EQ(bad.code, kRefuted);
  auto r = bad.report();
  EXPECT_EQ(r["schema"], 1);
  EXPECT_EQ(r["command"], "garp");
  EXPECT_EQ(r["exit_code"], kRefuted);
  auto good = run({"garp", "--panel", data("synth_cobb_douglas.json")});
  EXPECT_EQ(good.code, kInputError);  // a generator spec is not a panel
  auto cd = run({"garp", "--panel", data("crossing_positive.json")});
  EXPECT_EQ(cd.code, kInputError);  // cross-section document
}

TEST(Cli, SynthThenGarp) {
  auto path = testing::TempDir() + "cd_panel.json";
  auto s = run({"synth", "--spec", data("synth_cobb_douglas.json"), "--out", path});
  ASSERT_EQ(s.code, kSatisfied);
  auto g = run({"garp", "--panel", path, "--consumer", "2"});
  EXPECT_EQ(g.code, kSatisfied);
}

TEST(Cli, OneGoodRefuteOnTheExample) {
  auto r = run({"one-good-refute", "--panel", data("four_good_example.json"), "--good", "1"});
  EXPECT_EQ(r.code, kRefuted);
  auto j = r.report();
  EXPECT_EQ(j["result"]["outcome"], "refuted");
  EXPECT_EQ(j["result"]["method"], "interval");
  EXPECT_FALSE(j["result"]["trace"].empty());
}

TEST(Cli, Prop1OnTheExample) {
  auto r = run({"prop1", "--panel", data("four_good_example.json"), "--aggregator", "arithmetic"});
  EXPECT_EQ(r.code, kSatisfied);
  auto j = r.report();
  EXPECT_TRUE(j["result"].contains("prices"));
  EXPECT_EQ(j["result"]["pooled_garp"]["satisfied"], true);
}

TEST(Cli, RumAndPatches) {
  EXPECT_EQ(run({"rum", "--cross-section", data("crossing_negative.json")}).code, kRefuted);
  EXPECT_EQ(run({"rum", "--cross-section", data("crossing_positive.json")}).code, kSatisfied);
  EXPECT_EQ(run({"rpm", "--cross-section", data("crossing_positive.json")}).code, kSatisfied);
  auto p = run({"patches", "--cross-section", data("crossing_negative.json"), "--geometric"});
  EXPECT_EQ(p.code, kSatisfied);
  EXPECT_EQ(p.report()["result"]["decomposition"]["count"], 5);
}

TEST(Cli, ReportsAreByteStable) {
  std::vector<std::string> args{"prop2", "--aggregate", data("disaggregation.json")};
  auto a = run(args), b = run(args);
  EXPECT_EQ(a.code, kSatisfied);
  EXPECT_EQ(a.out, b.out);
  auto c = run({"rum", "--cross-section", data("crossing_positive.json"), "--threads", "3"});
  auto d = run({"rum", "--cross-section", data("crossing_positive.json"), "--threads", "1"});
  EXPECT_EQ(c.report()["result"], d.report()["result"]);
}

TEST(Cli, InputErrorsCarryAnErrorObject) {
  auto missing = run({"garp", "--panel", data("does_not_exist.json")});
  EXPECT_EQ(missing.code, kInputError);
  auto j = missing.report();
  ASSERT_TRUE(j.contains("error"));
  EXPECT_TRUE(j["error"].contains("kind"));
  EXPECT_TRUE(j["error"].contains("message"));
  EXPECT_EQ(run({"no-such-command"}).code, kInputError);
  EXPECT_EQ(run({"one-good-refute", "--panel", data("four_good_example.json"), "--good", "9"}).code, kInputError);
}

TEST(Cli, TimingIsOptIn) {
  auto plain = run({"garp", "--panel", data("warp_pair.json")});
  EXPECT_FALSE(plain.report().contains("wall_clock_ms"));
  auto timed = run({"garp", "--panel", data("warp_pair.json"), "--timing"});
  EXPECT_TRUE(timed.report().contains("wall_clock_ms"));
}
