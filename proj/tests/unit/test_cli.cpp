#include "cli_app.hpp"

#include "salpchain/artifacts_io.hpp"
#include "salpchain/config.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

namespace salpchain {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "salpchain");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::cliMain(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("salpchain_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    config_ = (dir_ / "config.json").string();
    writeTextFile(config_, scenarioToJson(defaultReferenceScenario()));
    unsetenv("SALPCHAIN_SEED");
  }
  void TearDown() override {
    unsetenv("SALPCHAIN_SEED");
    fs::remove_all(dir_);
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
  std::string config_;
};

TEST_F(CliTest, ReferenceScenarioIsByteIdenticalForSeed) {
  ASSERT_EQ(run({"paper-scenario", "--seed", "42", "--out", path("a")}).code, 0);
  ASSERT_EQ(run({"paper-scenario", "--seed", "42", "--out", path("b")}).code, 0);
  for (const char* f : {"config.json", "truth.csv", "measurements.csv", "estimate.csv",
                        "observability.csv", "snapshots.csv"}) {
    ASSERT_TRUE(fs::exists(dir_ / "a" / f)) << f;
    EXPECT_EQ(readTextFile(dir_ / "a" / f), readTextFile(dir_ / "b" / f)) << f;
  }
  EXPECT_EQ(loadScenario(dir_ / "a" / "config.json").seed, 42u);
  const std::string est = readTextFile(dir_ / "a" / "estimate.csv");
  EXPECT_EQ(est.substr(0, est.find('\n')), csvHeader(estimateColumns(3)));
}

TEST_F(CliTest, ObservabilityAtOneTime) {
  const Result r = run({"observability", config_, "--at", "0.25"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "t=0.25 observable=true rank=12\n");
  const Result off = run({"observability", config_, "--at", "0.35"});
  EXPECT_EQ(off.out.rfind("t=0.35 observable=false", 0), 0u) << off.out;
}

TEST_F(CliTest, ObservabilitySweepPrintsEverySample) {
  const Result r = run({"observability", config_});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 101);
  EXPECT_EQ(run({"observability", config_, "--at", "2.0"}).code, 1);
  EXPECT_EQ(run({"observability", config_, "--at", "0.1", "--sweep"}).code, 1);
}

TEST_F(CliTest, EstimateMonteCarloWritesRunsAndSummary) {
  const Result r = run({"estimate", config_, "--runs", "3", "--out", path("mc")});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* d : {"run_000", "run_001", "run_002"}) {
    EXPECT_TRUE(fs::exists(dir_ / "mc" / d / "estimate.csv")) << d;
  }
  const std::string summary = readTextFile(dir_ / "mc" / "nees_summary.csv");
  EXPECT_EQ(summary.substr(0, summary.find('\n')), csvHeader(neesSummaryColumns()));
  EXPECT_NE(readTextFile(dir_ / "mc" / "run_000" / "measurements.csv"),
            readTextFile(dir_ / "mc" / "run_001" / "measurements.csv"));
}

TEST_F(CliTest, SimulateJsonFormat) {
  ASSERT_EQ(run({"simulate", config_, "--format", "json", "--out", path("j")}).code, 0);
  const RunArtifacts a = artifactsFromJson(readTextFile(dir_ / "j" / "run.json"));
  EXPECT_EQ(a.links, 3);
  EXPECT_EQ(a.truth.rows.size(), 101u);
  EXPECT_TRUE(a.estimate.rows.empty());
  EXPECT_EQ(run({"simulate", config_, "--format", "xml"}).code, 1);
}

TEST_F(CliTest, SeedPrecedence) {
  auto seedOf = [&](const std::string& out) {
    return artifactsFromJson(readTextFile(dir_ / out / "run.json")).seed;
  };
  ASSERT_EQ(run({"simulate", config_, "--format", "json", "--out", path("cfg")}).code, 0);
  EXPECT_EQ(seedOf("cfg"), 42u);
  setenv("SALPCHAIN_SEED", "7", 1);
  ASSERT_EQ(run({"simulate", config_, "--format", "json", "--out", path("env")}).code, 0);
  EXPECT_EQ(seedOf("env"), 7u);
  ASSERT_EQ(run({"simulate", config_, "--seed", "9", "--format", "json", "--out", path("flag")}).code, 0);
  EXPECT_EQ(seedOf("flag"), 9u);
  setenv("SALPCHAIN_SEED", "abc", 1);
  EXPECT_EQ(run({"simulate", config_, "--out", path("bad")}).code, 1);
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(run({"--help"}).code, 0);
  EXPECT_EQ(run({"simulate", "--help"}).code, 0);
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"simulate", config_, "--bogus"}).code, 1);
  EXPECT_EQ(run({"frobnicate"}).code, 1);
  const Result missing = run({"simulate", path("missing.json")});
  EXPECT_EQ(missing.code, 1);
  EXPECT_NE(missing.err.find("missing.json"), std::string::npos);
  writeTextFile(path("bad.json"), "{\"schemaVersion\": 1, \"chain\": {}}");
  const Result bad = run({"simulate", path("bad.json")});
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.err.find("chain.halfLengths"), std::string::npos) << bad.err;
}

TEST_F(CliTest, RuntimeFailureExitsWithTwo) {
  Scenario s = defaultReferenceScenario();
  s.initialStd = {0, 0, 0, 0};
  writeTextFile(path("degenerate.json"), scenarioToJson(s));
  const Result r = run({"estimate", path("degenerate.json"), "--out", path("d")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("run 0"), std::string::npos) << r.err;
}

}  // namespace
}  // namespace salpchain
