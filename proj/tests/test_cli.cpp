#include <gtest/gtest.h>

#include <cstdio>
#include <sstream>

#include "smile/cli.hpp"
#include "support.hpp"

namespace smile {
namespace {

struct CliRun {
  int code = 0;
  std::string out, err;
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "smile_oie");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  CliRun r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

size_t count(const std::string& hay, const std::string& needle) {
  size_t n = 0;
  for (size_t p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) ++n;
  return n;
}

const std::string kRunning = testing::test_data("running_example.jsonl");

TEST(Cli, HelpAndUsage) {
  EXPECT_EQ(run({"--help"}).code, kExitOk);
  EXPECT_EQ(run({}).code, kExitUsage);
  EXPECT_EQ(run({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(run({"score", "--pred", "x"}).code, kExitUsage);
}

TEST(Cli, BuildGraphsDot) {
  const CliRun c = run({"build-graphs", "--corpus", kRunning, "--view", "const", "--format", "dot"});
  ASSERT_EQ(c.code, kExitOk) << c.err;
  EXPECT_EQ(count(c.out, " -- "), 9u);
  EXPECT_NE(c.out.find("// sentence running-example"), std::string::npos);
  const CliRun d = run({"build-graphs", "--corpus", kRunning, "--view", "dep", "--format", "dot"});
  EXPECT_EQ(count(d.out, " -- "), 10u);
  const CliRun v3 = run({"build-graphs", "--corpus", kRunning, "--view", "const", "--format", "dot",
                      "--variant", "v3"});
  EXPECT_EQ(count(v3.out, " -- "), 10u);
}

TEST(Cli, BuildGraphsJson) {
  const CliRun r = run({"build-graphs", "--corpus", kRunning, "--view", "both"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::istringstream lines(r.out);
  std::string line;
  std::vector<std::string> views;
  while (std::getline(lines, line)) {
    const auto j = nlohmann::json::parse(line);
    EXPECT_EQ(j["sentence_id"], "running-example");
    views.push_back(j["graph"]["view"]);
  }
  EXPECT_EQ(views, (std::vector<std::string>{"const", "dep"}));
}

TEST(Cli, BadFormatAndMissingFiles) {
  EXPECT_EQ(run({"build-graphs", "--corpus", kRunning, "--format", "xml"}).code, kExitUsage);
  EXPECT_EQ(run({"build-graphs", "--corpus", "/nonexistent.jsonl"}).code, kExitData);
  EXPECT_EQ(run({"extract", "--ckpt", "/nonexistent.ckpt", "--corpus", kRunning}).code, kExitData);
}

TEST(Cli, ScoreFixture) {
  const CliRun r = run({"score", "--pred", testing::test_data("scorer_pred.jsonl"), "--gold",
                     testing::test_data("scorer_gold.jsonl"), "--curve"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto j = nlohmann::json::parse(r.out.substr(0, r.out.find('\n')));
  EXPECT_NEAR(j["f1"].get<double>(), 14.0 / 23, 1e-9);
  EXPECT_EQ(count(r.out, "threshold "), 10u);
  const CliRun lex = run({"score", "--pred", testing::test_data("scorer_pred.jsonl"), "--gold",
                       testing::test_data("scorer_gold.jsonl"), "--mode", "lexical"});
  EXPECT_NEAR(nlohmann::json::parse(lex.out)["precision"].get<double>(), 9.75 / 11, 1e-9);
}

TEST(Cli, Gradcheck) {
  const CliRun r = run({"gradcheck", "--instances", "3", "--size", "6", "--seed", "4"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("max relative error"), std::string::npos);
  EXPECT_NE(r.out.find("over 3 instances"), std::string::npos);
  EXPECT_EQ(run({"gradcheck", "--size", "2"}).code, kExitUsage);
}

TEST(Cli, TrainExtractScore) {
  const std::string dir = ::testing::TempDir();
  const std::string ckpt = dir + "/cli_test.ckpt", pred = dir + "/cli_pred.jsonl";
  const std::string corpus = testing::repo_data("synthetic50.jsonl");
  const CliRun t = run({"train", "--corpus", corpus, "--epochs", "2", "--set", "d_h=8", "--set",
                     "d_l=4", "--seed", "3", "--out-ckpt", ckpt});
  ASSERT_EQ(t.code, kExitOk) << t.err;
  EXPECT_NE(t.out.find("trained 2 epochs"), std::string::npos);
  const CliRun e = run({"extract", "--ckpt", ckpt, "--corpus", corpus, "--out", pred});
  ASSERT_EQ(e.code, kExitOk) << e.err;
  const CliRun s = run({"score", "--pred", pred, "--gold", corpus});
  EXPECT_EQ(s.code, kExitOk) << s.err;
  EXPECT_EQ(run({"train", "--corpus", corpus, "--set", "nope=1", "--out-ckpt", ckpt}).code,
            kExitUsage);
  EXPECT_EQ(run({"train", "--corpus", corpus, "--out-ckpt", ckpt, "--set", "lr=abc"}).code,
            kExitUsage);
  std::remove(ckpt.c_str());
  std::remove(pred.c_str());
}

TEST(Cli, ScoreUnalignedIdsIsDataError) {
  const CliRun r = run({"score", "--pred", testing::test_data("scorer_pred.jsonl"), "--gold", kRunning});
  EXPECT_EQ(r.code, kExitData);
}

}  // namespace
}  // namespace smile
