#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <sstream>

#include "smile/error.hpp"
#include "smile/eval.hpp"
#include "smile/numerics.hpp"
#include "smile/synthetic.hpp"
#include "support.hpp"

namespace smile {
namespace {

std::vector<SentenceTuples> fixture(const std::string& name) {
  return load_tuples(testing::test_data(name));
}

// Independent curve oracle: group by distinct confidence, trapezoids with a
// leading (0, max precision) point.
double oracle_auc(std::vector<ScoredPrediction> s, double num_gold,
                  std::vector<std::pair<double, double>>* curve = nullptr) {
  std::map<double, std::pair<double, double>, std::greater<>> groups;
  std::map<double, int, std::greater<>> counts;
  for (const auto& p : s) {
    groups[p.confidence].first += p.precision_credit;
    groups[p.confidence].second += p.recall_credit;
    counts[p.confidence] += 1;
  }
  std::vector<std::pair<double, double>> pts;
  double pc = 0, rc = 0;
  int n = 0;
  for (const auto& [c, credit] : groups) {
    pc += credit.first;
    rc += credit.second;
    n += counts[c];
    pts.push_back({rc / num_gold, pc / n});
  }
  double pmax = 0;
  for (const auto& p : pts) pmax = std::max(pmax, p.second);
  double area = 0, r0 = 0, p0 = pmax;
  for (const auto& [r, p] : pts) {
    area += (r - r0) * (p + p0) / 2;
    r0 = r;
    p0 = p;
  }
  if (curve) *curve = pts;
  return area;
}

TEST(Fixture, ExactScores) {
  const auto pred = fixture("scorer_pred.jsonl");
  const auto gold = fixture("scorer_gold.jsonl");
  const ScoreReport r = exact_match_score(pred, gold);
  EXPECT_EQ(r.num_pred, 11u);
  EXPECT_EQ(r.num_gold, 12u);
  EXPECT_NEAR(r.precision, 7.0 / 11, 1e-9);
  EXPECT_NEAR(r.recall, 7.0 / 12, 1e-9);
  EXPECT_NEAR(r.f1, 14.0 / 23, 1e-9);
  const double auc = 1.0 / 12 + 1.0 / 12 + 17.0 / 288 + 31.0 / 480 + 49.0 / 720 + 19.0 / 288 +
                     55.0 / 864;
  EXPECT_NEAR(r.auc, auc, 1e-9);
  const std::vector<std::pair<double, double>> want{
      {1.0 / 12, 1.0},     {2.0 / 12, 1.0},     {2.0 / 12, 2.0 / 3},  {3.0 / 12, 3.0 / 4},
      {4.0 / 12, 4.0 / 5}, {5.0 / 12, 5.0 / 6}, {6.0 / 12, 6.0 / 8},  {7.0 / 12, 7.0 / 9},
      {7.0 / 12, 7.0 / 10}, {7.0 / 12, 7.0 / 11}};
  ASSERT_EQ(r.curve.size(), want.size());
  for (size_t k = 0; k < want.size(); ++k) {
    EXPECT_NEAR(r.curve[k].recall, want[k].first, 1e-12) << k;
    EXPECT_NEAR(r.curve[k].precision, want[k].second, 1e-12) << k;
  }
}

TEST(Fixture, LexicalScores) {
  const auto pred = fixture("scorer_pred.jsonl");
  const auto gold = fixture("scorer_gold.jsonl");
  const ScoreReport r = lexical_match_score(pred, gold);
  const double p = 9.75 / 11, rec = (8.75 + 5.0 / 7) / 12;
  EXPECT_NEAR(r.precision, p, 1e-9);
  EXPECT_NEAR(r.recall, rec, 1e-9);
  EXPECT_NEAR(r.f1, 2 * p * rec / (p + rec), 1e-9);
  EXPECT_NEAR(r.auc, oracle_auc(match_lexical(pred, gold), 12), 1e-12);
}

TEST(Fixture, SwappingRolesSwapsPrecisionAndRecall) {
  const auto pred = fixture("scorer_pred.jsonl");
  const auto gold = fixture("scorer_gold.jsonl");
  const ScoreReport a = exact_match_score(pred, gold);
  const ScoreReport b = exact_match_score(gold, pred);
  EXPECT_NEAR(b.precision, 7.0 / 12, 1e-12);
  EXPECT_NEAR(b.recall, 7.0 / 11, 1e-12);
  EXPECT_NEAR(a.f1, b.f1, 1e-12);
}

TEST(Fixture, LexicalDominatesExact) {
  const auto pred = fixture("scorer_pred.jsonl");
  const auto gold = fixture("scorer_gold.jsonl");
  for (bool binary : {false, true}) {
    const ScoreReport e = exact_match_score(pred, gold, {binary});
    const ScoreReport l = lexical_match_score(pred, gold, {binary});
    EXPECT_GE(l.precision + 1e-12, e.precision);
    EXPECT_GE(l.recall + 1e-12, e.recall);
  }
}

TEST(Curve, OracleAgreesOnRandomCredits) {
  Rng rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<ScoredPrediction> s;
    const int n = 1 + static_cast<int>(rng.below(20));
    for (int k = 0; k < n; ++k) {
      const bool hit = rng.below(2) == 0;
      s.push_back({static_cast<double>(rng.below(5)) / 4.0, hit ? 1.0 : 0.0, hit ? 1.0 : 0.0});
    }
    std::vector<std::pair<double, double>> want;
    const double auc = oracle_auc(s, 25, &want);
    const CurveResult got = pr_curve_auc(s, 25);
    EXPECT_NEAR(got.auc, auc, 1e-12);
    ASSERT_EQ(got.curve.size(), want.size());
    for (size_t k = 0; k < want.size(); ++k) {
      EXPECT_NEAR(got.curve[k].recall, want[k].first, 1e-12);
      EXPECT_NEAR(got.curve[k].precision, want[k].second, 1e-12);
    }
  }
  EXPECT_EQ(pr_curve_auc({}, 3).auc, 0.0);
}

TEST(Matching, PerfectPredictionsScoreOne) {
  const auto corpus = synthetic_corpus(18, 4);
  const auto gold = gold_tuples(corpus);
  for (MatchMode m : {MatchMode::kExact, MatchMode::kLexical}) {
    const ScoreReport r = score(m, gold, gold);
    EXPECT_EQ(r.precision, 1.0);
    EXPECT_EQ(r.recall, 1.0);
    EXPECT_NEAR(r.auc, 1.0, 1e-12);
  }
}

TEST(Matching, UnknownOrRepeatedIdsAreRejected) {
  auto gold = fixture("scorer_gold.jsonl");
  auto pred = fixture("scorer_pred.jsonl");
  pred.push_back(SentenceTuples{"zz", {}, {}});
  try {
    exact_match_score(pred, gold);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kUnalignedIds);
  }
  pred.back().id = "s0";
  EXPECT_THROW(exact_match_score(pred, gold), Error);
}

TEST(Matching, MissingSentencesCountAsMisses) {
  const auto gold = fixture("scorer_gold.jsonl");
  const std::vector<SentenceTuples> pred{gold[0]};
  const ScoreReport r = exact_match_score(pred, gold);
  EXPECT_EQ(r.precision, 1.0);
  EXPECT_NEAR(r.recall, 1.0 / 12, 1e-15);
}

TEST(LexicalPair, RoleWiseOverlap) {
  TextTuple p, g;
  p.roles[arg_role(0)] = {"tom"};
  p.roles[kRelRole] = {"saw"};
  p.roles[arg_role(1)] = {"lucy", "tom"};
  g.roles[arg_role(0)] = {"tom"};
  g.roles[kRelRole] = {"saw"};
  g.roles[arg_role(1)] = {"lucy"};
  const PairScore s = lexical_pair_score(p, g);
  EXPECT_DOUBLE_EQ(s.precision, 0.75);
  EXPECT_DOUBLE_EQ(s.recall, 1.0);
  // words in the wrong role earn nothing
  std::swap(p.roles[arg_role(0)], p.roles[arg_role(1)]);
  EXPECT_DOUBLE_EQ(lexical_pair_score(p, g).precision, 0.5);
}

TEST(Binary, ConcatenatesTrailingArguments) {
  TextTuple t;
  t.roles[arg_role(0)] = {"a"};
  t.roles[kRelRole] = {"r"};
  t.roles[arg_role(1)] = {"b"};
  t.roles[arg_role(2)] = {"c", "d"};
  const TextTuple b = to_binary(t);
  EXPECT_EQ(b.roles.size(), 3u);
  EXPECT_EQ(b.roles.at(arg_role(1)), (std::vector<std::string>{"b", "c", "d"}));
}

TEST(Io, ExtractionLineRoundTrip) {
  const ParsedSentence s = running_example();
  Tuple t = s.tuples[0];
  t.confidence = 0.625;
  const std::string line = extraction_json_line(s, {t});
  const auto j = nlohmann::json::parse(line);
  EXPECT_EQ(j["sentence_id"], "running-example");
  EXPECT_EQ(j["tuples"][0]["texts"]["ARG0"], "Mary 's cat");
  EXPECT_EQ(j["tuples"][0]["texts"]["REL"], "likes playing");
  std::istringstream in(line + "\n");
  const auto back = read_tuples_jsonl(in);
  ASSERT_EQ(back.size(), 1u);
  ASSERT_EQ(back[0].tuples.size(), 1u);
  EXPECT_EQ(back[0].tuples[0].confidence, 0.625);
  EXPECT_EQ(back[0].tuples[0].roles, to_text_tuple(s.tuples[0], s.tokens).roles);
}

TEST(Io, CorpusFilesReadAsGold) {
  const auto a = load_tuples(testing::test_data("running_example.jsonl"));
  ASSERT_EQ(a.size(), 1u);
  EXPECT_EQ(a[0].tuples.size(), 1u);
  EXPECT_EQ(a[0].tuples[0].roles.at(arg_role(2)), (std::vector<std::string>{"in", "the", "room"}));
}

TEST(Io, ReportJsonKeys) {
  ScoreReport r;
  r.precision = 0.5;
  r.curve.push_back({0.25, 0.5, 0.9});
  const auto j = nlohmann::json::parse(report_json(r));
  for (const char* k : {"precision", "recall", "f1", "auc", "num_pred", "num_gold", "curve"})
    EXPECT_TRUE(j.contains(k)) << k;
  EXPECT_EQ(j["curve"][0][0], 0.25);
}

TEST(Modes, Parse) {
  EXPECT_EQ(parse_match_mode("exact"), MatchMode::kExact);
  EXPECT_EQ(parse_match_mode("lexical"), MatchMode::kLexical);
  EXPECT_THROW(parse_match_mode("fuzzy"), Error);
}

}  // namespace
}  // namespace smile
