#pragma once

// Tuple scoring: exact n-ary matching, token-overlap (lexical) matching and
// precision-recall curves over tuple confidence.

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "smile/bio.hpp"
#include "smile/corpus.hpp"

namespace smile {

// A tuple as case-folded words per role.
struct TextTuple {
  std::map<RoleId, std::vector<std::string>> roles;
  double confidence = 1.0;
};

TextTuple to_text_tuple(const Tuple& t, const std::vector<Token>& tokens);
// Splits on whitespace and case-folds.
std::vector<std::string> fold_words(const std::string& text);
// <ARG0, REL, ARG1 ... ARGn concatenated as ARG1>
TextTuple to_binary(const TextTuple& t);

struct SentenceTuples {
  std::string id;
  std::vector<Token> tokens;  // may be empty for prediction files with texts
  std::vector<TextTuple> tuples;
};

struct CurvePoint {
  double recall = 0.0;
  double precision = 0.0;
  double threshold = 0.0;
};

struct ScoreReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double auc = 0.0;
  std::vector<CurvePoint> curve;
  std::size_t num_pred = 0;
  std::size_t num_gold = 0;
};

double f1_score(double precision, double recall);

// Credit earned by one prediction once matching is fixed.
struct ScoredPrediction {
  double confidence = 1.0;
  double precision_credit = 0.0;
  double recall_credit = 0.0;
};

struct CurveResult {
  std::vector<CurvePoint> curve;
  double auc = 0.0;
};

// Sweeps every distinct confidence, highest first. AUC is the trapezoid
// area over recall after prepending (0, highest precision on the curve).
CurveResult pr_curve_auc(std::span<const ScoredPrediction> scored, std::size_t num_gold);

enum class MatchMode { kExact, kLexical };
MatchMode parse_match_mode(const std::string& name);  // throws UnknownFormat

struct MatchOptions {
  bool binary = false;  // score <ARG0, REL, ARG1..n> projections
};

// Sentences are paired by id; a predicted id missing from gold, or a repeated
// id, throws UnalignedIds. Gold sentences without predictions count as misses.
std::vector<ScoredPrediction> match_exact(std::span<const SentenceTuples> pred,
                                          std::span<const SentenceTuples> gold,
                                          const MatchOptions& opts = {});
std::vector<ScoredPrediction> match_lexical(std::span<const SentenceTuples> pred,
                                            std::span<const SentenceTuples> gold,
                                            const MatchOptions& opts = {});

ScoreReport exact_match_score(std::span<const SentenceTuples> pred,
                              std::span<const SentenceTuples> gold, const MatchOptions& opts = {});
ScoreReport lexical_match_score(std::span<const SentenceTuples> pred,
                                std::span<const SentenceTuples> gold, const MatchOptions& opts = {});
ScoreReport score(MatchMode mode, std::span<const SentenceTuples> pred,
                  std::span<const SentenceTuples> gold, const MatchOptions& opts = {});

// Token-overlap precision/recall of one predicted tuple against one gold tuple.
struct PairScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};
PairScore lexical_pair_score(const TextTuple& pred, const TextTuple& gold);

SentenceTuples gold_tuples(const ParsedSentence& s);
std::vector<SentenceTuples> gold_tuples(std::span<const ParsedSentence> corpus);

// Extraction output, one JSON object per sentence:
// {"sentence_id": .., "tuples": [{"confidence": .., "spans": {"REL": [i, j]}, "texts": {"REL": ".."}}]}
std::string extraction_json_line(const ParsedSentence& s, const std::vector<Tuple>& tuples);
// Reads extraction output, or a corpus file (records with "tokens") whose gold
// tuples become the sentence tuples. Span-only tuples take their words from
// `reference` sentences with the same id when given.
std::vector<SentenceTuples> read_tuples_jsonl(std::istream& in,
                                              std::span<const SentenceTuples> reference = {});
std::vector<SentenceTuples> load_tuples(const std::string& path,
                                        std::span<const SentenceTuples> reference = {});

std::string report_json(const ScoreReport& r);

}  // namespace smile
