#include "smile/eval.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "smile/error.hpp"

namespace smile {

namespace {

std::string fold(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// gold sentences by id; repeated ids throw
std::unordered_map<std::string, const SentenceTuples*> index_by_id(
    std::span<const SentenceTuples> sentences, const char* side) {
  std::unordered_map<std::string, const SentenceTuples*> out;
  for (const SentenceTuples& s : sentences) {
    if (!out.emplace(s.id, &s).second)
      throw Error(ErrorKind::kUnalignedIds, std::string(side) + " repeats sentence id " + s.id);
  }
  return out;
}

struct Paired {
  std::vector<TextTuple> pred;
  std::vector<TextTuple> gold;
};

std::vector<Paired> pair_sentences(std::span<const SentenceTuples> pred,
                                   std::span<const SentenceTuples> gold,
                                   const MatchOptions& opts, std::size_t& num_gold) {
  auto gold_by_id = index_by_id(gold, "gold");
  index_by_id(pred, "prediction");
  auto project = [&](const std::vector<TextTuple>& ts) {
    std::vector<TextTuple> out;
    for (const TextTuple& t : ts) out.push_back(opts.binary ? to_binary(t) : t);
    return out;
  };
  std::vector<Paired> out;
  std::unordered_set<std::string> seen;
  for (const SentenceTuples& p : pred) {
    auto it = gold_by_id.find(p.id);
    if (it == gold_by_id.end())
      throw Error(ErrorKind::kUnalignedIds, "predicted sentence " + p.id + " has no gold entry");
    seen.insert(p.id);
    out.push_back(Paired{project(p.tuples), project(it->second->tuples)});
  }
  num_gold = 0;
  for (const SentenceTuples& g : gold) {
    num_gold += g.tuples.size();
    if (!seen.count(g.id)) out.push_back(Paired{{}, project(g.tuples)});
  }
  return out;
}

// Prediction order for greedy matching: descending confidence, stable.
std::vector<size_t> by_confidence(const std::vector<TextTuple>& ts) {
  std::vector<size_t> order(ts.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return ts[a].confidence > ts[b].confidence;
  });
  return order;
}

bool exact_equal(const TextTuple& a, const TextTuple& b) { return a.roles == b.roles; }

size_t multiset_overlap(std::vector<std::string> a, std::vector<std::string> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  size_t i = 0, j = 0, n = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) {
      ++n;
      ++i;
      ++j;
    } else if (a[i] < b[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return n;
}

ScoreReport make_report(const std::vector<ScoredPrediction>& scored, std::size_t num_gold) {
  ScoreReport r;
  r.num_pred = scored.size();
  r.num_gold = num_gold;
  double pc = 0.0, rc = 0.0;
  for (const ScoredPrediction& s : scored) {
    pc += s.precision_credit;
    rc += s.recall_credit;
  }
  r.precision = scored.empty() ? 0.0 : pc / static_cast<double>(scored.size());
  r.recall = num_gold == 0 ? 0.0 : rc / static_cast<double>(num_gold);
  r.f1 = f1_score(r.precision, r.recall);
  CurveResult c = pr_curve_auc(scored, num_gold);
  r.curve = std::move(c.curve);
  r.auc = c.auc;
  return r;
}

std::size_t count_gold(std::span<const SentenceTuples> gold) {
  std::size_t n = 0;
  for (const SentenceTuples& g : gold) n += g.tuples.size();
  return n;
}

using nlohmann::json;

std::string id_string(const json& j, int line) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  throw Error(ErrorKind::kSchemaViolation, "sentence id must be a string or integer", line);
}

}  // namespace

TextTuple to_text_tuple(const Tuple& t, const std::vector<Token>& tokens) {
  TextTuple out;
  out.confidence = t.confidence;
  for (const auto& [role, span] : t.spans) {
    std::vector<std::string>& words = out.roles[role];
    for (int i = span.start; i <= span.end; ++i) words.push_back(tokens[static_cast<size_t>(i)].lowercased);
  }
  return out;
}

std::vector<std::string> fold_words(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> out;
  std::string w;
  while (in >> w) out.push_back(fold(w));
  return out;
}

TextTuple to_binary(const TextTuple& t) {
  TextTuple out;
  out.confidence = t.confidence;
  for (const auto& [role, words] : t.roles) {
    if (role == kRelRole || role == arg_role(0)) {
      out.roles[role] = words;
    } else {
      auto& tail = out.roles[arg_role(1)];
      tail.insert(tail.end(), words.begin(), words.end());
    }
  }
  return out;
}

double f1_score(double precision, double recall) {
  return precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

CurveResult pr_curve_auc(std::span<const ScoredPrediction> scored, std::size_t num_gold) {
  CurveResult out;
  if (scored.empty()) return out;
  std::vector<ScoredPrediction> sorted(scored.begin(), scored.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const ScoredPrediction& a, const ScoredPrediction& b) {
                     return a.confidence > b.confidence;
                   });
  double pc = 0.0, rc = 0.0;
  for (size_t k = 0; k < sorted.size(); ++k) {
    pc += sorted[k].precision_credit;
    rc += sorted[k].recall_credit;
    // close the group of equal confidences before emitting a point
    if (k + 1 < sorted.size() && sorted[k + 1].confidence == sorted[k].confidence) continue;
    CurvePoint p;
    p.threshold = sorted[k].confidence;
    p.precision = pc / static_cast<double>(k + 1);
    p.recall = num_gold == 0 ? 0.0 : rc / static_cast<double>(num_gold);
    out.curve.push_back(p);
  }
  double best = 0.0;
  for (const CurvePoint& p : out.curve) best = std::max(best, p.precision);
  double prev_r = 0.0, prev_p = best;
  for (const CurvePoint& p : out.curve) {
    out.auc += (p.recall - prev_r) * (p.precision + prev_p) / 2.0;
    prev_r = p.recall;
    prev_p = p.precision;
  }
  return out;
}

MatchMode parse_match_mode(const std::string& name) {
  if (name == "exact") return MatchMode::kExact;
  if (name == "lexical") return MatchMode::kLexical;
  throw Error(ErrorKind::kUnknownFormat, "unknown match mode '" + name + "'");
}

std::vector<ScoredPrediction> match_exact(std::span<const SentenceTuples> pred,
                                          std::span<const SentenceTuples> gold,
                                          const MatchOptions& opts) {
  std::size_t num_gold = 0;
  std::vector<ScoredPrediction> out;
  for (const Paired& s : pair_sentences(pred, gold, opts, num_gold)) {
    std::vector<bool> used(s.gold.size(), false);
    for (size_t pi : by_confidence(s.pred)) {
      ScoredPrediction sp;
      sp.confidence = s.pred[pi].confidence;
      for (size_t gi = 0; gi < s.gold.size(); ++gi) {
        if (!used[gi] && exact_equal(s.pred[pi], s.gold[gi])) {
          used[gi] = true;
          sp.precision_credit = sp.recall_credit = 1.0;
          break;
        }
      }
      out.push_back(sp);
    }
  }
  return out;
}

PairScore lexical_pair_score(const TextTuple& pred, const TextTuple& gold) {
  size_t pred_words = 0, gold_words = 0, overlap = 0;
  std::vector<const std::vector<std::string>*> pred_args, gold_args;
  for (const auto& [role, words] : pred.roles) {
    pred_words += words.size();
    if (role != kRelRole) pred_args.push_back(&words);
  }
  for (const auto& [role, words] : gold.roles) {
    gold_words += words.size();
    if (role != kRelRole) gold_args.push_back(&words);
  }
  auto pr = pred.roles.find(kRelRole);
  auto gr = gold.roles.find(kRelRole);
  if (pr != pred.roles.end() && gr != gold.roles.end()) overlap += multiset_overlap(pr->second, gr->second);
  for (size_t k = 0; k < std::min(pred_args.size(), gold_args.size()); ++k)
    overlap += multiset_overlap(*pred_args[k], *gold_args[k]);
  PairScore s;
  s.precision = pred_words == 0 ? 0.0 : static_cast<double>(overlap) / static_cast<double>(pred_words);
  s.recall = gold_words == 0 ? 0.0 : static_cast<double>(overlap) / static_cast<double>(gold_words);
  s.f1 = f1_score(s.precision, s.recall);
  return s;
}

std::vector<ScoredPrediction> match_lexical(std::span<const SentenceTuples> pred,
                                            std::span<const SentenceTuples> gold,
                                            const MatchOptions& opts) {
  std::size_t num_gold = 0;
  std::vector<ScoredPrediction> out;
  for (const Paired& s : pair_sentences(pred, gold, opts, num_gold)) {
    struct Cand {
      size_t rank, pi, gi;
      PairScore score;
    };
    const std::vector<size_t> order = by_confidence(s.pred);
    std::vector<Cand> cands;
    for (size_t rank = 0; rank < order.size(); ++rank) {
      for (size_t gi = 0; gi < s.gold.size(); ++gi) {
        PairScore ps = lexical_pair_score(s.pred[order[rank]], s.gold[gi]);
        if (ps.f1 > 0.0) cands.push_back(Cand{rank, order[rank], gi, ps});
      }
    }
    std::stable_sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
      if (a.score.f1 != b.score.f1) return a.score.f1 > b.score.f1;
      if (a.rank != b.rank) return a.rank < b.rank;
      return a.gi < b.gi;
    });
    std::vector<ScoredPrediction> local(s.pred.size());
    for (size_t pi = 0; pi < s.pred.size(); ++pi) local[pi].confidence = s.pred[pi].confidence;
    std::vector<bool> pred_used(s.pred.size(), false), gold_used(s.gold.size(), false);
    for (const Cand& c : cands) {
      if (pred_used[c.pi] || gold_used[c.gi]) continue;
      pred_used[c.pi] = gold_used[c.gi] = true;
      local[c.pi].precision_credit = c.score.precision;
      local[c.pi].recall_credit = c.score.recall;
    }
    out.insert(out.end(), local.begin(), local.end());
  }
  return out;
}

ScoreReport exact_match_score(std::span<const SentenceTuples> pred,
                              std::span<const SentenceTuples> gold, const MatchOptions& opts) {
  return make_report(match_exact(pred, gold, opts), count_gold(gold));
}

ScoreReport lexical_match_score(std::span<const SentenceTuples> pred,
                                std::span<const SentenceTuples> gold, const MatchOptions& opts) {
  return make_report(match_lexical(pred, gold, opts), count_gold(gold));
}

ScoreReport score(MatchMode mode, std::span<const SentenceTuples> pred,
                  std::span<const SentenceTuples> gold, const MatchOptions& opts) {
  return mode == MatchMode::kExact ? exact_match_score(pred, gold, opts)
                                   : lexical_match_score(pred, gold, opts);
}

SentenceTuples gold_tuples(const ParsedSentence& s) {
  SentenceTuples out;
  out.id = s.id;
  out.tokens = s.tokens;
  for (const Tuple& t : s.tuples) out.tuples.push_back(to_text_tuple(t, s.tokens));
  return out;
}

std::vector<SentenceTuples> gold_tuples(std::span<const ParsedSentence> corpus) {
  std::vector<SentenceTuples> out;
  for (const ParsedSentence& s : corpus) out.push_back(gold_tuples(s));
  return out;
}

std::string extraction_json_line(const ParsedSentence& s, const std::vector<Tuple>& tuples) {
  nlohmann::ordered_json j;
  j["sentence_id"] = s.id;
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const Tuple& t : tuples) {
    nlohmann::ordered_json tj;
    tj["confidence"] = t.confidence;
    tj["verb"] = t.indicator_verb;
    nlohmann::ordered_json spans = nlohmann::ordered_json::object();
    nlohmann::ordered_json texts = nlohmann::ordered_json::object();
    for (const auto& [role, span] : t.spans) {
      spans[role_name(role)] = nlohmann::ordered_json::array({span.start, span.end});
      texts[role_name(role)] = span_text(s.tokens, span);
    }
    tj["spans"] = spans;
    tj["texts"] = texts;
    arr.push_back(tj);
  }
  j["tuples"] = arr;
  return j.dump();
}

std::vector<SentenceTuples> read_tuples_jsonl(std::istream& in,
                                              std::span<const SentenceTuples> reference) {
  std::unordered_map<std::string, const SentenceTuples*> ref;
  for (const SentenceTuples& r : reference) ref.emplace(r.id, &r);

  std::vector<SentenceTuples> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(ErrorKind::kSchemaViolation, e.what(), line_no);
    }
    if (!j.is_object()) throw Error(ErrorKind::kSchemaViolation, "record is not an object", line_no);
    SentenceTuples s;
    const bool corpus_record = j.contains("tokens");
    if (corpus_record) {
      s.id = j.contains("id") ? id_string(j["id"], line_no) : std::to_string(out.size());
      std::vector<std::string> words;
      for (const json& t : j["tokens"]) {
        if (!t.is_string()) throw Error(ErrorKind::kSchemaViolation, "tokens must be strings", line_no);
        words.push_back(t.get<std::string>());
      }
      s.tokens = make_tokens(words);
    } else {
      if (!j.contains("sentence_id"))
        throw Error(ErrorKind::kSchemaViolation, "missing 'sentence_id'", line_no);
      s.id = id_string(j["sentence_id"], line_no);
      if (auto it = ref.find(s.id); it != ref.end()) s.tokens = it->second->tokens;
    }
    const json tuples = j.contains("tuples") ? j["tuples"] : json::array();
    if (!tuples.is_array()) throw Error(ErrorKind::kSchemaViolation, "'tuples' must be an array", line_no);
    for (const json& t : tuples) {
      if (!t.is_object()) throw Error(ErrorKind::kSchemaViolation, "tuple is not an object", line_no);
      TextTuple tt;
      if (t.contains("confidence")) {
        if (!t["confidence"].is_number())
          throw Error(ErrorKind::kSchemaViolation, "confidence must be a number", line_no);
        tt.confidence = t["confidence"].get<double>();
      }
      if (t.contains("texts") && !corpus_record) {
        for (const auto& [key, value] : t["texts"].items()) {
          auto role = parse_role(key);
          if (!role || !value.is_string())
            throw Error(ErrorKind::kSchemaViolation, "bad text entry '" + key + "'", line_no);
          tt.roles[*role] = fold_words(value.get<std::string>());
        }
      } else if (t.contains("spans") && t["spans"].is_object()) {
        if (s.tokens.empty())
          throw Error(ErrorKind::kSchemaViolation, "span-only tuple without sentence tokens", line_no);
        for (const auto& [key, value] : t["spans"].items()) {
          auto role = parse_role(key);
          if (!role || !value.is_array() || value.size() != 2)
            throw Error(ErrorKind::kSchemaViolation, "bad span entry '" + key + "'", line_no);
          const int a = value[0].get<int>(), b = value[1].get<int>();
          if (a < 0 || b < a || b >= static_cast<int>(s.tokens.size()))
            throw Error(ErrorKind::kSchemaViolation, "span out of range for '" + key + "'", line_no);
          auto& words = tt.roles[*role];
          for (int i = a; i <= b; ++i) words.push_back(s.tokens[static_cast<size_t>(i)].lowercased);
        }
      } else {
        throw Error(ErrorKind::kSchemaViolation, "tuple needs 'texts' or 'spans'", line_no);
      }
      s.tuples.push_back(std::move(tt));
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<SentenceTuples> load_tuples(const std::string& path,
                                        std::span<const SentenceTuples> reference) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path);
  return read_tuples_jsonl(in, reference);
}

std::string report_json(const ScoreReport& r) {
  nlohmann::ordered_json j;
  j["precision"] = r.precision;
  j["recall"] = r.recall;
  j["f1"] = r.f1;
  j["auc"] = r.auc;
  j["num_pred"] = r.num_pred;
  j["num_gold"] = r.num_gold;
  nlohmann::ordered_json curve = nlohmann::ordered_json::array();
  for (const CurvePoint& p : r.curve) curve.push_back({p.recall, p.precision});
  j["curve"] = curve;
  return j.dump();
}

}  // namespace smile
