#include "smile/encoder.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "json.hpp"
#include "smile/error.hpp"

namespace smile {

Vocabulary::Vocabulary() { add(kUnkToken); }

int Vocabulary::add(const std::string& token) {
  auto it = ids_.find(token);
  if (it != ids_.end()) return it->second;
  const int id = size();
  ids_.emplace(token, id);
  tokens_.push_back(token);
  return id;
}

int Vocabulary::id(const std::string& token) const {
  auto it = ids_.find(token);
  return it == ids_.end() ? kUnk : it->second;
}

void Vocabulary::save(std::ostream& out) const {
  for (const std::string& t : tokens_) out << t << '\n';
}

Vocabulary Vocabulary::load(std::istream& in) {
  Vocabulary v;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first && line != kUnkToken)
      throw Error(ErrorKind::kSchemaViolation, "vocabulary must start with " + std::string(kUnkToken));
    first = false;
    v.add(line);
  }
  return v;
}

Vocabulary Vocabulary::from_tokens(const std::vector<std::string>& tokens) {
  if (tokens.empty() || tokens[0] != kUnkToken)
    throw Error(ErrorKind::kSchemaViolation, "inventory must start with " + std::string(kUnkToken));
  Vocabulary v;
  for (const std::string& t : tokens) v.add(t);
  if (v.size() != static_cast<int>(tokens.size()))
    throw Error(ErrorKind::kSchemaViolation, "duplicate inventory entries");
  return v;
}

Vocabulary build_vocabulary(std::span<const ParsedSentence> corpus) {
  Vocabulary v;
  for (const ParsedSentence& s : corpus)
    for (const Token& t : s.tokens) v.add(t.lowercased);
  return v;
}

std::vector<int> token_ids(const Vocabulary& vocab, const ParsedSentence& s) {
  std::vector<int> ids;
  ids.reserve(s.tokens.size());
  for (const Token& t : s.tokens) ids.push_back(vocab.id(t.lowercased));
  return ids;
}

EncoderParams EncoderParams::init(int vocab_size, int d_h, Rng& rng) {
  if (d_h <= 0) throw Error(ErrorKind::kShapeMismatch, "d_h must be positive");
  EncoderParams p;
  p.word = Parameter("encoder.word", uniform_tensor(vocab_size, d_h, 0.1, rng));
  p.verb = Parameter("encoder.verb", uniform_tensor(2, d_h, 0.1, rng));
  const double bound = std::sqrt(6.0 / (3.0 * d_h + d_h));
  p.mix_weight = Parameter("encoder.mix_weight", uniform_tensor(3 * d_h, d_h, bound, rng));
  p.mix_bias = Parameter("encoder.mix_bias", Tensor(1, d_h));
  return p;
}

std::vector<Parameter*> EncoderParams::parameters() {
  return {&word, &verb, &mix_weight, &mix_bias};
}

Var embed(Tape& tape, const EncoderParams& p, std::span<const int> ids, int indicator) {
  const int n = static_cast<int>(ids.size());
  if (indicator < 0 || indicator >= n)
    throw Error(ErrorKind::kShapeMismatch, "indicator " + std::to_string(indicator) +
                                               " outside sentence of " + std::to_string(n));
  std::vector<int> flags(ids.size(), 0);
  flags[static_cast<size_t>(indicator)] = 1;
  Var words = embedding_lookup(tape.param(p.word), ids);
  Var verbs = embedding_lookup(tape.param(p.verb), flags);
  return add(words, verbs);
}

Var encode_window(Tape& tape, const EncoderParams& p, Var w) {
  if (w.rows() == 0) throw Error(ErrorKind::kShapeMismatch, "empty sequence");
  Var window = concat({shift_rows(w, 1), w, shift_rows(w, -1)});
  return relu(add(matmul(window, tape.param(p.mix_weight)), tape.param(p.mix_bias)));
}

Var WindowEncoder::encode(Tape& tape, const EncoderInput& in) const {
  return encode_window(tape, *params_, embed(tape, *params_, in.token_ids, in.indicator));
}

void PrecomputedEncoder::insert(const std::string& sentence_id, int indicator, Tensor vectors) {
  if (vectors.cols() != width_)
    throw Error(ErrorKind::kShapeMismatch, "vectors of width " + std::to_string(vectors.cols()) +
                                               ", expected " + std::to_string(width_));
  table_[{sentence_id, indicator}] = std::move(vectors);
}

PrecomputedEncoder PrecomputedEncoder::load(std::istream& in) {
  std::string line;
  int line_no = 0;
  int width = -1;
  std::vector<std::tuple<std::string, int, Tensor>> records;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
      std::string sid = j.at("sentence_id").is_string()
                            ? j.at("sentence_id").get<std::string>()
                            : std::to_string(j.at("sentence_id").get<long long>());
      int indicator = j.at("indicator").get<int>();
      const auto& rows = j.at("vectors");
      const int n = static_cast<int>(rows.size());
      const int d = n > 0 ? static_cast<int>(rows[0].size()) : 0;
      Tensor t(n, d);
      for (int r = 0; r < n; ++r) {
        if (static_cast<int>(rows[static_cast<size_t>(r)].size()) != d)
          throw Error(ErrorKind::kShapeMismatch, "ragged vectors", line_no);
        for (int c = 0; c < d; ++c) t(r, c) = rows[static_cast<size_t>(r)][static_cast<size_t>(c)].get<double>();
      }
      if (width < 0) width = d;
      if (d != width) throw Error(ErrorKind::kShapeMismatch, "inconsistent vector width", line_no);
      records.emplace_back(std::move(sid), indicator, std::move(t));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::kSchemaViolation, e.what(), line_no);
    }
  }
  PrecomputedEncoder enc(width < 0 ? 0 : width);
  for (auto& [sid, ind, t] : records) enc.insert(sid, ind, std::move(t));
  return enc;
}

PrecomputedEncoder PrecomputedEncoder::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path);
  return load(in);
}

Var PrecomputedEncoder::encode(Tape& tape, const EncoderInput& in) const {
  const std::string sid = in.sentence ? in.sentence->id : std::string();
  auto it = table_.find({sid, in.indicator});
  if (it == table_.end())
    throw Error(ErrorKind::kAlignmentError,
                "no precomputed vectors for sentence " + sid + " verb " + std::to_string(in.indicator));
  if (it->second.rows() != static_cast<int>(in.token_ids.size()))
    throw Error(ErrorKind::kAlignmentError, "precomputed vectors for sentence " + sid +
                                                " have the wrong length");
  return tape.constant(it->second);
}

}  // namespace smile
