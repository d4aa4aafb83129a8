#pragma once

// Contextual token representations from word + relation-indicator
// embeddings. The default encoder mixes a window of three embeddings; any
// token-aligned encoder of the same width can be substituted.

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "smile/corpus.hpp"
#include "smile/numerics.hpp"

namespace smile {

// Dense string ids with an UNK entry at 0. Also used for label inventories.
class Vocabulary {
 public:
  static constexpr int kUnk = 0;
  static constexpr const char* kUnkToken = "<unk>";

  Vocabulary();

  int add(const std::string& token);
  int id(const std::string& token) const;  // kUnk when absent
  bool contains(const std::string& token) const { return ids_.count(token) > 0; }
  const std::string& token(int id) const { return tokens_[static_cast<size_t>(id)]; }
  int size() const { return static_cast<int>(tokens_.size()); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  // One token per line, UNK first.
  void save(std::ostream& out) const;
  static Vocabulary load(std::istream& in);
  static Vocabulary from_tokens(const std::vector<std::string>& tokens);

  bool operator==(const Vocabulary& o) const { return tokens_ == o.tokens_; }

 private:
  std::unordered_map<std::string, int> ids_;
  std::vector<std::string> tokens_;
};

// Lowercased surface forms in first-seen order.
Vocabulary build_vocabulary(std::span<const ParsedSentence> corpus);
std::vector<int> token_ids(const Vocabulary& vocab, const ParsedSentence& s);

struct EncoderParams {
  Parameter word;        // V x d_h
  Parameter verb;        // 2 x d_h, row 1 marks the relation indicator
  Parameter mix_weight;  // 3 d_h x d_h
  Parameter mix_bias;    // 1 x d_h

  static EncoderParams init(int vocab_size, int d_h, Rng& rng);
  int width() const { return word.value.cols(); }
  std::vector<Parameter*> parameters();
};

// w_i = word[id_i] + verb[i == indicator]
Var embed(Tape& tape, const EncoderParams& p, std::span<const int> ids, int indicator);
// h_i = ReLU([w_{i-1}, w_i, w_{i+1}] * mix_weight + mix_bias), zero padded
Var encode_window(Tape& tape, const EncoderParams& p, Var w);

struct EncoderInput {
  const ParsedSentence* sentence = nullptr;
  std::span<const int> token_ids;
  int indicator = 0;
};

class ContextEncoder {
 public:
  virtual ~ContextEncoder() = default;
  virtual int width() const = 0;
  // n x width, one row per token
  virtual Var encode(Tape& tape, const EncoderInput& in) const = 0;
};

class WindowEncoder : public ContextEncoder {
 public:
  explicit WindowEncoder(const EncoderParams& params) : params_(&params) {}
  int width() const override { return params_->width(); }
  Var encode(Tape& tape, const EncoderInput& in) const override;

 private:
  const EncoderParams* params_;
};

// Replays fixed vectors keyed by (sentence id, indicator verb). File format:
// JSONL records {"sentence_id": "...", "indicator": v, "vectors": [[...], ...]}.
class PrecomputedEncoder : public ContextEncoder {
 public:
  explicit PrecomputedEncoder(int width) : width_(width) {}
  static PrecomputedEncoder load(std::istream& in);
  static PrecomputedEncoder load_file(const std::string& path);

  void insert(const std::string& sentence_id, int indicator, Tensor vectors);
  int width() const override { return width_; }
  Var encode(Tape& tape, const EncoderInput& in) const override;

 private:
  int width_;
  std::map<std::pair<std::string, int>, Tensor> table_;
};

}  // namespace smile
