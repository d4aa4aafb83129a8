#pragma once

// Linear tagging head, BIO decoding and per-sentence tuple extraction.

#include <optional>
#include <span>
#include <vector>

#include "smile/bio.hpp"
#include "smile/corpus.hpp"
#include "smile/numerics.hpp"

namespace smile {

struct TagHead {
  Parameter weight;  // input width x tag count
  Parameter bias;    // 1 x tag count

  static TagHead init(int input_width, int num_tags, Rng& rng);
  std::vector<Parameter*> parameters() { return {&weight, &bias}; }
};

// Per-token logits: h_final * weight + bias.
Var tag_logits(Tape& tape, const TagHead& head, Var h_final);

// Row-wise softmax of a logits tensor (no tape).
Tensor softmax_rows(const Tensor& logits);

// Argmax tags from per-token probabilities; first maximum wins ties.
std::vector<int> argmax_tags(const Tensor& probs);

// Turns argmax tags into a tuple. B-X (I-X)* runs become spans, a stray I-X
// opens a new span, only the first span of each role is kept. Returns
// nullopt for all-O sequences and sequences without REL. Confidence is the
// geometric mean of `probs` over non-O tokens.
std::optional<Tuple> decode_bio(std::span<const int> tags, std::span<const double> probs);

// Anything that can score one (sentence, indicator verb) instance.
class InstanceScorer {
 public:
  virtual ~InstanceScorer() = default;
  // n x tag count, rows sum to 1
  virtual Tensor tag_probabilities(const ParsedSentence& s, int indicator_verb) const = 0;
};

// One instance per verb, at most one tuple per verb.
std::vector<Tuple> extract(const ParsedSentence& s, const InstanceScorer& scorer);

}  // namespace smile
