#include "smile/tagger.hpp"

#include <algorithm>
#include <cmath>

#include "smile/error.hpp"

namespace smile {

TagHead TagHead::init(int input_width, int num_tags, Rng& rng) {
  TagHead h;
  h.weight = Parameter("tagger.weight",
                       uniform_tensor(input_width, num_tags,
                                      std::sqrt(6.0 / (input_width + num_tags)), rng));
  h.bias = Parameter("tagger.bias", Tensor(1, num_tags));
  return h;
}

Var tag_logits(Tape& tape, const TagHead& head, Var h_final) {
  if (h_final.cols() != head.weight.value.rows())
    throw Error(ErrorKind::kShapeMismatch,
                "head expects width " + std::to_string(head.weight.value.rows()) + ", got " +
                    std::to_string(h_final.cols()));
  return add(matmul(h_final, tape.param(head.weight)), tape.param(head.bias));
}

Tensor softmax_rows(const Tensor& logits) {
  Tensor p(logits.rows(), logits.cols());
  for (int r = 0; r < logits.rows(); ++r) {
    auto row = logits.row(r);
    const double mx = *std::max_element(row.begin(), row.end());
    double z = 0.0;
    for (int c = 0; c < logits.cols(); ++c) {
      p(r, c) = std::exp(logits(r, c) - mx);
      z += p(r, c);
    }
    for (int c = 0; c < logits.cols(); ++c) p(r, c) /= z;
  }
  return p;
}

std::vector<int> argmax_tags(const Tensor& probs) {
  std::vector<int> tags;
  tags.reserve(static_cast<size_t>(probs.rows()));
  for (int r = 0; r < probs.rows(); ++r) {
    auto row = probs.row(r);
    tags.push_back(static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin()));
  }
  return tags;
}

std::optional<Tuple> decode_bio(std::span<const int> tags, std::span<const double> probs) {
  if (tags.size() != probs.size())
    throw Error(ErrorKind::kShapeMismatch, "tags and probabilities differ in length");
  Tuple tuple;
  double log_conf = 0.0;
  int scored = 0;
  RoleId open = -1;  // role of the span being extended, -1 after O
  bool keep_open = false;
  for (size_t i = 0; i < tags.size(); ++i) {
    const int tag = tags[i];
    if (tag == TagSet::outside()) {
      open = -1;
      continue;
    }
    log_conf += std::log(probs[i]);
    ++scored;
    const RoleId role = TagSet::role_of(tag);
    const int pos = static_cast<int>(i);
    if (TagSet::is_inside(tag) && open == role) {
      if (keep_open) tuple.spans[role].end = pos;
      continue;
    }
    // B-X, or a stray I-X treated as B-X
    open = role;
    keep_open = tuple.spans.count(role) == 0;
    if (keep_open) tuple.spans[role] = Span{pos, pos};
  }
  if (scored == 0 || !tuple.has_rel()) return std::nullopt;
  tuple.confidence = std::exp(log_conf / scored);
  return tuple;
}

std::vector<Tuple> extract(const ParsedSentence& s, const InstanceScorer& scorer) {
  std::vector<Tuple> out;
  for (int verb : s.verbs) {
    Tensor probs = scorer.tag_probabilities(s, verb);
    std::vector<int> tags = argmax_tags(probs);
    std::vector<double> best(tags.size());
    for (size_t i = 0; i < tags.size(); ++i) best[i] = probs(static_cast<int>(i), tags[i]);
    if (auto t = decode_bio(tags, best)) {
      t->indicator_verb = verb;
      out.push_back(std::move(*t));
    }
  }
  return out;
}

}  // namespace smile
