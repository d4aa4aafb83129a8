#pragma once

// Template-generated sentences with consistent constituency trees,
// dependency rows, verb lists and gold tuples. Used for overfit checks and
// the ablation harness.

#include <cstdint>
#include <vector>

#include "smile/corpus.hpp"

namespace smile {

enum class SyntheticTemplate {
  kTransitive,    // NP V NP .
  kLocative,      // NP V NP PP .
  kDitransitive,  // NP V NNP NP .
  kIntransitive,  // NP V PP .
  kCoordinated,   // NP V NP and NP V NP .  (two tuples)
  kCatenative,    // NNP V V-ing NNS .      (two verbs, one tuple)
};
inline constexpr int kNumSyntheticTemplates = 6;

ParsedSentence synthetic_sentence(SyntheticTemplate t, std::uint64_t seed, const std::string& id);

// Sentence k uses template k mod 6; ids are "synth-000", "synth-001", ...
std::vector<ParsedSentence> synthetic_corpus(int n, std::uint64_t seed);

// "Mary 's cat likes playing plush toys in the room ." with its
// constituency and dependency parses, verbs {likes, playing} and one tuple
// aligned to "likes".
ParsedSentence running_example();

}  // namespace smile
