#include "smile/synthetic.hpp"

#include <array>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "smile/numerics.hpp"

namespace smile {

namespace {

constexpr std::array kNames{"Mary", "John", "Anna", "Peter", "Lucy", "Tom"};
constexpr std::array kNouns{"dog", "cat", "bird", "fox", "boy", "girl", "man", "teacher"};
constexpr std::array kAdjs{"big", "small", "old", "young", "happy"};
constexpr std::array kTransitive{"chased", "saw", "helped", "found", "watched", "visited"};
constexpr std::array kDitransitive{"gave", "sent", "showed"};
constexpr std::array kThings{"book", "gift", "letter", "ball"};
constexpr std::array kIntransitive{"slept", "waited", "danced"};
constexpr std::array kPlaces{"park", "garden", "house", "kitchen", "school"};
constexpr std::array kPreps{"in", "near"};
constexpr std::array kCatenative{"likes", "enjoys", "hates"};
constexpr std::array kGerunds{"playing", "watching", "reading"};
constexpr std::array kPlurals{"games", "movies", "stories"};

template <size_t N>
std::string pick(const std::array<const char*, N>& words, Rng& rng) {
  return words[rng.below(N)];
}

struct Phrase {
  std::string tree;
  int first = 0;
  int last = 0;
  int head = 0;
};

class Builder {
 public:
  int add(const std::string& word, const std::string& pos) {
    words_.push_back(word);
    pos_.push_back(pos);
    deps_.push_back(DepRow{kRootHead, "dep"});
    return static_cast<int>(words_.size()) - 1;
  }
  void attach(int dependent, int head, const std::string& rel) {
    deps_[static_cast<size_t>(dependent)] = DepRow{head, rel};
  }
  std::string leaf(int i) const {
    return "(" + pos_[static_cast<size_t>(i)] + " " + words_[static_cast<size_t>(i)] + ")";
  }

  // NNP | DT NN | DT JJ NN, chosen by `shape` (0, 1, 2).
  Phrase noun_phrase(int shape, Rng& rng, bool people = true) {
    Phrase p;
    if (shape == 0) {
      p.first = p.last = p.head = add(pick(kNames, rng), "NNP");
      p.tree = "(NP " + leaf(p.head) + ")";
      return p;
    }
    const int det = add(rng.below(2) == 0 ? "the" : "a", "DT");
    int adj = -1;
    if (shape == 2) adj = add(pick(kAdjs, rng), "JJ");
    const int noun = add(people ? pick(kNouns, rng) : pick(kThings, rng), "NN");
    attach(det, noun, "det");
    if (adj >= 0) attach(adj, noun, "amod");
    p.first = det;
    p.last = p.head = noun;
    p.tree = "(NP " + leaf(det) + (adj >= 0 ? " " + leaf(adj) : "") + " " + leaf(noun) + ")";
    return p;
  }

  Phrase place_phrase(Rng& rng) {
    Phrase p;
    const int prep = add(pick(kPreps, rng), "IN");
    const int det = add("the", "DT");
    const int noun = add(pick(kPlaces, rng), "NN");
    attach(prep, noun, "case");
    attach(det, noun, "det");
    p.first = prep;
    p.last = p.head = noun;
    p.tree = "(PP " + leaf(prep) + " (NP " + leaf(det) + " " + leaf(noun) + "))";
    return p;
  }

  ParsedSentence finish(const std::string& id, const std::string& tree, std::vector<int> verbs,
                        std::vector<Tuple> tuples) const {
    ParsedSentence s;
    s.id = id;
    s.tokens = make_tokens(words_);
    s.const_tree = read_bracketed_tree(tree, s.tokens);
    s.dep_rows.rows = deps_;
    s.verbs = std::move(verbs);
    s.tuples = std::move(tuples);
    validate_sentence(s, TagSet());
    return s;
  }

 private:
  std::vector<std::string> words_;
  std::vector<std::string> pos_;
  std::vector<DepRow> deps_;
};

Span span_of(const Phrase& p) { return Span{p.first, p.last}; }

Tuple make_tuple(int verb, Span rel, std::initializer_list<Span> args) {
  Tuple t;
  t.indicator_verb = verb;
  t.spans[kRelRole] = rel;
  int k = 0;
  for (const Span& a : args) t.spans[arg_role(k++)] = a;
  return t;
}

}  // namespace

ParsedSentence synthetic_sentence(SyntheticTemplate kind, std::uint64_t seed, const std::string& id) {
  Rng rng(seed);
  Builder b;
  switch (kind) {
    case SyntheticTemplate::kTransitive:
    case SyntheticTemplate::kLocative: {
      Phrase subj = b.noun_phrase(static_cast<int>(rng.below(3)), rng);
      const int verb = b.add(pick(kTransitive, rng), "VBD");
      Phrase obj = b.noun_phrase(static_cast<int>(rng.below(3)), rng);
      b.attach(subj.head, verb, "nsubj");
      b.attach(obj.head, verb, "obj");
      std::string vp = "(VP " + b.leaf(verb) + " " + obj.tree;
      Tuple t = make_tuple(verb, Span{verb, verb}, {span_of(subj), span_of(obj)});
      if (kind == SyntheticTemplate::kLocative) {
        Phrase pp = b.place_phrase(rng);
        b.attach(pp.head, verb, "obl");
        vp += " " + pp.tree;
        t.spans[arg_role(2)] = span_of(pp);
      }
      const int stop = b.add(".", ".");
      b.attach(stop, verb, "punct");
      return b.finish(id, "(S " + subj.tree + " " + vp + ") " + b.leaf(stop) + ")", {verb}, {t});
    }
    case SyntheticTemplate::kDitransitive: {
      Phrase subj = b.noun_phrase(static_cast<int>(rng.below(3)), rng);
      const int verb = b.add(pick(kDitransitive, rng), "VBD");
      Phrase recipient = b.noun_phrase(0, rng);
      Phrase thing = b.noun_phrase(1 + static_cast<int>(rng.below(2)), rng, false);
      const int stop = b.add(".", ".");
      b.attach(subj.head, verb, "nsubj");
      b.attach(recipient.head, verb, "iobj");
      b.attach(thing.head, verb, "obj");
      b.attach(stop, verb, "punct");
      const std::string tree = "(S " + subj.tree + " (VP " + b.leaf(verb) + " " + recipient.tree +
                               " " + thing.tree + ") " + b.leaf(stop) + ")";
      return b.finish(id, tree, {verb},
                      {make_tuple(verb, Span{verb, verb},
                                  {span_of(subj), span_of(recipient), span_of(thing)})});
    }
    case SyntheticTemplate::kIntransitive: {
      Phrase subj = b.noun_phrase(static_cast<int>(rng.below(3)), rng);
      const int verb = b.add(pick(kIntransitive, rng), "VBD");
      Phrase pp = b.place_phrase(rng);
      const int stop = b.add(".", ".");
      b.attach(subj.head, verb, "nsubj");
      b.attach(pp.head, verb, "obl");
      b.attach(stop, verb, "punct");
      const std::string tree =
          "(S " + subj.tree + " (VP " + b.leaf(verb) + " " + pp.tree + ") " + b.leaf(stop) + ")";
      return b.finish(id, tree, {verb},
                      {make_tuple(verb, Span{verb, verb}, {span_of(subj), span_of(pp)})});
    }
    case SyntheticTemplate::kCoordinated: {
      // names or DT NN only
      auto clause = [&](Phrase& subj, int& verb, Phrase& obj) {
        subj = b.noun_phrase(static_cast<int>(rng.below(2)), rng);
        verb = b.add(pick(kTransitive, rng), "VBD");
        obj = b.noun_phrase(static_cast<int>(rng.below(2)), rng);
        b.attach(subj.head, verb, "nsubj");
        b.attach(obj.head, verb, "obj");
        return "(S " + subj.tree + " (VP " + b.leaf(verb) + " " + obj.tree + "))";
      };
      Phrase s1, o1, s2, o2;
      int v1 = 0, v2 = 0;
      const std::string left = clause(s1, v1, o1);
      const int cc = b.add("and", "CC");
      const std::string right = clause(s2, v2, o2);
      const int stop = b.add(".", ".");
      b.attach(v2, v1, "conj");
      b.attach(cc, v2, "cc");
      b.attach(stop, v1, "punct");
      const std::string tree =
          "(S " + left + " " + b.leaf(cc) + " " + right + " " + b.leaf(stop) + ")";
      return b.finish(id, tree, {v1, v2},
                      {make_tuple(v1, Span{v1, v1}, {span_of(s1), span_of(o1)}),
                       make_tuple(v2, Span{v2, v2}, {span_of(s2), span_of(o2)})});
    }
    case SyntheticTemplate::kCatenative: {
      Phrase subj = b.noun_phrase(0, rng);
      const int verb = b.add(pick(kCatenative, rng), "VBZ");
      const int gerund = b.add(pick(kGerunds, rng), "VBG");
      const int obj = b.add(pick(kPlurals, rng), "NNS");
      const int stop = b.add(".", ".");
      b.attach(subj.head, verb, "nsubj");
      b.attach(gerund, verb, "xcomp");
      b.attach(obj, gerund, "obj");
      b.attach(stop, verb, "punct");
      const std::string tree = "(S " + subj.tree + " (VP " + b.leaf(verb) + " (S (VP " +
                               b.leaf(gerund) + " (NP " + b.leaf(obj) + ")))) " + b.leaf(stop) +
                               ")";
      return b.finish(id, tree, {verb, gerund},
                      {make_tuple(verb, Span{verb, gerund}, {span_of(subj), Span{obj, obj}})});
    }
  }
  throw std::invalid_argument("unknown synthetic template");
}

std::vector<ParsedSentence> synthetic_corpus(int n, std::uint64_t seed) {
  std::vector<ParsedSentence> out;
  Rng rng(seed);
  for (int k = 0; k < n; ++k) {
    char id[32];
    std::snprintf(id, sizeof id, "synth-%03d", k);
    out.push_back(synthetic_sentence(static_cast<SyntheticTemplate>(k % kNumSyntheticTemplates),
                                     rng.next(), id));
  }
  return out;
}

ParsedSentence running_example() {
  ParsedSentence s;
  s.id = "running-example";
  s.tokens = make_tokens({"Mary", "'s", "cat", "likes", "playing", "plush", "toys", "in", "the",
                          "room", "."});
  s.const_tree = read_bracketed_tree(
      "(S (NP (NP (NNP Mary) (POS 's)) (NN cat)) (VP (VBZ likes) (S (VP (VBG playing) "
      "(NP (JJ plush) (NNS toys)) (PP (IN in) (NP (DT the) (NN room)))))) (. .))",
      s.tokens);
  s.dep_rows.rows = {{2, "nmod:poss"}, {0, "case"},   {3, "nsubj"}, {kRootHead, "root"},
                     {3, "xcomp"},     {6, "amod"},   {4, "obj"},   {9, "case"},
                     {9, "det"},       {4, "obl"},    {3, "punct"}};
  s.verbs = {3, 4};
  Tuple t;
  t.indicator_verb = 3;
  t.spans[arg_role(0)] = Span{0, 2};
  t.spans[kRelRole] = Span{3, 4};
  t.spans[arg_role(1)] = Span{5, 6};
  t.spans[arg_role(2)] = Span{7, 9};
  s.tuples = {t};
  validate_sentence(s, TagSet());
  return s;
}

}  // namespace smile
