#include <gtest/gtest.h>

#include <cmath>

#include "smile/error.hpp"
#include "smile/synthetic.hpp"
#include "smile/tagger.hpp"

namespace smile {
namespace {

const int O = 0;
const int B_REL = TagSet::begin_tag(kRelRole), I_REL = TagSet::inside_tag(kRelRole);
const int B_A0 = TagSet::begin_tag(arg_role(0)), I_A0 = TagSet::inside_tag(arg_role(0));
const int B_A1 = TagSet::begin_tag(arg_role(1)), I_A1 = TagSet::inside_tag(arg_role(1));

std::optional<Tuple> decode(const std::vector<int>& tags) {
  return decode_bio(tags, std::vector<double>(tags.size(), 0.5));
}

TEST(DecodeBio, SimpleTuple) {
  auto t = decode({B_A0, I_A0, B_REL, B_A1, I_A1, O});
  ASSERT_TRUE(t);
  EXPECT_EQ(t->spans.at(arg_role(0)), (Span{0, 1}));
  EXPECT_EQ(t->spans.at(kRelRole), (Span{2, 2}));
  EXPECT_EQ(t->spans.at(arg_role(1)), (Span{3, 4}));
  EXPECT_NEAR(t->confidence, 0.5, 1e-15);
}

TEST(DecodeBio, NoRelOrAllOutsideGivesNothing) {
  EXPECT_FALSE(decode({O, O, O}));
  EXPECT_FALSE(decode({B_A0, I_A0, O}));
  EXPECT_FALSE(decode({}));
}

TEST(DecodeBio, StrayInsideOpensSpan) {
  auto t = decode({I_A0, O, I_REL, I_REL});
  ASSERT_TRUE(t);
  EXPECT_EQ(t->spans.at(arg_role(0)), (Span{0, 0}));
  EXPECT_EQ(t->spans.at(kRelRole), (Span{2, 3}));
}

TEST(DecodeBio, OnlyFirstSpanOfRoleKept) {
  auto t = decode({B_A0, B_REL, B_A0, I_A0, B_A1});
  ASSERT_TRUE(t);
  EXPECT_EQ(t->spans.at(arg_role(0)), (Span{0, 0}));
  EXPECT_EQ(t->spans.at(arg_role(1)), (Span{4, 4}));
  // a B of the same role right after ends the span
  auto u = decode({B_REL, B_REL, I_REL});
  EXPECT_EQ(u->spans.at(kRelRole), (Span{0, 0}));
}

TEST(DecodeBio, ConfidenceIsGeometricMeanOverNonOutside) {
  const std::vector<int> tags{B_REL, O, B_A1};
  const std::vector<double> probs{0.9, 0.1, 0.4};
  auto t = decode_bio(tags, probs);
  ASSERT_TRUE(t);
  EXPECT_NEAR(t->confidence, std::sqrt(0.9 * 0.4), 1e-15);
  EXPECT_THROW(decode_bio(tags, std::vector<double>{0.1}), Error);
}

TEST(DecodeBio, InvertsEncodeOnSyntheticGold) {
  for (const ParsedSentence& s : synthetic_corpus(30, 2))
    for (const Tuple& gold : s.tuples) {
      const auto tags = encode_bio(gold, s.size());
      auto t = decode(tags);
      ASSERT_TRUE(t);
      EXPECT_EQ(t->spans, gold.spans);
    }
}

TEST(SoftmaxRows, RowsSumToOneAndArgmaxPicksFirstMax) {
  const Tensor p = softmax_rows(Tensor(2, 3, {1, 1, 0, -500, 0, 500}));
  EXPECT_NEAR(p(0, 0) + p(0, 1) + p(0, 2), 1.0, 1e-15);
  EXPECT_EQ(argmax_tags(p), (std::vector<int>{0, 2}));
}

// Puts 0.8 on the gold tag of the instance.
class GoldScorer : public InstanceScorer {
 public:
  Tensor tag_probabilities(const ParsedSentence& s, int verb) const override {
    TagSet tags;
    const Tuple* t = s.tuple_for(verb);
    const auto gold = encode_bio(t ? std::optional<Tuple>(*t) : std::nullopt, s.size());
    Tensor p(s.size(), tags.size(), 0.2 / (tags.size() - 1));
    for (int i = 0; i < s.size(); ++i) p(i, gold[static_cast<size_t>(i)]) = 0.8;
    return p;
  }
};

TEST(Extract, OneTuplePerVerbWithRel) {
  const ParsedSentence s = running_example();
  const auto tuples = extract(s, GoldScorer());
  ASSERT_EQ(tuples.size(), 1u);  // "playing" has no tuple
  EXPECT_EQ(tuples[0].indicator_verb, 3);
  EXPECT_EQ(tuples[0].spans, s.tuples[0].spans);
  EXPECT_NEAR(tuples[0].confidence, 0.8, 1e-12);
}

TEST(TagLogits, ShapeCheck) {
  Rng rng(1);
  const TagHead head = TagHead::init(4, 15, rng);
  Tape tape;
  EXPECT_EQ(tag_logits(tape, head, tape.constant(Tensor(3, 4))).value().shape(),
            (std::vector<int>{3, 15}));
  EXPECT_THROW(tag_logits(tape, head, tape.constant(Tensor(3, 5))), Error);
}

}  // namespace
}  // namespace smile
