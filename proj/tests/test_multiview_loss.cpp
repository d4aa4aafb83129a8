#include <gtest/gtest.h>

#include <cmath>

#include "smile/error.hpp"
#include "smile/multiview_loss.hpp"
#include "oracles.hpp"

namespace smile {
namespace {

using namespace testing;

TEST(PairwiseSoftmax, MatchesDirectComputation) {
  const Views v = random_views(5, 3, 1);
  for (int t = 0; t < 5; ++t)
    EXPECT_NEAR(std::log(pairwise_softmax_prob(v.con, t, v.dep.row(2))),
                naive_log_prob(v.con, t, v.dep, 2), 1e-12);
  EXPECT_THROW(pairwise_softmax_prob(Tensor(0, 3), 0, v.dep.row(0)), Error);
}

TEST(RelationshipLosses, MatchBruteForceOracles) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const int n = 1 + static_cast<int>(seed % 9);
    const Views v = random_views(n, 4, seed);
    for (bool skip : {true, false}) {
      Tape tape;
      Var c = tape.constant(v.con), d = tape.constant(v.dep);
      EXPECT_NEAR(loss_r1(c, d, v.adj_con, v.adj_dep, skip).value().item(), oracle_r1(v, skip), 1e-10);
      EXPECT_NEAR(loss_r3(c, d, v.adj_con, v.adj_dep, skip).value().item(), oracle_r3(v, skip), 1e-10);
    }
    Tape tape;
    EXPECT_NEAR(loss_r2(tape.constant(v.con), tape.constant(v.dep)).value().item(), oracle_r2(v),
                1e-10);
  }
}

TEST(RelationshipLosses, NonNegative) {
  for (std::uint64_t seed = 30; seed < 40; ++seed) {
    const Views v = random_views(6, 3, seed);
    Tape tape;
    Var c = tape.constant(v.con), d = tape.constant(v.dep);
    EXPECT_GE(loss_r1(c, d, v.adj_con, v.adj_dep, true).value().item(), 0.0);
    EXPECT_GE(loss_r2(c, d).value().item(), 0.0);
    EXPECT_GE(loss_r3(c, d, v.adj_con, v.adj_dep, true).value().item(), 0.0);
  }
}

TEST(RelationshipLosses, SelfLoopsOnlyGiveZeroR1) {
  Views v = random_views(4, 3, 7);
  v.adj_con = v.adj_dep = Tensor(4, 4);
  for (int i = 0; i < 4; ++i) v.adj_con(i, i) = v.adj_dep(i, i) = 1;
  Tape tape;
  EXPECT_EQ(loss_r1(tape.constant(v.con), tape.constant(v.dep), v.adj_con, v.adj_dep, true)
                .value()
                .item(),
            0.0);
}

TEST(RelationshipLosses, GradientsMatchFiniteDifferences) {
  const Views v = random_views(5, 3, 11);
  for (int which = 0; which < 3; ++which) {
    const double err = grad_check(
        [&](Tape& tape, Var x) {
          Var d = tape.constant(v.dep);
          if (which == 0) return loss_r1(x, d, v.adj_con, v.adj_dep, true);
          if (which == 1) return loss_r2(x, d);
          return loss_r3(x, d, v.adj_con, v.adj_dep, true);
        },
        v.con, 1e-6);
    EXPECT_LT(err, 1e-6) << which;
  }
}

TEST(RelationshipLosses, ShapeErrors) {
  Tape tape;
  Var a = tape.constant(Tensor(3, 2, 0.5));
  Var b = tape.constant(Tensor(3, 3, 0.5));
  EXPECT_THROW(loss_r2(a, b), Error);
  EXPECT_THROW(loss_r1(a, a, Tensor(2, 2), Tensor(3, 3), true), Error);
}

TEST(CombinedLoss, WeightedSum) {
  Tape tape;
  Var ce = tape.constant(Tensor::scalar(1.5));
  Var r1 = tape.constant(Tensor::scalar(2.0));
  Var r2 = tape.constant(Tensor::scalar(3.0));
  Var r3 = tape.constant(Tensor::scalar(5.0));
  LossWeights w;
  EXPECT_NEAR(combined_loss(ce, r1, r2, r3, w).value().item(),
              1.5 + 0.024 * 2.0 + 0.012 * 3.0 + 0.012 * 5.0, 1e-15);
  EXPECT_EQ(combined_loss(ce, Var(), r2, Var(), LossWeights{1, 2, 3}).value().item(), 7.5);
  EXPECT_THROW(combined_loss(ce, r1, r2, r3, LossWeights{-1, 0, 0}), std::invalid_argument);
}

TEST(CombinedLoss, ZeroWeightsReturnCrossEntropyItself) {
  Tape tape;
  Var ce = tape.constant(Tensor::scalar(0.123456789));
  Var r = tape.constant(Tensor::scalar(1e6));
  Var total = combined_loss(ce, r, r, r, LossWeights{0, 0, 0});
  EXPECT_EQ(total.id(), ce.id());
  EXPECT_EQ(total.value().item(), 0.123456789);
}

TEST(PairWeights, ClearsDiagonalOnlyWhenAsked) {
  const Tensor a(2, 2, {1, 1, 1, 1});
  EXPECT_EQ(pair_weights(a, true), Tensor(2, 2, {0, 1, 1, 0}));
  EXPECT_EQ(pair_weights(a, false), a);
}

}  // namespace
}  // namespace smile
