#include <gtest/gtest.h>

#include <cmath>

#include "smile/error.hpp"
#include "smile/syn_gcn.hpp"
#include "smile/synthetic.hpp"

namespace smile {
namespace {

// Straight-line oracle of one attention-weighted graph convolution.
Tensor gcn_oracle(const SyntacticGraph& g, const Tensor& h, const Tensor& l, const Tensor& W,
                  const Tensor& b, Tensor* att_out) {
  const int n = g.n, dh = h.cols(), dl = l.cols();
  Tensor att(n, n);
  for (int i = 0; i < n; ++i) {
    std::vector<double> s(static_cast<size_t>(n), 0.0);
    double mx = -1e300;
    for (int j = 0; j < n; ++j) {
      if (!g.adjacent(i, j)) continue;
      double v = 0.0;
      for (int c = 0; c < dh; ++c) v += h(i, c) * h(j, c);
      for (int c = 0; c < dl; ++c) v += l(i, c) * l(j, c);
      s[static_cast<size_t>(j)] = v;
      mx = std::max(mx, v);
    }
    double z = 0.0;
    for (int j = 0; j < n; ++j)
      if (g.adjacent(i, j)) z += std::exp(s[static_cast<size_t>(j)] - mx);
    for (int j = 0; j < n; ++j)
      att(i, j) = g.adjacent(i, j) ? std::exp(s[static_cast<size_t>(j)] - mx) / z : 0.0;
  }
  Tensor out(n, dh);
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < dh; ++c) {
      double acc = 0.0;
      for (int j = 0; j < n; ++j) {
        double msg = h(j, c) + b(0, c);
        for (int k = 0; k < dl; ++k) msg += l(j, k) * W(k, c);
        acc += att(i, j) * msg;
      }
      out(i, c) = std::max(0.0, acc);
    }
  if (att_out) *att_out = att;
  return out;
}

TEST(Inventories, DepHasRootAndConstHasTags) {
  const std::vector<ParsedSentence> corpus{running_example()};
  const LabelInventory dep = build_dep_inventory(corpus);
  EXPECT_EQ(dep.token(1), "ROOT");
  EXPECT_TRUE(dep.contains("xcomp"));
  EXPECT_FALSE(dep.contains("root"));
  const LabelInventory con = build_const_inventory(corpus);
  EXPECT_EQ(con.size(), 5);  // <unk> S NP VP PP
  EXPECT_FALSE(con.contains("NN"));
}

TEST(NodeLabels, ConstPathIsMeanOfTagEmbeddings) {
  const ParsedSentence s = running_example();
  const std::vector<ParsedSentence> corpus{s};
  const LabelInventory inv = build_const_inventory(corpus);
  Rng rng(1);
  const GcnParams p = GcnParams::init("c", inv.size(), 3, 4, rng);
  const SyntacticGraph g = build_const_graph(s);
  Tape tape;
  const Tensor l = node_label_embed_const(tape, p, g, inv).value();
  // token 0: S-NP-NP
  for (int c = 0; c < 3; ++c) {
    const double want = (p.label_table.value(inv.id("S"), c) + 2 * p.label_table.value(inv.id("NP"), c)) / 3.0;
    EXPECT_NEAR(l(0, c), want, 1e-15);
  }
  EXPECT_THROW(node_label_embed_dep(tape, p, g, inv), std::invalid_argument);
}

TEST(NodeLabels, DepRowIsRelationEmbedding) {
  const ParsedSentence s = running_example();
  const std::vector<ParsedSentence> corpus{s};
  const LabelInventory inv = build_dep_inventory(corpus);
  Rng rng(2);
  const GcnParams p = GcnParams::init("d", inv.size(), 3, 4, rng);
  Tape tape;
  const Tensor l = node_label_embed_dep(tape, p, build_dep_graph(s), inv).value();
  for (int c = 0; c < 3; ++c) {
    EXPECT_EQ(l(3, c), p.label_table.value(inv.id("ROOT"), c));
    EXPECT_EQ(l(4, c), p.label_table.value(inv.id("xcomp"), c));
  }
}

TEST(GcnLayer, MatchesStraightLineOracle) {
  for (const ParsedSentence& s : synthetic_corpus(12, 21)) {
    for (GraphView view : {GraphView::kConst, GraphView::kDep}) {
      const SyntacticGraph g = view == GraphView::kConst ? build_const_graph(s) : build_dep_graph(s);
      Rng rng(s.size() * 31u + static_cast<unsigned>(view));
      GcnParams p = GcnParams::init("x", 4, 3, 5, rng);
      p.bias.value = uniform_tensor(1, 5, 0.2, rng);
      const Tensor h = uniform_tensor(g.n, 5, 1.0, rng);
      const Tensor l = uniform_tensor(g.n, 3, 1.0, rng);
      Tape tape;
      const GcnOutput out = gcn_layer(tape, g, tape.constant(h), tape.constant(l), p);
      Tensor att;
      const Tensor want = gcn_oracle(g, h, l, p.projection.value, p.bias.value, &att);
      for (size_t k = 0; k < want.size(); ++k) EXPECT_NEAR(out.hidden.value()[k], want[k], 1e-12);
      for (size_t k = 0; k < att.size(); ++k) EXPECT_NEAR(out.attention.value()[k], att[k], 1e-12);
    }
  }
}

TEST(GcnLayer, AttentionRowsAreDistributionsOverNeighbours) {
  const ParsedSentence s = running_example();
  const SyntacticGraph g = build_const_graph(s);
  Rng rng(3);
  const GcnParams p = GcnParams::init("x", 4, 3, 6, rng);
  Tape tape;
  const GcnOutput out = gcn_layer(tape, g, tape.constant(uniform_tensor(g.n, 6, 2.0, rng)),
                                  tape.constant(uniform_tensor(g.n, 3, 2.0, rng)), p);
  const Tensor& a = out.attention.value();
  for (int i = 0; i < g.n; ++i) {
    double sum = 0.0;
    for (int j = 0; j < g.n; ++j) {
      if (!g.adjacent(i, j)) EXPECT_EQ(a(i, j), 0.0);
      sum += a(i, j);
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
  // "." (token 10) has no const edges, so it attends only to itself
  EXPECT_EQ(a(10, 10), 1.0);
}

TEST(GcnLayer, GradientsMatchFiniteDifferences) {
  const ParsedSentence s = running_example();
  const std::vector<ParsedSentence> corpus{s};
  const LabelInventory inv = build_dep_inventory(corpus);
  const SyntacticGraph g = build_dep_graph(s);
  Rng rng(4);
  GcnParams p = GcnParams::init("d", inv.size(), 3, 4, rng);
  p.bias.value = uniform_tensor(1, 4, 0.5, rng);
  const Tensor h = uniform_tensor(g.n, 4, 1.0, rng);
  const Tensor w = uniform_tensor(g.n, 4, 1.0, rng);
  std::vector<Parameter*> params = p.parameters();
  const double err = grad_check(
      [&](Tape& tape) {
        Var l = node_label_embed_dep(tape, p, g, inv);
        return weighted_sum(gcn_layer(tape, g, tape.constant(h), l, p).hidden, w);
      },
      params, 1e-6);
  EXPECT_LT(err, 1e-6);
}

TEST(GcnLayer, ShapeChecks) {
  const SyntacticGraph g = build_dep_graph(running_example());
  Rng rng(5);
  const GcnParams p = GcnParams::init("x", 4, 3, 4, rng);
  Tape tape;
  EXPECT_THROW(gcn_layer(tape, g, tape.constant(Tensor(3, 4)), tape.constant(Tensor(11, 3)), p),
               Error);
}

TEST(Aggregate, SkipsDisabledViews) {
  Tape tape;
  Var a = tape.constant(Tensor(2, 3, 1.0));
  Var b = tape.constant(Tensor(2, 3, 2.0));
  EXPECT_EQ(aggregate(a, b, b).cols(), 9);
  EXPECT_EQ(aggregate(a, Var(), b).cols(), 6);
  const Tensor only = aggregate(a, Var(), Var()).value();
  EXPECT_EQ(only, Tensor(2, 3, 1.0));
  EXPECT_THROW(aggregate(a, tape.constant(Tensor(2, 2)), Var()), Error);
}

}  // namespace
}  // namespace smile
