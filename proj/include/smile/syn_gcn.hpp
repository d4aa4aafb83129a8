#pragma once

// Dep-GCN and Const-GCN: label embeddings per node, one attention-weighted
// graph convolution per view, and the final per-token concatenation.

#include <span>

#include "smile/encoder.hpp"
#include "smile/numerics.hpp"
#include "smile/syntax_graphs.hpp"

namespace smile {

// Dependency relations or constituent tags, UNK at 0.
using LabelInventory = Vocabulary;

// Dependency labels (ROOT included) and constituent tags seen in `corpus`.
LabelInventory build_dep_inventory(std::span<const ParsedSentence> corpus);
LabelInventory build_const_inventory(std::span<const ParsedSentence> corpus);

struct GcnParams {
  Parameter label_table;  // N x d_l
  Parameter projection;   // d_l x d_h
  Parameter bias;         // 1 x d_h

  static GcnParams init(const std::string& prefix, int num_labels, int d_l, int d_h, Rng& rng);
  int label_width() const { return label_table.value.cols(); }
  int width() const { return projection.value.cols(); }
  std::vector<Parameter*> parameters();
};

// Row i is the embedding of node i's dependency relation.
Var node_label_embed_dep(Tape& tape, const GcnParams& p, const SyntacticGraph& g,
                         const LabelInventory& labels);
// Row i is the mean embedding of the tags on node i's constituency path.
// Throws EmptyPath.
Var node_label_embed_const(Tape& tape, const GcnParams& p, const SyntacticGraph& g,
                           const LabelInventory& labels);

// Adjacency of g as a 0/1 tensor.
Tensor adjacency_tensor(const SyntacticGraph& g);

struct GcnOutput {
  Var hidden;     // n x d_h
  Var attention;  // n x n, row-stochastic over neighbours
};

// m_i = [h_i, l_i];  a_ij = masked softmax_j(m_i . m_j);
// h'_i = ReLU(sum_j a_ij (h_j + l_j W + b))
GcnOutput gcn_layer(Tape& tape, const SyntacticGraph& g, Var h_ctx, Var labels, const GcnParams& p);

// Label projection without message passing: l_i W + b.
Var label_projection(Tape& tape, Var labels, const GcnParams& p);

// Per-token [ctx, con, dep]; invalid Vars are skipped (disabled views).
Var aggregate(Var h_ctx, Var h_con, Var h_dep);

}  // namespace smile
