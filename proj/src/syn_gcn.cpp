#include "smile/syn_gcn.hpp"

#include <cmath>

#include "smile/error.hpp"

namespace smile {

LabelInventory build_dep_inventory(std::span<const ParsedSentence> corpus) {
  LabelInventory inv;
  inv.add("ROOT");
  for (const ParsedSentence& s : corpus)
    for (const DepRow& r : s.dep_rows.rows)
      if (r.head != kRootHead) inv.add(r.deprel);
  return inv;
}

LabelInventory build_const_inventory(std::span<const ParsedSentence> corpus) {
  LabelInventory inv;
  for (const ParsedSentence& s : corpus)
    for (const auto& path : build_const_paths(s.const_tree))
      for (const std::string& tag : path) inv.add(tag);
  return inv;
}

GcnParams GcnParams::init(const std::string& prefix, int num_labels, int d_l, int d_h, Rng& rng) {
  if (d_l <= 0 || d_h <= 0) throw Error(ErrorKind::kShapeMismatch, "GCN widths must be positive");
  GcnParams p;
  p.label_table = Parameter(prefix + ".label_table", uniform_tensor(num_labels, d_l, 0.1, rng));
  p.projection = Parameter(prefix + ".projection",
                           uniform_tensor(d_l, d_h, std::sqrt(6.0 / (d_l + d_h)), rng));
  p.bias = Parameter(prefix + ".bias", Tensor(1, d_h));
  return p;
}

std::vector<Parameter*> GcnParams::parameters() { return {&label_table, &projection, &bias}; }

Var node_label_embed_dep(Tape& tape, const GcnParams& p, const SyntacticGraph& g,
                         const LabelInventory& labels) {
  if (g.view != GraphView::kDep) throw std::invalid_argument("dependency labels need a dep graph");
  std::vector<int> ids;
  ids.reserve(static_cast<size_t>(g.n));
  for (const auto& label : g.labels) ids.push_back(labels.id(label.front()));
  return embedding_lookup(tape.param(p.label_table), ids);
}

Var node_label_embed_const(Tape& tape, const GcnParams& p, const SyntacticGraph& g,
                           const LabelInventory& labels) {
  if (g.view != GraphView::kConst) throw std::invalid_argument("constituency paths need a const graph");
  std::vector<std::vector<int>> groups;
  groups.reserve(static_cast<size_t>(g.n));
  for (int i = 0; i < g.n; ++i) {
    const auto& path = g.labels[static_cast<size_t>(i)];
    if (path.empty()) throw Error(ErrorKind::kEmptyPath, "node " + std::to_string(i));
    std::vector<int> ids;
    for (const std::string& tag : path) ids.push_back(labels.id(tag));
    groups.push_back(std::move(ids));
  }
  return mean_over_list(tape.param(p.label_table), groups);
}

Tensor adjacency_tensor(const SyntacticGraph& g) {
  Tensor a(g.n, g.n);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) a(i, j) = g.adjacent(i, j) ? 1.0 : 0.0;
  return a;
}

Var label_projection(Tape& tape, Var labels, const GcnParams& p) {
  return add(matmul(labels, tape.param(p.projection)), tape.param(p.bias));
}

GcnOutput gcn_layer(Tape& tape, const SyntacticGraph& g, Var h_ctx, Var labels, const GcnParams& p) {
  if (h_ctx.rows() != g.n || labels.rows() != g.n)
    throw Error(ErrorKind::kShapeMismatch, "graph has " + std::to_string(g.n) + " nodes, inputs have " +
                                               std::to_string(h_ctx.rows()) + " and " +
                                               std::to_string(labels.rows()) + " rows");
  Var m = concat({h_ctx, labels});
  Var attention = softmax_over_masked_set(matmul_transposed(m, m), adjacency_tensor(g));
  Var messages = add(h_ctx, label_projection(tape, labels, p));
  return GcnOutput{relu(matmul(attention, messages)), attention};
}

Var aggregate(Var h_ctx, Var h_con, Var h_dep) {
  std::vector<Var> parts{h_ctx};
  if (h_con.valid()) parts.push_back(h_con);
  if (h_dep.valid()) parts.push_back(h_dep);
  for (const Var& v : parts) {
    if (v.rows() != h_ctx.rows() || v.cols() != h_ctx.cols())
      throw Error(ErrorKind::kShapeMismatch, "aggregate needs equal-shape blocks");
  }
  return concat(parts);
}

}  // namespace smile
