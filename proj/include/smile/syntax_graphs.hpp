#pragma once

// Word-level syntactic graphs. Both views share the node set 0..n-1 (one
// node per token) and differ in node labels and typed edges.

#include <compare>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "smile/corpus.hpp"

namespace smile {

enum class GraphView { kConst, kDep };
const char* view_name(GraphView view);

enum class ConstVariant {
  kBase,  // constituency paths, rule-2 edges to the sibling's first word, pruning on
  kV1,     // node label is only the last tag of the path
  kV2,     // rule-2 edges go to the sibling's last word
  kV3,     // no distance pruning
};
const char* variant_name(ConstVariant v);
ConstVariant parse_variant(const std::string& name);  // throws UnknownFormat

struct FlattenConfig {
  int max_distance = 8;
  ConstVariant variant = ConstVariant::kBase;
  std::set<std::string> clause_tags{"S", "SBAR", "SINV", "SQ"};
  // Words under these preterminals take no part in word-phrase sibling edges.
  std::set<std::string> punct_tags{".", ",", ":", "``", "''", "-LRB-", "-RRB-", "HYPH", "NFP"};
};

// Canonical form i < j.
struct Edge {
  int i = 0;
  int j = 0;
  std::string type;

  auto operator<=>(const Edge&) const = default;
};

Edge make_edge(int a, int b, std::string type);

using EdgeSet = std::set<Edge>;

struct SyntacticGraph {
  GraphView view = GraphView::kDep;
  int n = 0;
  // dep view: one relation label per node; const view: constituency path
  std::vector<std::vector<std::string>> labels;
  std::vector<std::string> words;
  EdgeSet edges;
  // n*n row-major, symmetric, diagonal set (self-loops)
  std::vector<std::uint8_t> adjacency;

  bool adjacent(int i, int j) const {
    return adjacency[static_cast<size_t>(i) * static_cast<size_t>(n) + static_cast<size_t>(j)] != 0;
  }
};

SyntacticGraph build_dep_graph(const ParsedSentence& s);

// Internal constituent tags from the root down to each token, POS excluded.
std::vector<std::vector<std::string>> build_const_paths(const ConstituencyTree& tree);

EdgeSet flatten_const_relations(const ConstituencyTree& tree, const FlattenConfig& cfg = {});

SyntacticGraph build_const_graph(const ParsedSentence& s, const FlattenConfig& cfg = {});

enum class GraphFormat { kJson, kDot };
GraphFormat parse_graph_format(const std::string& name);  // throws UnknownFormat

std::string export_graph(const SyntacticGraph& g, GraphFormat format);
std::string export_graph(const SyntacticGraph& g, const std::string& format);

// "S-NP-NP" style rendering of a label payload.
std::string join_label(const std::vector<std::string>& label);

}  // namespace smile
