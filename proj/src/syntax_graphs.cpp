#include "smile/syntax_graphs.hpp"

#include <algorithm>
#include <sstream>

#include "json.hpp"
#include "smile/error.hpp"

namespace smile {

namespace {

// "NP-SBJ" -> "NP", "-LRB-" stays as is.
std::string base_category(const std::string& tag) {
  if (tag.empty() || tag[0] == '-') return tag;
  size_t cut = tag.find_first_of("-=");
  return cut == std::string::npos ? tag : tag.substr(0, cut);
}

void add_self_loops_and_edges(SyntacticGraph& g) {
  const size_t n = static_cast<size_t>(g.n);
  g.adjacency.assign(n * n, 0);
  for (size_t i = 0; i < n; ++i) g.adjacency[i * n + i] = 1;
  for (const Edge& e : g.edges) {
    g.adjacency[static_cast<size_t>(e.i) * n + static_cast<size_t>(e.j)] = 1;
    g.adjacency[static_cast<size_t>(e.j) * n + static_cast<size_t>(e.i)] = 1;
  }
}

std::vector<std::string> surfaces(const ParsedSentence& s) {
  std::vector<std::string> w;
  for (const Token& t : s.tokens) w.push_back(t.surface);
  return w;
}

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

const char* view_name(GraphView view) { return view == GraphView::kConst ? "const" : "dep"; }

const char* variant_name(ConstVariant v) {
  switch (v) {
    case ConstVariant::kBase: return "base";
    case ConstVariant::kV1: return "v1";
    case ConstVariant::kV2: return "v2";
    case ConstVariant::kV3: return "v3";
  }
  return "?";
}

ConstVariant parse_variant(const std::string& name) {
  if (name == "base") return ConstVariant::kBase;
  if (name == "v1") return ConstVariant::kV1;
  if (name == "v2") return ConstVariant::kV2;
  if (name == "v3") return ConstVariant::kV3;
  throw Error(ErrorKind::kUnknownFormat, "unknown const-graph variant '" + name + "'");
}

Edge make_edge(int a, int b, std::string type) {
  return a < b ? Edge{a, b, std::move(type)} : Edge{b, a, std::move(type)};
}

SyntacticGraph build_dep_graph(const ParsedSentence& s) {
  SyntacticGraph g;
  g.view = GraphView::kDep;
  g.n = s.size();
  g.words = surfaces(s);
  for (int i = 0; i < g.n; ++i) {
    const DepRow& row = s.dep_rows.rows[static_cast<size_t>(i)];
    if (row.head == kRootHead) {
      g.labels.push_back({"ROOT"});
    } else {
      g.labels.push_back({row.deprel});
      g.edges.insert(make_edge(row.head, i, row.deprel));
    }
  }
  add_self_loops_and_edges(g);
  return g;
}

std::vector<std::vector<std::string>> build_const_paths(const ConstituencyTree& tree) {
  std::vector<std::vector<std::string>> paths(static_cast<size_t>(tree.num_tokens()));
  for (const ConstNode& node : tree.nodes) {
    if (!node.is_preterminal()) continue;
    std::vector<std::string> path;
    for (int up = node.parent; up >= 0; up = tree.node(up).parent) path.push_back(tree.node(up).tag);
    std::reverse(path.begin(), path.end());
    // A bare preterminal root, e.g. (NN x), has no phrase above it.
    if (path.empty()) path.push_back(node.tag);
    paths[static_cast<size_t>(node.token)] = std::move(path);
  }
  return paths;
}

EdgeSet flatten_const_relations(const ConstituencyTree& tree, const FlattenConfig& cfg) {
  EdgeSet edges;
  for (const ConstNode& node : tree.nodes) {
    if (node.is_preterminal()) continue;
    const std::string cat = base_category(node.tag);

    // (1) noun phrase boundaries, (3) clause boundaries
    if (node.width() >= 2 && (cat == "NP" || cfg.clause_tags.count(cat)))
      edges.insert(make_edge(node.first, node.last, cat == "NP" ? "NP" : "S"));

    // (2) a word linked to each phrasal sibling
    for (int w : node.children) {
      const ConstNode& word = tree.node(w);
      if (!word.is_preterminal() || cfg.punct_tags.count(word.tag)) continue;
      for (int p : node.children) {
        const ConstNode& phrase = tree.node(p);
        if (phrase.is_preterminal()) continue;
        int target = cfg.variant == ConstVariant::kV2 ? phrase.last : phrase.first;
        if (target == word.token) continue;
        edges.insert(make_edge(word.token, target, node.tag));
      }
    }
  }

  // (4) drop long-distance edges
  if (cfg.variant != ConstVariant::kV3) {
    std::erase_if(edges, [&](const Edge& e) { return e.j - e.i > cfg.max_distance; });
  }
  return edges;
}

SyntacticGraph build_const_graph(const ParsedSentence& s, const FlattenConfig& cfg) {
  SyntacticGraph g;
  g.view = GraphView::kConst;
  g.n = s.size();
  g.words = surfaces(s);
  g.labels = build_const_paths(s.const_tree);
  if (cfg.variant == ConstVariant::kV1) {
    for (auto& path : g.labels) path = {path.back()};
  }
  g.edges = flatten_const_relations(s.const_tree, cfg);
  add_self_loops_and_edges(g);
  return g;
}

GraphFormat parse_graph_format(const std::string& name) {
  if (name == "json") return GraphFormat::kJson;
  if (name == "dot") return GraphFormat::kDot;
  throw Error(ErrorKind::kUnknownFormat, "unknown graph format '" + name + "'");
}

std::string join_label(const std::vector<std::string>& label) {
  std::string out;
  for (size_t k = 0; k < label.size(); ++k) {
    if (k) out += '-';
    out += label[k];
  }
  return out;
}

std::string export_graph(const SyntacticGraph& g, GraphFormat format) {
  if (format == GraphFormat::kJson) {
    nlohmann::ordered_json j;
    j["view"] = view_name(g.view);
    nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
    for (int i = 0; i < g.n; ++i) {
      nlohmann::ordered_json node;
      node["i"] = i;
      const auto& label = g.labels[static_cast<size_t>(i)];
      node["label"] = join_label(label);
      if (g.view == GraphView::kConst) node["path"] = label;
      nodes.push_back(node);
    }
    j["nodes"] = nodes;
    nlohmann::ordered_json edges = nlohmann::ordered_json::array();
    for (const Edge& e : g.edges) {
      nlohmann::ordered_json ej;
      ej["i"] = e.i;
      ej["j"] = e.j;
      ej["type"] = e.type;
      edges.push_back(ej);
    }
    j["edges"] = edges;
    return j.dump();
  }

  std::ostringstream out;
  out << "graph " << view_name(g.view) << " {\n";
  for (int i = 0; i < g.n; ++i) {
    out << "  n" << i << " [label=\"";
    if (static_cast<size_t>(i) < g.words.size())
      out << dot_escape(g.words[static_cast<size_t>(i)]) << "\\n";
    out << dot_escape(join_label(g.labels[static_cast<size_t>(i)])) << "\"];\n";
  }
  for (const Edge& e : g.edges)
    out << "  n" << e.i << " -- n" << e.j << " [label=\"" << dot_escape(e.type) << "\"];\n";
  out << "}\n";
  return out.str();
}

std::string export_graph(const SyntacticGraph& g, const std::string& format) {
  return export_graph(g, parse_graph_format(format));
}

}  // namespace smile
