#include "smile/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>

#include "json.hpp"
#include "smile/error.hpp"

namespace smile {

namespace {

std::string to_lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// --- bracketed trees -------------------------------------------------------

struct RawNode {
  std::string tag;
  std::string word;  // non-empty for preterminals
  std::vector<std::unique_ptr<RawNode>> children;
};

class BracketLexer {
 public:
  explicit BracketLexer(std::string_view text) : text_(text) {}

  enum class Kind { kOpen, kClose, kAtom, kEnd };

  Kind peek() {
    skip_space();
    if (pos_ >= text_.size()) return Kind::kEnd;
    if (text_[pos_] == '(') return Kind::kOpen;
    if (text_[pos_] == ')') return Kind::kClose;
    return Kind::kAtom;
  }

  void expect(Kind kind) {
    Kind k = peek();
    if (k != kind) {
      if (k == Kind::kEnd || kind == Kind::kClose || kind == Kind::kOpen)
        throw Error(ErrorKind::kUnbalancedBrackets,
                    "unexpected " + describe(k) + " at offset " + std::to_string(pos_));
      throw Error(ErrorKind::kMalformedTree,
                  "unexpected " + describe(k) + " at offset " + std::to_string(pos_));
    }
    if (k != Kind::kEnd) ++pos_;
  }

  std::string atom() {
    skip_space();
    size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != '(' && text_[pos_] != ')' &&
           !std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

 private:
  static std::string describe(Kind k) {
    switch (k) {
      case Kind::kOpen: return "'('";
      case Kind::kClose: return "')'";
      case Kind::kAtom: return "word";
      case Kind::kEnd: return "end of input";
    }
    return "?";
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  std::string_view text_;
  size_t pos_ = 0;
};

std::unique_ptr<RawNode> parse_raw(BracketLexer& lex) {
  using K = BracketLexer::Kind;
  lex.expect(K::kOpen);
  auto node = std::make_unique<RawNode>();
  if (lex.peek() == K::kAtom) node->tag = lex.atom();
  if (lex.peek() == K::kAtom) {
    node->word = lex.atom();
    if (node->tag.empty())
      throw Error(ErrorKind::kMalformedTree, "leaf '" + node->word + "' has no tag");
    if (lex.peek() == K::kAtom || lex.peek() == K::kOpen)
      throw Error(ErrorKind::kMalformedTree,
                  "word '" + node->word + "' mixed with other children");
    lex.expect(K::kClose);
    return node;
  }
  while (lex.peek() == K::kOpen) node->children.push_back(parse_raw(lex));
  if (lex.peek() == K::kAtom)
    throw Error(ErrorKind::kMalformedTree, "bare word inside '" + node->tag + "'");
  lex.expect(K::kClose);
  if (node->children.empty()) {
    throw Error(ErrorKind::kEmptyTree,
                node->tag.empty() ? "empty bracketing" : "node '" + node->tag + "' has no children");
  }
  return node;
}

bool is_wrapper(const RawNode& n) {
  return (n.tag.empty() || n.tag == "ROOT" || n.tag == "TOP") && n.word.empty() &&
         n.children.size() == 1 && n.children[0]->word.empty();
}

int flatten(const RawNode& raw, int parent, ConstituencyTree& tree) {
  int id = static_cast<int>(tree.nodes.size());
  tree.nodes.push_back(ConstNode{});
  tree.nodes.back().tag = raw.tag;
  tree.nodes.back().parent = parent;
  if (!raw.word.empty()) {
    int tok = static_cast<int>(tree.words.size());
    tree.words.push_back(raw.word);
    ConstNode& n = tree.nodes[static_cast<size_t>(id)];
    n.token = tok;
    n.first = n.last = tok;
    return id;
  }
  std::vector<int> kids;
  for (const auto& child : raw.children) kids.push_back(flatten(*child, id, tree));
  ConstNode& n = tree.nodes[static_cast<size_t>(id)];
  n.children = std::move(kids);
  n.first = tree.nodes[static_cast<size_t>(n.children.front())].first;
  n.last = tree.nodes[static_cast<size_t>(n.children.back())].last;
  return id;
}

void bracket(const ConstituencyTree& tree, int id, std::string& out) {
  const ConstNode& n = tree.node(id);
  out += '(';
  out += n.tag;
  if (n.is_preterminal()) {
    out += ' ';
    out += tree.words[static_cast<size_t>(n.token)];
  } else {
    for (int c : n.children) {
      out += ' ';
      bracket(tree, c, out);
    }
  }
  out += ')';
}

// --- CoNLL-U ----------------------------------------------------------------

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    size_t pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

bool parse_int(std::string_view s, int& value) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::string trim(std::string_view s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

// --- JSON --------------------------------------------------------------------

using nlohmann::json;

[[noreturn]] void schema_error(const std::string& what, int line) {
  throw Error(ErrorKind::kSchemaViolation, what, line);
}

Span read_span(const json& j, const std::string& role, int line) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() ||
      !j[1].is_number_integer())
    schema_error("span for " + role + " must be [start,end]", line);
  return Span{j[0].get<int>(), j[1].get<int>()};
}

ParsedSentence sentence_from_json(const json& j, const TagSet& tags, int line,
                                  size_t ordinal) {
  if (!j.is_object()) schema_error("record is not an object", line);
  for (const char* key : {"tokens", "const_ptb", "dep_conllu", "verbs"}) {
    if (!j.contains(key)) schema_error(std::string("missing key '") + key + "'", line);
  }
  ParsedSentence s;
  s.id = std::to_string(ordinal);
  if (j.contains("id")) {
    const json& id = j["id"];
    if (id.is_string()) s.id = id.get<std::string>();
    else if (id.is_number_integer()) s.id = std::to_string(id.get<long long>());
    else schema_error("'id' must be a string or integer", line);
  }

  const json& toks = j["tokens"];
  if (!toks.is_array()) schema_error("'tokens' must be an array", line);
  std::vector<std::string> words;
  for (const json& t : toks) {
    if (!t.is_string() || t.get<std::string>().empty())
      schema_error("tokens must be non-empty strings", line);
    words.push_back(t.get<std::string>());
  }
  s.tokens = make_tokens(words);

  if (!j["const_ptb"].is_string()) schema_error("'const_ptb' must be a string", line);
  try {
    s.const_tree = read_bracketed_tree(j["const_ptb"].get<std::string>(), s.tokens);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kLeafCountMismatch)
      throw Error(ErrorKind::kAlignmentError, e.what(), line);
    schema_error(std::string("const_ptb: ") + e.what(), line);
  }

  const json& deps = j["dep_conllu"];
  if (!deps.is_array()) schema_error("'dep_conllu' must be an array", line);
  if (deps.size() != s.tokens.size())
    throw Error(ErrorKind::kAlignmentError,
                std::to_string(deps.size()) + " dependency rows for " +
                    std::to_string(s.tokens.size()) + " tokens",
                line);
  for (const json& row : deps) {
    if (!row.is_array() || row.size() != 2 || !row[0].is_number_integer() ||
        !row[1].is_string())
      schema_error("dependency rows must be [head, deprel]", line);
    s.dep_rows.rows.push_back(DepRow{row[0].get<int>(), row[1].get<std::string>()});
  }

  const json& verbs = j["verbs"];
  if (!verbs.is_array()) schema_error("'verbs' must be an array", line);
  for (const json& v : verbs) {
    if (!v.is_number_integer()) schema_error("verb indices must be integers", line);
    s.verbs.push_back(v.get<int>());
  }

  if (j.contains("tuples")) {
    const json& tuples = j["tuples"];
    if (!tuples.is_array()) schema_error("'tuples' must be an array", line);
    for (const json& t : tuples) {
      if (!t.is_object() || !t.contains("verb") || !t["verb"].is_number_integer() ||
          !t.contains("spans") || !t["spans"].is_object())
        schema_error("tuples need integer 'verb' and object 'spans'", line);
      Tuple tuple;
      tuple.indicator_verb = t["verb"].get<int>();
      for (const auto& [key, value] : t["spans"].items()) {
        auto role = parse_role(key);
        if (!role || !tags.valid_role(*role)) schema_error("unknown role '" + key + "'", line);
        tuple.spans[*role] = read_span(value, key, line);
      }
      s.tuples.push_back(std::move(tuple));
    }
  }

  try {
    validate_sentence(s, tags, line);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kAlignmentError || e.kind() == ErrorKind::kSchemaViolation)
      throw;
    schema_error(e.what(), line);
  }
  return s;
}

}  // namespace

std::vector<Token> make_tokens(const std::vector<std::string>& words) {
  std::vector<Token> tokens;
  tokens.reserve(words.size());
  for (size_t i = 0; i < words.size(); ++i)
    tokens.push_back(Token{static_cast<int>(i), words[i], to_lower_ascii(words[i])});
  return tokens;
}

int ConstituencyTree::preterminal_of(int token) const {
  for (size_t id = 0; id < nodes.size(); ++id)
    if (nodes[id].token == token) return static_cast<int>(id);
  return -1;
}

std::string ConstituencyTree::to_bracketed() const {
  std::string out;
  if (root >= 0) bracket(*this, root, out);
  return out;
}

ConstituencyTree read_bracketed_tree(std::string_view text) {
  BracketLexer lex(text);
  if (lex.peek() == BracketLexer::Kind::kEnd)
    throw Error(ErrorKind::kEmptyTree, "no bracketing");
  std::unique_ptr<RawNode> raw = parse_raw(lex);
  if (lex.peek() != BracketLexer::Kind::kEnd)
    throw Error(ErrorKind::kUnbalancedBrackets, "trailing input after tree");
  const RawNode* top = raw.get();
  while (is_wrapper(*top)) top = top->children[0].get();
  if (top->tag.empty()) throw Error(ErrorKind::kMalformedTree, "root has no label");

  ConstituencyTree tree;
  tree.root = flatten(*top, -1, tree);
  return tree;
}

ConstituencyTree read_bracketed_tree(std::string_view text,
                                     const std::vector<Token>& tokens) {
  ConstituencyTree tree = read_bracketed_tree(text);
  if (tree.words.size() != tokens.size())
    throw Error(ErrorKind::kLeafCountMismatch,
                std::to_string(tree.words.size()) + " leaves for " +
                    std::to_string(tokens.size()) + " tokens");
  return tree;
}

int DependencyRows::root() const {
  for (size_t i = 0; i < rows.size(); ++i)
    if (rows[i].head == kRootHead) return static_cast<int>(i);
  return -1;
}

void validate_dependency_rows(const DependencyRows& deps) {
  const int n = deps.size();
  int roots = 0;
  for (const DepRow& r : deps.rows) {
    if (r.head == kRootHead) {
      ++roots;
    } else if (r.head < 0 || r.head >= n) {
      throw Error(ErrorKind::kSchemaViolation,
                  "head index " + std::to_string(r.head) + " out of range");
    }
  }
  if (roots == 0) throw Error(ErrorKind::kMissingRoot, "no token attaches to the root");
  if (roots > 1)
    throw Error(ErrorKind::kMultipleRoots, std::to_string(roots) + " root tokens");
  // Every chain of heads must reach the root within n steps.
  for (int i = 0; i < n; ++i) {
    int cur = i;
    int steps = 0;
    while (deps.rows[static_cast<size_t>(cur)].head != kRootHead) {
      cur = deps.rows[static_cast<size_t>(cur)].head;
      if (++steps > n)
        throw Error(ErrorKind::kCyclicHeads, "token " + std::to_string(i) + " is on a cycle");
    }
  }
}

DependencyRows read_conllu(std::span<const std::string> lines,
                           std::vector<std::string>* forms) {
  DependencyRows deps;
  std::vector<int> heads;
  for (const std::string& raw : lines) {
    std::string line = raw;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || line[0] == '#') continue;
    std::vector<std::string> cols = split(line, '\t');
    if (cols.size() < 8 || cols.size() > 10)
      throw Error(ErrorKind::kBadColumnCount,
                  std::to_string(cols.size()) + " columns in '" + line + "'");
    if (cols[0].find('-') != std::string::npos)
      throw Error(ErrorKind::kSchemaViolation, "multiword token range " + cols[0]);
    if (cols[0].find('.') != std::string::npos)
      throw Error(ErrorKind::kSchemaViolation, "empty node " + cols[0]);
    int id = 0, head = 0;
    if (!parse_int(cols[0], id) || id != deps.size() + 1)
      throw Error(ErrorKind::kSchemaViolation, "token id '" + cols[0] + "' out of sequence");
    if (!parse_int(cols[6], head) || head < 0)
      throw Error(ErrorKind::kSchemaViolation, "bad head '" + cols[6] + "'");
    heads.push_back(head);
    deps.rows.push_back(DepRow{head - 1, cols[7]});
    if (forms) forms->push_back(cols[1]);
  }
  for (int h : heads) {
    if (h > deps.size())
      throw Error(ErrorKind::kSchemaViolation, "head " + std::to_string(h) + " out of range");
  }
  validate_dependency_rows(deps);
  return deps;
}

const Tuple* ParsedSentence::tuple_for(int verb) const {
  for (const Tuple& t : tuples)
    if (t.indicator_verb == verb) return &t;
  return nullptr;
}

void validate_sentence(const ParsedSentence& s, const TagSet& tags, int line) {
  const int n = s.size();
  if (n == 0) throw Error(ErrorKind::kSchemaViolation, "sentence has no tokens", line);
  for (int i = 0; i < n; ++i) {
    if (s.tokens[static_cast<size_t>(i)].index != i ||
        s.tokens[static_cast<size_t>(i)].surface.empty())
      throw Error(ErrorKind::kSchemaViolation, "bad token " + std::to_string(i), line);
  }
  if (s.const_tree.num_tokens() != n)
    throw Error(ErrorKind::kAlignmentError,
                "constituency tree has " + std::to_string(s.const_tree.num_tokens()) +
                    " leaves for " + std::to_string(n) + " tokens",
                line);
  if (s.dep_rows.size() != n)
    throw Error(ErrorKind::kAlignmentError, "dependency row count differs from token count",
                line);
  try {
    validate_dependency_rows(s.dep_rows);
  } catch (const Error& e) {
    throw Error(e.kind(), e.what(), line);
  }

  std::set<int> verbs;
  for (int v : s.verbs) {
    if (v < 0 || v >= n)
      throw Error(ErrorKind::kSchemaViolation, "verb index " + std::to_string(v) + " out of range",
                  line);
    if (!verbs.insert(v).second)
      throw Error(ErrorKind::kSchemaViolation, "duplicate verb " + std::to_string(v), line);
  }

  std::set<int> tuple_verbs;
  for (const Tuple& t : s.tuples) {
    if (!verbs.count(t.indicator_verb))
      throw Error(ErrorKind::kAlignmentError,
                  "tuple verb " + std::to_string(t.indicator_verb) + " is not a listed verb", line);
    if (!tuple_verbs.insert(t.indicator_verb).second)
      throw Error(ErrorKind::kSchemaViolation,
                  "more than one tuple for verb " + std::to_string(t.indicator_verb), line);
    if (!t.has_rel()) throw Error(ErrorKind::kSchemaViolation, "tuple without REL", line);
    for (const auto& [role, span] : t.spans) {
      if (!tags.valid_role(role))
        throw Error(ErrorKind::kSchemaViolation, "role " + role_name(role) + " exceeds MAX_ARG",
                    line);
      if (span.start < 0 || span.end >= n || span.start > span.end)
        throw Error(ErrorKind::kSchemaViolation, "span for " + role_name(role) + " out of range",
                    line);
    }
    if (!t.spans.at(kRelRole).contains(t.indicator_verb))
      throw Error(ErrorKind::kAlignmentError,
                  "REL span does not contain verb " + std::to_string(t.indicator_verb), line);
  }
}

std::vector<TaggedInstance> expand_instances(const ParsedSentence& s) {
  std::vector<TaggedInstance> out;
  out.reserve(s.verbs.size());
  for (int verb : s.verbs) {
    const Tuple* gold = s.tuple_for(verb);
    if (gold) {
      for (auto a = gold->spans.begin(); a != gold->spans.end(); ++a) {
        for (auto b = std::next(a); b != gold->spans.end(); ++b) {
          if (a->second.overlaps(b->second))
            throw Error(ErrorKind::kOverlappingGoldSpans,
                        "sentence " + s.id + ": " + role_name(a->first) + " overlaps " +
                            role_name(b->first));
        }
      }
    }
    TaggedInstance inst;
    inst.sentence = &s;
    inst.indicator_verb = verb;
    inst.labels = encode_bio(gold ? std::optional<Tuple>(*gold) : std::nullopt, s.size());
    out.push_back(std::move(inst));
  }
  return out;
}

std::vector<ParsedSentence> read_corpus_jsonl(std::istream& in, const CorpusOptions& opts) {
  TagSet tags(opts.max_arg);
  std::vector<ParsedSentence> corpus;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      schema_error(e.what(), line_no);
    }
    corpus.push_back(sentence_from_json(j, tags, line_no, corpus.size()));
  }
  return corpus;
}

std::vector<ParsedSentence> load_corpus(const std::string& path, const CorpusOptions& opts) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path);
  return read_corpus_jsonl(in, opts);
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Splits a file of concatenated bracketings into one string per tree.
std::vector<std::string> split_bracketings(const std::string& text) {
  std::vector<std::string> out;
  int depth = 0;
  size_t start = std::string::npos;
  for (size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c == '(') {
      if (depth == 0) start = i;
      ++depth;
    } else if (c == ')') {
      if (--depth < 0) throw Error(ErrorKind::kUnbalancedBrackets, "stray ')' in tree file");
      if (depth == 0) out.push_back(text.substr(start, i - start + 1));
    } else if (depth == 0 && !std::isspace(static_cast<unsigned char>(c))) {
      throw Error(ErrorKind::kMalformedTree, "text outside brackets in tree file");
    }
  }
  if (depth != 0) throw Error(ErrorKind::kUnbalancedBrackets, "unterminated tree in tree file");
  return out;
}

}  // namespace

std::vector<ParsedSentence> load_corpus_files(const std::string& ptb_path,
                                              const std::string& conllu_path,
                                              const std::string& verbs_path,
                                              const CorpusOptions& opts) {
  TagSet tags(opts.max_arg);
  std::vector<std::string> trees = split_bracketings(read_file(ptb_path));

  std::vector<std::vector<std::string>> blocks;
  {
    std::istringstream in(read_file(conllu_path));
    std::string line;
    std::vector<std::string> block;
    while (std::getline(in, line)) {
      if (trim(line).empty()) {
        if (!block.empty()) blocks.push_back(std::move(block));
        block.clear();
      } else {
        block.push_back(line);
      }
    }
    if (!block.empty()) blocks.push_back(std::move(block));
  }

  std::vector<std::string> verb_lines;
  {
    std::istringstream in(read_file(verbs_path));
    std::string line;
    while (std::getline(in, line)) verb_lines.push_back(trim(line));
    while (!verb_lines.empty() && verb_lines.back().empty() &&
           verb_lines.size() > blocks.size())
      verb_lines.pop_back();
  }

  if (trees.size() != blocks.size() || trees.size() != verb_lines.size())
    throw Error(ErrorKind::kAlignmentError,
                std::to_string(trees.size()) + " trees, " + std::to_string(blocks.size()) +
                    " dependency blocks, " + std::to_string(verb_lines.size()) + " verb lines");

  std::vector<ParsedSentence> corpus;
  for (size_t k = 0; k < trees.size(); ++k) {
    const int line = static_cast<int>(k) + 1;  // sentence ordinal
    ParsedSentence s;
    s.id = std::to_string(k);
    std::vector<std::string> forms;
    try {
      s.dep_rows = read_conllu(blocks[k], &forms);
    } catch (const Error& e) {
      schema_error(e.what(), line);
    }
    s.tokens = make_tokens(forms);
    try {
      s.const_tree = read_bracketed_tree(trees[k], s.tokens);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::kLeafCountMismatch)
        throw Error(ErrorKind::kAlignmentError, e.what(), line);
      schema_error(e.what(), line);
    }
    std::istringstream vs(verb_lines[k]);
    std::string tok;
    while (vs >> tok) {
      int v = 0;
      if (!parse_int(tok, v)) schema_error("bad verb index '" + tok + "'", line);
      s.verbs.push_back(v);
    }
    validate_sentence(s, tags, line);
    corpus.push_back(std::move(s));
  }
  return corpus;
}

std::string sentence_to_json_line(const ParsedSentence& s) {
  nlohmann::ordered_json j;
  j["id"] = s.id;
  std::vector<std::string> words;
  for (const Token& t : s.tokens) words.push_back(t.surface);
  j["tokens"] = words;
  j["const_ptb"] = s.const_tree.to_bracketed();
  nlohmann::ordered_json deps = nlohmann::ordered_json::array();
  for (const DepRow& r : s.dep_rows.rows)
    deps.push_back(nlohmann::ordered_json::array({r.head, r.deprel}));
  j["dep_conllu"] = deps;
  j["verbs"] = s.verbs;
  nlohmann::ordered_json tuples = nlohmann::ordered_json::array();
  for (const Tuple& t : s.tuples) {
    nlohmann::ordered_json tj;
    tj["verb"] = t.indicator_verb;
    nlohmann::ordered_json spans = nlohmann::ordered_json::object();
    for (const auto& [role, span] : t.spans)
      spans[role_name(role)] = nlohmann::ordered_json::array({span.start, span.end});
    tj["spans"] = spans;
    tuples.push_back(tj);
  }
  j["tuples"] = tuples;
  return j.dump();
}

void write_corpus_jsonl(std::ostream& out, std::span<const ParsedSentence> corpus) {
  for (const ParsedSentence& s : corpus) out << sentence_to_json_line(s) << '\n';
}

std::string span_text(const std::vector<Token>& tokens, const Span& span) {
  std::string out;
  for (int i = span.start; i <= span.end; ++i) {
    if (i > span.start) out += ' ';
    out += tokens[static_cast<size_t>(i)].surface;
  }
  return out;
}

}  // namespace smile
