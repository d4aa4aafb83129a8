#pragma once

// Parsed-sentence records: tokens with an aligned constituency tree,
// dependency rows, candidate verbs and gold tuples.

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "smile/bio.hpp"

namespace smile {

struct Token {
  int index = 0;
  std::string surface;
  std::string lowercased;
};

std::vector<Token> make_tokens(const std::vector<std::string>& words);

// Preterminals carry `token` >= 0 and no children. `first`/`last` give the
// covered token range of every node.
struct ConstNode {
  std::string tag;
  std::vector<int> children;
  int token = -1;
  int parent = -1;
  int first = 0;
  int last = 0;

  bool is_preterminal() const { return token >= 0; }
  int width() const { return last - first + 1; }
};

struct ConstituencyTree {
  std::vector<ConstNode> nodes;
  int root = -1;
  std::vector<std::string> words;  // leaf words, left to right

  int num_tokens() const { return static_cast<int>(words.size()); }
  const ConstNode& node(int id) const { return nodes[static_cast<size_t>(id)]; }
  // id of the preterminal above token i
  int preterminal_of(int token) const;
  std::string to_bracketed() const;
};

// Parses one PTB bracketing. A unary wrapper labelled ROOT (or unlabelled,
// as in "( (S ...))") is dropped so the tree root is the sentence node.
ConstituencyTree read_bracketed_tree(std::string_view text);
// Same, additionally checking the leaf count against `tokens`.
ConstituencyTree read_bracketed_tree(std::string_view text,
                                     const std::vector<Token>& tokens);

inline constexpr int kRootHead = -1;

struct DepRow {
  int head = kRootHead;  // 0-based token index or kRootHead
  std::string deprel;
};

struct DependencyRows {
  std::vector<DepRow> rows;

  int size() const { return static_cast<int>(rows.size()); }
  int root() const;
};

// Throws MissingRoot, MultipleRoots, CyclicHeads, SchemaViolation.
void validate_dependency_rows(const DependencyRows& deps);

// Rows of one sentence in CoNLL-U. Comment and blank lines are skipped;
// multiword ranges and empty nodes are rejected. FORM values go to `forms`
// when it is non-null.
DependencyRows read_conllu(std::span<const std::string> lines,
                           std::vector<std::string>* forms = nullptr);

struct ParsedSentence {
  std::string id;
  std::vector<Token> tokens;
  ConstituencyTree const_tree;
  DependencyRows dep_rows;
  std::vector<int> verbs;
  std::vector<Tuple> tuples;  // at most one per verb, keyed by indicator_verb

  int size() const { return static_cast<int>(tokens.size()); }
  const Tuple* tuple_for(int verb) const;
};

// Structural checks shared by every loader. Errors carry `line`.
void validate_sentence(const ParsedSentence& s, const TagSet& tags, int line = 0);

struct TaggedInstance {
  const ParsedSentence* sentence = nullptr;
  int indicator_verb = 0;
  std::vector<int> labels;
};

// One instance per verb; verbs without an aligned tuple get all-O labels.
std::vector<TaggedInstance> expand_instances(const ParsedSentence& s);

struct CorpusOptions {
  int max_arg = kDefaultMaxArg;
};

std::vector<ParsedSentence> read_corpus_jsonl(std::istream& in,
                                              const CorpusOptions& opts = {});
std::vector<ParsedSentence> load_corpus(const std::string& path,
                                        const CorpusOptions& opts = {});
// Sentences zipped by order from a bracketed-tree file, a CoNLL-U file and a
// verbs file (one line of space separated 0-based indices per sentence).
std::vector<ParsedSentence> load_corpus_files(const std::string& ptb_path,
                                              const std::string& conllu_path,
                                              const std::string& verbs_path,
                                              const CorpusOptions& opts = {});

std::string sentence_to_json_line(const ParsedSentence& s);
void write_corpus_jsonl(std::ostream& out, std::span<const ParsedSentence> corpus);

std::string span_text(const std::vector<Token>& tokens, const Span& span);

}  // namespace smile
