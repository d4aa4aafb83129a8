#include <gtest/gtest.h>

#include <fstream>
#include <functional>
#include <sstream>

#include "json.hpp"

#include "smile/corpus.hpp"
#include "smile/error.hpp"
#include "smile/synthetic.hpp"
#include "support.hpp"

namespace smile {
namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::kIo;
}

const char* kRunningTree =
    "(S (NP (NP (NNP Mary) (POS 's)) (NN cat)) (VP (VBZ likes) (S (VP (VBG playing) "
    "(NP (JJ plush) (NNS toys)) (PP (IN in) (NP (DT the) (NN room)))))) (. .))";

TEST(BracketedTree, MinimalTwoPhraseTree) {
  ConstituencyTree t = read_bracketed_tree("(S (NP (NN cat)) (VP (VBZ likes)))");
  const ConstNode& root = t.node(t.root);
  EXPECT_EQ(root.tag, "S");
  ASSERT_EQ(root.children.size(), 2u);
  EXPECT_EQ(t.node(root.children[0]).tag, "NP");
  EXPECT_EQ(t.node(root.children[1]).tag, "VP");
  EXPECT_EQ(t.words, (std::vector<std::string>{"cat", "likes"}));
}

TEST(BracketedTree, RunningExampleShape) {
  ConstituencyTree t = read_bracketed_tree(kRunningTree);
  EXPECT_EQ(t.num_tokens(), 11);
  const ConstNode& root = t.node(t.root);
  ASSERT_EQ(root.children.size(), 3u);
  const ConstNode& np = t.node(root.children[0]);
  const ConstNode& vp = t.node(root.children[1]);
  EXPECT_EQ(np.tag, "NP");
  EXPECT_EQ(np.first, 0);
  EXPECT_EQ(np.last, 2);
  EXPECT_EQ(vp.tag, "VP");
  EXPECT_EQ(vp.first, 3);
  EXPECT_EQ(vp.last, 9);
  const ConstNode& inner_s = t.node(vp.children[1]);
  EXPECT_EQ(inner_s.tag, "S");
  EXPECT_EQ(t.node(inner_s.children[0]).tag, "VP");
  EXPECT_EQ(inner_s.first, 4);
  EXPECT_EQ(inner_s.last, 9);
  EXPECT_EQ(t.to_bracketed(), kRunningTree);
}

TEST(BracketedTree, BarePreterminalIsOneWordTree) {
  const ConstituencyTree t = read_bracketed_tree("(NN cat)");
  EXPECT_EQ(t.num_tokens(), 1);
  EXPECT_TRUE(t.node(t.root).is_preterminal());
}

TEST(BracketedTree, WrapperIsDropped) {
  EXPECT_EQ(read_bracketed_tree("(ROOT (S (NN a)))").node(0).tag, "S");
  EXPECT_EQ(read_bracketed_tree("( (S (NN a)))").node(0).tag, "S");
  EXPECT_EQ(read_bracketed_tree("(TOP (S (NN a)))").node(0).tag, "S");
}

TEST(BracketedTree, Errors) {
  EXPECT_EQ(kind_of([] { read_bracketed_tree("(S"); }), ErrorKind::kUnbalancedBrackets);
  EXPECT_EQ(kind_of([] { read_bracketed_tree("(S (NN a)))"); }), ErrorKind::kUnbalancedBrackets);
  EXPECT_EQ(kind_of([] { read_bracketed_tree("()"); }), ErrorKind::kEmptyTree);
  EXPECT_EQ(kind_of([] { read_bracketed_tree(""); }), ErrorKind::kEmptyTree);
  EXPECT_EQ(kind_of([] { read_bracketed_tree("(S (NN cat) dog)"); }), ErrorKind::kMalformedTree);
  EXPECT_EQ(kind_of([] { read_bracketed_tree("(S (NN a)", make_tokens({"a"})); }),
            ErrorKind::kUnbalancedBrackets);
  EXPECT_EQ(kind_of([] { read_bracketed_tree("(S (NN a))", make_tokens({"a", "b"})); }),
            ErrorKind::kLeafCountMismatch);
}

TEST(Conllu, SingleToken) {
  const std::vector<std::string> lines{"1\tgo\tgo\tVERB\tVB\t_\t0\troot\t_\t_"};
  std::vector<std::string> forms;
  DependencyRows d = read_conllu(lines, &forms);
  ASSERT_EQ(d.size(), 1);
  EXPECT_EQ(d.rows[0].head, kRootHead);
  EXPECT_EQ(d.root(), 0);
  EXPECT_EQ(forms, std::vector<std::string>{"go"});
}

TEST(Conllu, RunningExampleRootIsLikes) {
  const std::vector<std::string> lines{
      "# text = Mary 's cat likes playing plush toys in the room .",
      "1\tMary\t_\tPROPN\tNNP\t_\t3\tnmod:poss\t_\t_",
      "2\t's\t_\tPART\tPOS\t_\t1\tcase\t_\t_",
      "3\tcat\t_\tNOUN\tNN\t_\t4\tnsubj\t_\t_",
      "4\tlikes\t_\tVERB\tVBZ\t_\t0\troot\t_\t_",
      "5\tplaying\t_\tVERB\tVBG\t_\t4\txcomp\t_\t_",
      "6\tplush\t_\tADJ\tJJ\t_\t7\tamod\t_\t_",
      "7\ttoys\t_\tNOUN\tNNS\t_\t5\tobj\t_\t_",
      "8\tin\t_\tADP\tIN\t_\t10\tcase\t_\t_",
      "9\tthe\t_\tDET\tDT\t_\t10\tdet\t_\t_",
      "10\troom\t_\tNOUN\tNN\t_\t5\tobl\t_\t_",
      "11\t.\t_\tPUNCT\t.\t_\t4\tpunct\t_\t_"};
  DependencyRows d = read_conllu(lines);
  EXPECT_EQ(d.size(), 11);
  EXPECT_EQ(d.root(), 3);
  EXPECT_EQ(d.rows[3].head, kRootHead);
  EXPECT_EQ(d.rows[0].head, 2);
  EXPECT_EQ(d.rows[9].deprel, "obl");
}

TEST(Conllu, Errors) {
  auto rows = [](std::vector<std::string> lines) { return [lines] { read_conllu(lines); }; };
  EXPECT_EQ(kind_of(rows({"1\ta\t_\t_\t_\t_\t0\troot\t_\t_", "2\tb\t_\t_\t_\t_\t0\troot\t_\t_"})),
            ErrorKind::kMultipleRoots);
  EXPECT_EQ(kind_of(rows({"1\ta\t_\t_\t_\t_\t2\tx\t_\t_", "2\tb\t_\t_\t_\t_\t1\tx\t_\t_"})),
            ErrorKind::kMissingRoot);
  EXPECT_EQ(kind_of(rows({"1\ta\t_\t_\t_\t_\t0\troot\t_\t_", "2\tb\t_\t_\t_\t_\t3\tx\t_\t_",
                          "3\tc\t_\t_\t_\t_\t2\tx\t_\t_"})),
            ErrorKind::kCyclicHeads);
  EXPECT_EQ(kind_of(rows({"1\ta\t_\t0\troot"})), ErrorKind::kBadColumnCount);
  EXPECT_EQ(kind_of(rows({"1-2\tab\t_\t_\t_\t_\t_\t_\t_\t_", "1\ta\t_\t_\t_\t_\t0\troot\t_\t_"})),
            ErrorKind::kSchemaViolation);
  EXPECT_EQ(kind_of(rows({"1\ta\t_\t_\t_\t_\t0\troot\t_\t_", "1.1\tb\t_\t_\t_\t_\t_\t_\t_\t_"})),
            ErrorKind::kSchemaViolation);
}

TEST(ExpandInstances, RunningExample) {
  ParsedSentence s = running_example();
  std::vector<TaggedInstance> inst = expand_instances(s);
  ASSERT_EQ(inst.size(), 2u);
  EXPECT_EQ(inst[0].indicator_verb, 3);
  EXPECT_EQ(inst[0].labels, encode_bio(s.tuples[0], 11));
  EXPECT_EQ(inst[1].indicator_verb, 4);
  EXPECT_EQ(inst[1].labels, std::vector<int>(11, 0));
}

TEST(ExpandInstances, CountsAndVacuousCase) {
  ParsedSentence s = running_example();
  s.verbs = {3, 4, 7};
  EXPECT_EQ(expand_instances(s).size(), 3u);
  s.verbs.clear();
  s.tuples.clear();
  EXPECT_TRUE(expand_instances(s).empty());
}

TEST(ExpandInstances, OverlappingSpansRejected) {
  ParsedSentence s = running_example();
  s.tuples[0].spans[arg_role(1)] = Span{4, 6};  // overlaps REL
  EXPECT_EQ(kind_of([&] { expand_instances(s); }), ErrorKind::kOverlappingGoldSpans);
}

TEST(ExpandInstances, LabelsWellFormedAndCoverVerbOnSyntheticCorpus) {
  for (const ParsedSentence& s : synthetic_corpus(60, 3)) {
    const auto inst = expand_instances(s);
    EXPECT_EQ(inst.size(), s.verbs.size());
    for (const TaggedInstance& i : inst) {
      EXPECT_TRUE(is_well_formed_bio(i.labels));
      if (const Tuple* t = s.tuple_for(i.indicator_verb)) {
        EXPECT_TRUE(t->spans.at(kRelRole).contains(i.indicator_verb));
        EXPECT_EQ(TagSet::role_of(i.labels[static_cast<size_t>(i.indicator_verb)]), kRelRole);
      }
    }
  }
}

std::string running_line() { return testing::slurp(testing::test_data("running_example.jsonl")); }

TEST(LoadCorpus, EmptyAndSingleton) {
  std::istringstream empty("");
  EXPECT_TRUE(read_corpus_jsonl(empty).empty());
  auto corpus = load_corpus(testing::test_data("running_example.jsonl"));
  ASSERT_EQ(corpus.size(), 1u);
  EXPECT_EQ(corpus[0].size(), 11);
  EXPECT_EQ(corpus[0].tuples.size(), 1u);
  EXPECT_EQ(corpus[0].dep_rows.root(), 3);
}

TEST(LoadCorpus, RoundTripIsIdentity) {
  std::vector<ParsedSentence> corpus = synthetic_corpus(24, 11);
  corpus.push_back(running_example());
  std::stringstream buf;
  write_corpus_jsonl(buf, corpus);
  const std::string first = buf.str();
  std::vector<ParsedSentence> again = read_corpus_jsonl(buf);
  ASSERT_EQ(again.size(), corpus.size());
  std::stringstream buf2;
  write_corpus_jsonl(buf2, again);
  EXPECT_EQ(buf2.str(), first);
  for (size_t i = 0; i < corpus.size(); ++i) {
    EXPECT_EQ(again[i].id, corpus[i].id);
    EXPECT_EQ(again[i].const_tree.to_bracketed(), corpus[i].const_tree.to_bracketed());
    EXPECT_EQ(again[i].verbs, corpus[i].verbs);
    ASSERT_EQ(again[i].tuples.size(), corpus[i].tuples.size());
    for (size_t k = 0; k < corpus[i].tuples.size(); ++k)
      EXPECT_EQ(again[i].tuples[k].spans, corpus[i].tuples[k].spans);
  }
}

Error load_error(const std::string& text) {
  std::istringstream in(text);
  try {
    read_corpus_jsonl(in);
  } catch (const Error& e) {
    return e;
  }
  ADD_FAILURE() << "no error for " << text;
  return Error(ErrorKind::kIo, "none");
}

TEST(LoadCorpus, LeafCountMismatchIsAlignmentErrorWithLine) {
  nlohmann::json j = nlohmann::json::parse(running_line());
  j["tokens"].push_back("extra");
  j["dep_conllu"].push_back(nlohmann::json::array({3, "dep"}));
  const Error e = load_error("\n" + j.dump() + "\n");
  EXPECT_EQ(e.kind(), ErrorKind::kAlignmentError);
  EXPECT_EQ(e.line(), 2);
}

TEST(LoadCorpus, SchemaViolations) {
  EXPECT_EQ(load_error("[1,2]").kind(), ErrorKind::kSchemaViolation);
  EXPECT_EQ(load_error("{\"tokens\":[\"a\"]}").kind(), ErrorKind::kSchemaViolation);
  EXPECT_EQ(load_error("not json").kind(), ErrorKind::kSchemaViolation);
  nlohmann::json j = nlohmann::json::parse(running_line());
  j["tuples"][0]["spans"]["ARGM"] = {1, 1};
  EXPECT_EQ(load_error(j.dump()).kind(), ErrorKind::kSchemaViolation);
  j = nlohmann::json::parse(running_line());
  j["dep_conllu"][0][0] = -1;  // second root
  EXPECT_EQ(load_error(j.dump()).kind(), ErrorKind::kSchemaViolation);
}

TEST(LoadCorpus, RelMustContainVerb) {
  nlohmann::json j = nlohmann::json::parse(running_line());
  j["tuples"][0]["verb"] = 4;
  j["tuples"][0]["spans"]["REL"] = {3, 3};
  EXPECT_EQ(load_error(j.dump()).kind(), ErrorKind::kAlignmentError);
}

TEST(LoadCorpus, SeparateFilesZipByOrder) {
  const std::string dir = ::testing::TempDir();
  {
    std::ofstream(dir + "/c.ptb") << "(S (NP (NNP Bo)) (VP (VBD ran)) (. .))\n"
                                  << "(S (NP (NN it)) (VP (VBZ works)))\n";
    std::ofstream(dir + "/c.conllu") << "1\tBo\t_\t_\t_\t_\t2\tnsubj\t_\t_\n"
                                     << "2\tran\t_\t_\t_\t_\t0\troot\t_\t_\n"
                                     << "3\t.\t_\t_\t_\t_\t2\tpunct\t_\t_\n\n"
                                     << "1\tit\t_\t_\t_\t_\t2\tnsubj\t_\t_\n"
                                     << "2\tworks\t_\t_\t_\t_\t0\troot\t_\t_\n";
    std::ofstream(dir + "/c.verbs") << "1\n1\n";
  }
  auto corpus = load_corpus_files(dir + "/c.ptb", dir + "/c.conllu", dir + "/c.verbs");
  ASSERT_EQ(corpus.size(), 2u);
  EXPECT_EQ(corpus[0].tokens[0].surface, "Bo");
  EXPECT_EQ(corpus[0].tokens[0].lowercased, "bo");
  EXPECT_EQ(corpus[1].verbs, std::vector<int>{1});
  EXPECT_TRUE(corpus[1].tuples.empty());
}

}  // namespace
}  // namespace smile
