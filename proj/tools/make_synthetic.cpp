// Writes the template corpus and the running example as JSONL.
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "smile/corpus.hpp"
#include "smile/synthetic.hpp"

int main(int argc, char** argv) {
  if (argc != 4) {
    std::cerr << "usage: make_synthetic <count> <seed> <out.jsonl | running-example>\n";
    return 1;
  }
  const std::string target = argv[3];
  std::vector<smile::ParsedSentence> corpus;
  if (std::string(argv[1]) == "0") corpus.push_back(smile::running_example());
  else corpus = smile::synthetic_corpus(std::atoi(argv[1]), std::strtoull(argv[2], nullptr, 10));
  std::ofstream out(target);
  if (!out) {
    std::cerr << "cannot write " << target << "\n";
    return 2;
  }
  smile::write_corpus_jsonl(out, corpus);
  return 0;
}
