#pragma once

// Model assembly (encoder, Const-GCN, Dep-GCN, tagging head), the training
// loop, checkpoints and the ablation grid.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smile/corpus.hpp"
#include "smile/encoder.hpp"
#include "smile/eval.hpp"
#include "smile/multiview_loss.hpp"
#include "smile/syn_gcn.hpp"
#include "smile/syntax_graphs.hpp"
#include "smile/tagger.hpp"

namespace smile {

enum class EncoderKind { kToy, kPrecomputed };

struct TrainConfig {
  std::uint64_t seed = 13;
  int d_h = 64;
  int d_l = 32;
  double lr = 1e-3;
  int epochs = 300;
  int batch_size = 8;
  LossWeights weights;
  FlattenConfig flatten;
  bool use_dep = true;
  bool use_const = true;
  bool use_gcn = true;
  bool use_r1 = true;
  bool use_r2 = true;
  bool use_r3 = true;
  int max_arg = kDefaultMaxArg;
  double dev_fraction = 0.1;
  bool mv_exclude_self_loops = true;
  int workers = 1;
  EncoderKind encoder = EncoderKind::kToy;
  std::string encoder_file;  // vectors for the precomputed encoder
  // stop once an epoch reaches this training token accuracy (0 disables)
  double stop_accuracy = 0.0;

  // Throws std::invalid_argument on non-positive sizes or negative weights.
  void validate() const;
  // Effective loss weights after the use_r* switches.
  LossWeights effective_weights() const;
  int num_views() const { return (use_const ? 1 : 0) + (use_dep ? 1 : 0); }
};

// `key = value` lines, '#' starts a comment. Keys are the TrainConfig field
// names plus alpha, beta, gamma, variant and max_distance. Unknown keys and
// bad values throw std::invalid_argument.
void set_config_value(TrainConfig& cfg, const std::string& key, const std::string& value);
TrainConfig parse_config(std::istream& in, TrainConfig base = {});
TrainConfig load_config(const std::string& path, TrainConfig base = {});
std::string config_to_text(const TrainConfig& cfg);

struct EpochStats {
  int epoch = 0;
  double loss = 0.0;            // mean instance loss over the epoch
  double train_accuracy = 0.0;  // token accuracy of the forward passes seen in training
  double dev_f1 = 0.0;          // exact-match F1 on the dev split (0 when it is empty)
};

struct Checkpoint {
  static constexpr int kVersion = 1;
  TrainConfig config;
  Vocabulary vocab;
  LabelInventory const_labels;
  LabelInventory dep_labels;
  std::map<std::string, Tensor> tensors;
  int epoch = 0;
  std::vector<EpochStats> history;
};

void save_checkpoint(const Checkpoint& ckpt, std::ostream& out);
void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
// Throws SchemaViolation on a malformed or wrong-version file.
Checkpoint load_checkpoint(std::istream& in);
Checkpoint load_checkpoint(const std::string& path);

// Graphs of one sentence; either may be absent when its view is disabled.
struct SentenceGraphs {
  std::optional<SyntacticGraph> con;
  std::optional<SyntacticGraph> dep;
  Tensor adj_con;
  Tensor adj_dep;
  std::vector<int> ids;
};

struct ForwardResult {
  Var logits;
  Var h_ctx;
  Var h_con;  // invalid when the view is disabled
  Var h_dep;
};

class Model : public InstanceScorer {
 public:
  Model(const TrainConfig& cfg, Vocabulary vocab, LabelInventory const_labels,
        LabelInventory dep_labels);
  static Model from_checkpoint(const Checkpoint& ckpt);

  const TrainConfig& config() const { return cfg_; }
  const Vocabulary& vocab() const { return vocab_; }
  const TagSet& tags() const { return tags_; }
  std::vector<Parameter*> parameters();

  SentenceGraphs prepare(const ParsedSentence& s) const;
  ForwardResult forward(Tape& tape, const ParsedSentence& s, const SentenceGraphs& g,
                        int verb) const;
  // Combined objective for one instance, with its separate terms.
  struct LossTerms {
    Var logits, ce, r1, r2, r3, total;
  };
  LossTerms loss(Tape& tape, const ParsedSentence& s, const SentenceGraphs& g,
                 const TaggedInstance& inst) const;

  Tensor tag_probabilities(const ParsedSentence& s, int indicator_verb) const override;
  Tensor tag_probabilities(const ParsedSentence& s, const SentenceGraphs& g, int verb) const;

  // Parameters and metadata; `epoch` and `history` are left to the caller.
  Checkpoint snapshot() const;
  void load_tensors(const std::map<std::string, Tensor>& tensors);

 private:
  TrainConfig cfg_;
  TagSet tags_;
  Vocabulary vocab_;
  LabelInventory const_labels_;
  LabelInventory dep_labels_;
  EncoderParams enc_;
  GcnParams con_;
  GcnParams dep_;
  TagHead head_;
  std::shared_ptr<const PrecomputedEncoder> external_;
};

struct TrainResult {
  Checkpoint best;
  std::vector<EpochStats> history;
  std::vector<int> train_sentences;  // corpus positions
  std::vector<int> dev_sentences;
};

// Deterministic seeded split; dev gets floor(n * dev_fraction) sentences.
void split_corpus(std::size_t n, double dev_fraction, std::uint64_t seed,
                  std::vector<int>& train, std::vector<int>& dev);

// Throws EmptyCorpus and NonFiniteLoss.
TrainResult train(std::span<const ParsedSentence> corpus, const TrainConfig& cfg);

std::vector<SentenceTuples> predict(const Model& model, std::span<const ParsedSentence> corpus);
// Throws EmptyCorpus.
ScoreReport evaluate(const Model& model, std::span<const ParsedSentence> corpus, MatchMode mode);
ScoreReport evaluate_checkpoint(const Checkpoint& ckpt, std::span<const ParsedSentence> corpus,
                                MatchMode mode);
// Fraction of tokens whose argmax tag equals the gold tag, over all instances.
double token_accuracy(const Model& model, std::span<const ParsedSentence> corpus);

struct AblationRow {
  std::string name;
  bool use_gcn = true;
  bool use_r1 = true;
  bool use_r2 = true;
  bool use_r3 = true;
  ScoreReport exact;
  ScoreReport lexical;
};

// Full model and each single loss removed, with and without the GCN layers.
std::vector<AblationRow> ablation_grid();
// Trains every row on `train_corpus` and scores on `test_corpus`.
std::vector<AblationRow> run_ablation(std::span<const ParsedSentence> train_corpus,
                                      std::span<const ParsedSentence> test_corpus,
                                      const TrainConfig& cfg,
                                      std::vector<AblationRow> rows = ablation_grid());
std::string ablation_table(const std::vector<AblationRow>& rows);

struct GradcheckReport {
  double max_rel_error = 0.0;
  int instances = 0;
  int coordinates = 0;
};

// Central-difference check of the full combined loss with respect to every
// parameter, on `instances` seeded synthetic sentences of at most
// `max_tokens` words and freshly initialised d_h x d_l models. An instance
// whose error exceeds 1e-6 is rechecked with eps / 10 and keeps the smaller
// error; a ReLU kink inside the stencil moves out, a wrong gradient does not.
GradcheckReport random_gradcheck(std::uint64_t seed, int instances = 20, int max_tokens = 8,
                                 int d_h = 16, int d_l = 8, double eps = 1e-6);

}  // namespace smile
