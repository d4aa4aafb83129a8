#include "smile/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"
#include "smile/error.hpp"
#include "smile/eval.hpp"
#include "smile/syntax_graphs.hpp"
#include "smile/trainer.hpp"

namespace smile {

namespace {

struct CorpusFlags {
  std::string jsonl;
  std::string ptb;
  std::string conllu;
  std::string verbs;
  int max_arg = kDefaultMaxArg;

  void add_to(CLI::App* cmd, const std::string& what) {
    cmd->add_option("--corpus", jsonl, what + " (JSONL)");
    cmd->add_option("--ptb", ptb, "bracketed trees, one per line (with --conllu and --verbs)");
    cmd->add_option("--conllu", conllu, "CoNLL-U dependency rows");
    cmd->add_option("--verbs", verbs, "verb indices, one line per sentence");
  }

  std::vector<ParsedSentence> load() const {
    CorpusOptions opts;
    opts.max_arg = max_arg;
    if (!jsonl.empty()) return load_corpus(jsonl, opts);
    if (!ptb.empty() && !conllu.empty() && !verbs.empty())
      return load_corpus_files(ptb, conllu, verbs, opts);
    throw CLI::ValidationError("--corpus", "give --corpus, or all of --ptb, --conllu and --verbs");
  }
};

// Writes to `path`, or to `fallback` for "-" and the empty path.
class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty() && path != "-") {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw Error(ErrorKind::kIo, "cannot write " + path);
      stream_ = file_.get();
    }
  }
  std::ostream& get() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

// Flags shared by train and ablate; every set flag overrides the config file.
struct TrainFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> epochs;
  std::optional<int> workers;
  std::optional<int> batch_size;
  std::optional<double> lr;
  std::optional<std::string> variant;
  std::optional<int> max_distance;
  std::vector<std::string> sets;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--config", config, "key = value config file");
    cmd->add_option("--seed", seed, "random seed (falls back to SMILE_SEED, then the config)");
    cmd->add_option("--epochs", epochs);
    cmd->add_option("--workers", workers, "data-parallel instance workers")->check(CLI::PositiveNumber);
    cmd->add_option("--batch-size", batch_size)->check(CLI::PositiveNumber);
    cmd->add_option("--lr", lr);
    cmd->add_option("--variant", variant, "const-graph variant")
        ->check(CLI::IsMember({"base", "v1", "v2", "v3"}));
    cmd->add_option("--max-distance", max_distance, "const-graph pruning distance");
    cmd->add_option("--set", sets, "extra config override, key=value (repeatable)");
  }

  TrainConfig resolve() const {
    TrainConfig cfg = config.empty() ? TrainConfig{} : load_config(config);
    if (const char* env = std::getenv("SMILE_SEED"); env && *env)
      set_config_value(cfg, "seed", env);
    if (seed) cfg.seed = *seed;
    if (epochs) cfg.epochs = *epochs;
    if (workers) cfg.workers = *workers;
    if (batch_size) cfg.batch_size = *batch_size;
    if (lr) cfg.lr = *lr;
    if (variant) cfg.flatten.variant = parse_variant(*variant);
    if (max_distance) cfg.flatten.max_distance = *max_distance;
    for (const std::string& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
      set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    cfg.validate();
    return cfg;
  }
};

std::uint64_t seed_or_env(const std::optional<std::uint64_t>& flag, std::uint64_t fallback) {
  if (flag) return *flag;
  if (const char* env = std::getenv("SMILE_SEED"); env && *env) {
    TrainConfig tmp;
    set_config_value(tmp, "seed", env);
    return tmp.seed;
  }
  return fallback;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Syntactic-graph OpenIE tagger: graph building, training, extraction and scoring",
               "smile_oie"};
  app.require_subcommand(1);

  // build-graphs
  CorpusFlags bg_corpus;
  std::string bg_view = "both", bg_out, bg_format = "json", bg_variant = "base";
  int bg_max_distance = FlattenConfig{}.max_distance;
  CLI::App* bg = app.add_subcommand("build-graphs", "write const/dep graphs for every sentence");
  bg_corpus.add_to(bg, "sentences");
  bg->add_option("--view", bg_view)->check(CLI::IsMember({"const", "dep", "both"}));
  bg->add_option("--out", bg_out, "output file (default stdout)");
  bg->add_option("--format", bg_format)->check(CLI::IsMember({"json", "dot"}));
  bg->add_option("--variant", bg_variant)->check(CLI::IsMember({"base", "v1", "v2", "v3"}));
  bg->add_option("--max-distance", bg_max_distance)->check(CLI::NonNegativeNumber);

  // train
  CorpusFlags tr_corpus;
  TrainFlags tr_flags;
  std::string tr_ckpt;
  bool tr_verbose = false;
  CLI::App* tr = app.add_subcommand("train", "train a tagger and save the best dev checkpoint");
  tr_corpus.add_to(tr, "training sentences");
  tr_flags.add_to(tr);
  tr->add_option("--out-ckpt", tr_ckpt, "checkpoint path")->required();
  tr->add_flag("--verbose", tr_verbose, "print one line per epoch");

  // extract
  CorpusFlags ex_corpus;
  std::string ex_ckpt, ex_out;
  CLI::App* ex = app.add_subcommand("extract", "extract tuples with a trained checkpoint");
  ex_corpus.add_to(ex, "sentences");
  ex->add_option("--ckpt", ex_ckpt)->required();
  ex->add_option("--out", ex_out, "output JSONL (default stdout)");

  // score
  std::string sc_pred, sc_gold, sc_mode = "exact";
  bool sc_binary = false, sc_curve = false;
  CLI::App* sc = app.add_subcommand("score", "score predicted tuples against gold");
  sc->add_option("--pred", sc_pred, "extraction output or corpus JSONL")->required();
  sc->add_option("--gold", sc_gold, "corpus or extraction JSONL")->required();
  sc->add_option("--mode", sc_mode)->check(CLI::IsMember({"exact", "lexical"}));
  sc->add_flag("--binary", sc_binary, "score <ARG0, REL, rest> projections");
  sc->add_flag("--curve", sc_curve, "print the precision-recall curve as text");

  // gradcheck
  std::optional<std::uint64_t> gc_seed;
  int gc_size = 8, gc_instances = 20, gc_dh = 16, gc_dl = 8;
  double gc_tol = 1e-4;
  CLI::App* gc = app.add_subcommand("gradcheck", "finite-difference check of the combined loss");
  gc->add_option("--seed", gc_seed);
  gc->add_option("--size", gc_size, "max tokens per sentence")->check(CLI::Range(5, 64));
  gc->add_option("--instances", gc_instances)->check(CLI::PositiveNumber);
  gc->add_option("--d-h", gc_dh)->check(CLI::PositiveNumber);
  gc->add_option("--d-l", gc_dl)->check(CLI::PositiveNumber);
  gc->add_option("--tolerance", gc_tol)->check(CLI::PositiveNumber);

  // ablate
  CorpusFlags ab_corpus;
  TrainFlags ab_flags;
  std::string ab_grid = "full", ab_test, ab_out;
  CLI::App* ab = app.add_subcommand("ablate", "train and score the loss/GCN ablation grid");
  ab_corpus.add_to(ab, "training sentences");
  ab_flags.add_to(ab);
  ab->add_option("--grid", ab_grid, "full: 8 rows; losses: GCN rows only")
      ->check(CLI::IsMember({"full", "losses"}));
  ab->add_option("--test", ab_test, "test corpus JSONL (default: the training corpus)");
  ab->add_option("--out", ab_out, "table output (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (bg->parsed()) {
      FlattenConfig fc;
      fc.variant = parse_variant(bg_variant);
      fc.max_distance = bg_max_distance;
      Output o(bg_out, out);
      const GraphFormat fmt = parse_graph_format(bg_format);
      for (const ParsedSentence& s : bg_corpus.load()) {
        std::vector<SyntacticGraph> graphs;
        if (bg_view != "dep") graphs.push_back(build_const_graph(s, fc));
        if (bg_view != "const") graphs.push_back(build_dep_graph(s));
        for (const SyntacticGraph& g : graphs) {
          if (fmt == GraphFormat::kJson) {
            nlohmann::ordered_json j;
            j["sentence_id"] = s.id;
            j["graph"] = nlohmann::ordered_json::parse(export_graph(g, fmt));
            o.get() << j.dump() << "\n";
          } else {
            o.get() << "// sentence " << s.id << "\n" << export_graph(g, fmt);
          }
        }
      }
    } else if (tr->parsed()) {
      const TrainConfig cfg = tr_flags.resolve();
      const std::vector<ParsedSentence> corpus = tr_corpus.load();
      const TrainResult r = train(corpus, cfg);
      if (tr_verbose)
        for (const EpochStats& e : r.history)
          out << "epoch " << e.epoch << " loss " << e.loss << " train_acc " << e.train_accuracy
              << " dev_f1 " << e.dev_f1 << "\n";
      save_checkpoint(r.best, tr_ckpt);
      EpochStats best;
      for (const EpochStats& e : r.history)
        if (e.epoch == r.best.epoch) best = e;
      out << "trained " << r.history.size() << " epochs on " << r.train_sentences.size()
          << " sentences (" << r.dev_sentences.size() << " dev); best epoch " << r.best.epoch
          << " dev_f1 " << best.dev_f1 << " train_acc " << best.train_accuracy << "\n"
          << "checkpoint written to " << tr_ckpt << "\n";
    } else if (ex->parsed()) {
      const Model model = Model::from_checkpoint(load_checkpoint(ex_ckpt));
      const std::vector<ParsedSentence> corpus = ex_corpus.load();
      Output o(ex_out, out);
      for (const ParsedSentence& s : corpus) o.get() << extraction_json_line(s, extract(s, model)) << "\n";
    } else if (sc->parsed()) {
      const std::vector<SentenceTuples> gold = load_tuples(sc_gold);
      const std::vector<SentenceTuples> pred = load_tuples(sc_pred, gold);
      MatchOptions opts;
      opts.binary = sc_binary;
      const ScoreReport r = score(parse_match_mode(sc_mode), pred, gold, opts);
      out << report_json(r) << "\n";
      if (sc_curve) {
        out << std::setprecision(6);
        for (const CurvePoint& p : r.curve)
          out << "threshold " << p.threshold << " recall " << p.recall << " precision " << p.precision << "\n";
      }
    } else if (gc->parsed()) {
      const GradcheckReport r = random_gradcheck(seed_or_env(gc_seed, 0), gc_instances, gc_size, gc_dh, gc_dl);
      out << "max relative error " << std::scientific << std::setprecision(3) << r.max_rel_error
          << " over " << r.instances << " instances (" << r.coordinates << " coordinates)\n";
      if (!(r.max_rel_error < gc_tol)) {
        err << "gradient check failed: tolerance " << gc_tol << "\n";
        return kExitNumeric;
      }
    } else if (ab->parsed()) {
      const TrainConfig cfg = ab_flags.resolve();
      const std::vector<ParsedSentence> train_corpus = ab_corpus.load();
      const std::vector<ParsedSentence> test_corpus =
          ab_test.empty() ? train_corpus : load_corpus(ab_test, CorpusOptions{cfg.max_arg});
      std::vector<AblationRow> grid = ablation_grid();
      if (ab_grid == "losses") grid.resize(4);
      const std::vector<AblationRow> rows = run_ablation(train_corpus, test_corpus, cfg, grid);
      Output o(ab_out, out);
      o.get() << ablation_table(rows);
    }
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return is_numeric_error(e.kind()) ? kExitNumeric : kExitData;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}

}  // namespace smile
