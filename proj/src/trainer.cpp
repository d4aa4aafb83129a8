#include "smile/trainer.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "smile/error.hpp"
#include "smile/synthetic.hpp"

namespace smile {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void reject(const std::string& key, const std::string& value) {
  throw std::invalid_argument("bad value '" + value + "' for config key '" + key + "'");
}

long long parse_int(const std::string& key, const std::string& value) {
  long long v = 0;
  const char* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, v);
  if (ec != std::errc() || ptr != end) reject(key, value);
  return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  std::uint64_t v = 0;
  const char* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, v);
  if (ec != std::errc() || ptr != end) reject(key, value);
  return v;
}

double parse_double(const std::string& key, const std::string& value) {
  double v = 0.0;
  const char* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) reject(key, value);
  return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  reject(key, value);
}

std::string fmt_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

const char* encoder_name(EncoderKind k) {
  return k == EncoderKind::kToy ? "toy" : "external-precomputed";
}

using nlohmann::json;

json tensor_json(const Tensor& t) {
  return json{{"rows", t.rows()}, {"cols", t.cols()},
              {"data", std::vector<double>(t.data().begin(), t.data().end())}};
}

Tensor tensor_from_json(const json& j) {
  const int rows = j.at("rows").get<int>();
  const int cols = j.at("cols").get<int>();
  auto data = j.at("data").get<std::vector<double>>();
  if (rows < 0 || cols < 0 || data.size() != static_cast<size_t>(rows) * static_cast<size_t>(cols))
    throw Error(ErrorKind::kSchemaViolation, "tensor data does not match its shape");
  return Tensor(rows, cols, std::move(data));
}

// Runs fn(k) for k in [0, n) on up to `workers` threads; the first
// exception by index is rethrown.
template <typename Fn>
void parallel_for(int n, int workers, Fn fn) {
  std::vector<std::exception_ptr> errors(static_cast<size_t>(n));
  auto run = [&](int w, int stride) {
    for (int k = w; k < n; k += stride) {
      try {
        fn(k);
      } catch (...) {
        errors[static_cast<size_t>(k)] = std::current_exception();
      }
    }
  };
  const int threads = std::max(1, std::min(workers, n));
  if (threads == 1) {
    run(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) pool.emplace_back(run, w, threads);
    for (std::thread& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

class PreparedScorer : public InstanceScorer {
 public:
  PreparedScorer(const Model& m, const SentenceGraphs& g) : model_(m), graphs_(g) {}
  Tensor tag_probabilities(const ParsedSentence& s, int verb) const override {
    return model_.tag_probabilities(s, graphs_, verb);
  }

 private:
  const Model& model_;
  const SentenceGraphs& graphs_;
};

SentenceTuples predict_one(const Model& model, const ParsedSentence& s, const SentenceGraphs& g) {
  SentenceTuples out;
  out.id = s.id;
  out.tokens = s.tokens;
  for (const Tuple& t : extract(s, PreparedScorer(model, g)))
    out.tuples.push_back(to_text_tuple(t, s.tokens));
  return out;
}

}  // namespace

// --- config ---------------------------------------------------------------------

void TrainConfig::validate() const {
  if (d_h <= 0 || d_l <= 0) throw std::invalid_argument("d_h and d_l must be positive");
  if (!(lr > 0.0)) throw std::invalid_argument("lr must be positive");
  if (epochs < 0) throw std::invalid_argument("epochs must be non-negative");
  if (batch_size <= 0) throw std::invalid_argument("batch_size must be positive");
  if (weights.alpha < 0.0 || weights.beta < 0.0 || weights.gamma < 0.0)
    throw std::invalid_argument("loss weights must be non-negative");
  if (max_arg < 0) throw std::invalid_argument("max_arg must be non-negative");
  if (!(dev_fraction >= 0.0 && dev_fraction < 1.0))
    throw std::invalid_argument("dev_fraction must lie in [0, 1)");
  if (workers <= 0) throw std::invalid_argument("workers must be positive");
  if (flatten.max_distance < 0) throw std::invalid_argument("max_distance must be non-negative");
  if (encoder == EncoderKind::kPrecomputed && encoder_file.empty())
    throw std::invalid_argument("the precomputed encoder needs encoder_file");
}

LossWeights TrainConfig::effective_weights() const {
  LossWeights w = weights;
  if (!use_r1) w.alpha = 0.0;
  if (!use_r2) w.beta = 0.0;
  if (!use_r3) w.gamma = 0.0;
  return w;
}

void set_config_value(TrainConfig& cfg, const std::string& key, const std::string& raw) {
  const std::string value = trim(raw);
  if (key == "seed") cfg.seed = parse_u64(key, value);
  else if (key == "d_h") cfg.d_h = static_cast<int>(parse_int(key, value));
  else if (key == "d_l") cfg.d_l = static_cast<int>(parse_int(key, value));
  else if (key == "lr") cfg.lr = parse_double(key, value);
  else if (key == "epochs") cfg.epochs = static_cast<int>(parse_int(key, value));
  else if (key == "batch_size") cfg.batch_size = static_cast<int>(parse_int(key, value));
  else if (key == "alpha") cfg.weights.alpha = parse_double(key, value);
  else if (key == "beta") cfg.weights.beta = parse_double(key, value);
  else if (key == "gamma") cfg.weights.gamma = parse_double(key, value);
  else if (key == "variant") {
    try {
      cfg.flatten.variant = parse_variant(value);
    } catch (const Error&) {
      reject(key, value);
    }
  } else if (key == "max_distance") cfg.flatten.max_distance = static_cast<int>(parse_int(key, value));
  else if (key == "use_dep") cfg.use_dep = parse_bool(key, value);
  else if (key == "use_const") cfg.use_const = parse_bool(key, value);
  else if (key == "use_gcn") cfg.use_gcn = parse_bool(key, value);
  else if (key == "use_r1") cfg.use_r1 = parse_bool(key, value);
  else if (key == "use_r2") cfg.use_r2 = parse_bool(key, value);
  else if (key == "use_r3") cfg.use_r3 = parse_bool(key, value);
  else if (key == "max_arg") cfg.max_arg = static_cast<int>(parse_int(key, value));
  else if (key == "dev_fraction") cfg.dev_fraction = parse_double(key, value);
  else if (key == "mv_exclude_self_loops") cfg.mv_exclude_self_loops = parse_bool(key, value);
  else if (key == "workers") cfg.workers = static_cast<int>(parse_int(key, value));
  else if (key == "encoder") {
    if (value == "toy") cfg.encoder = EncoderKind::kToy;
    else if (value == "external-precomputed") cfg.encoder = EncoderKind::kPrecomputed;
    else reject(key, value);
  } else if (key == "encoder_file") cfg.encoder_file = value;
  else if (key == "stop_accuracy") cfg.stop_accuracy = parse_double(key, value);
  else throw std::invalid_argument("unknown config key '" + key + "'");
}

TrainConfig parse_config(std::istream& in, TrainConfig base) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
    set_config_value(base, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  base.validate();
  return base;
}

TrainConfig load_config(const std::string& path, TrainConfig base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path);
  return parse_config(in, std::move(base));
}

std::string config_to_text(const TrainConfig& c) {
  std::ostringstream out;
  auto b = [](bool v) { return v ? "true" : "false"; };
  out << "seed = " << c.seed << "\n"
      << "d_h = " << c.d_h << "\n"
      << "d_l = " << c.d_l << "\n"
      << "lr = " << fmt_double(c.lr) << "\n"
      << "epochs = " << c.epochs << "\n"
      << "batch_size = " << c.batch_size << "\n"
      << "alpha = " << fmt_double(c.weights.alpha) << "\n"
      << "beta = " << fmt_double(c.weights.beta) << "\n"
      << "gamma = " << fmt_double(c.weights.gamma) << "\n"
      << "variant = " << variant_name(c.flatten.variant) << "\n"
      << "max_distance = " << c.flatten.max_distance << "\n"
      << "use_dep = " << b(c.use_dep) << "\n"
      << "use_const = " << b(c.use_const) << "\n"
      << "use_gcn = " << b(c.use_gcn) << "\n"
      << "use_r1 = " << b(c.use_r1) << "\n"
      << "use_r2 = " << b(c.use_r2) << "\n"
      << "use_r3 = " << b(c.use_r3) << "\n"
      << "max_arg = " << c.max_arg << "\n"
      << "dev_fraction = " << fmt_double(c.dev_fraction) << "\n"
      << "mv_exclude_self_loops = " << b(c.mv_exclude_self_loops) << "\n"
      << "workers = " << c.workers << "\n"
      << "encoder = " << encoder_name(c.encoder) << "\n";
  if (!c.encoder_file.empty()) out << "encoder_file = " << c.encoder_file << "\n";
  out << "stop_accuracy = " << fmt_double(c.stop_accuracy) << "\n";
  return out.str();
}

// --- checkpoints ----------------------------------------------------------------

void save_checkpoint(const Checkpoint& ckpt, std::ostream& out) {
  nlohmann::ordered_json j;
  j["format"] = "smile-checkpoint";
  j["version"] = Checkpoint::kVersion;
  j["config"] = config_to_text(ckpt.config);
  j["epoch"] = ckpt.epoch;
  j["vocab"] = ckpt.vocab.tokens();
  j["const_labels"] = ckpt.const_labels.tokens();
  j["dep_labels"] = ckpt.dep_labels.tokens();
  nlohmann::ordered_json hist = nlohmann::ordered_json::array();
  for (const EpochStats& e : ckpt.history)
    hist.push_back({{"epoch", e.epoch}, {"loss", e.loss}, {"train_accuracy", e.train_accuracy},
                    {"dev_f1", e.dev_f1}});
  j["history"] = hist;
  nlohmann::ordered_json tensors = nlohmann::ordered_json::object();
  for (const auto& [name, t] : ckpt.tensors) tensors[name] = tensor_json(t);
  j["tensors"] = tensors;
  out << j.dump() << "\n";
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path);
  save_checkpoint(ckpt, out);
}

Checkpoint load_checkpoint(std::istream& in) {
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kSchemaViolation, std::string("checkpoint: ") + e.what());
  }
  try {
    if (j.at("format") != "smile-checkpoint")
      throw Error(ErrorKind::kSchemaViolation, "not a checkpoint file");
    if (j.at("version").get<int>() != Checkpoint::kVersion)
      throw Error(ErrorKind::kSchemaViolation,
                  "unsupported checkpoint version " + j.at("version").dump());
    Checkpoint c;
    std::istringstream cfg(j.at("config").get<std::string>());
    c.config = parse_config(cfg);
    c.epoch = j.at("epoch").get<int>();
    c.vocab = Vocabulary::from_tokens(j.at("vocab").get<std::vector<std::string>>());
    c.const_labels = Vocabulary::from_tokens(j.at("const_labels").get<std::vector<std::string>>());
    c.dep_labels = Vocabulary::from_tokens(j.at("dep_labels").get<std::vector<std::string>>());
    for (const json& e : j.at("history")) {
      c.history.push_back(EpochStats{e.at("epoch").get<int>(), e.at("loss").get<double>(),
                                     e.at("train_accuracy").get<double>(),
                                     e.at("dev_f1").get<double>()});
    }
    for (const auto& [name, t] : j.at("tensors").items()) c.tensors[name] = tensor_from_json(t);
    return c;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kSchemaViolation, std::string("checkpoint: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw Error(ErrorKind::kSchemaViolation, std::string("checkpoint config: ") + e.what());
  }
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path);
  return load_checkpoint(in);
}

// --- model ------------------------------------------------------------------------

Model::Model(const TrainConfig& cfg, Vocabulary vocab, LabelInventory const_labels,
             LabelInventory dep_labels)
    : cfg_(cfg),
      tags_(cfg.max_arg),
      vocab_(std::move(vocab)),
      const_labels_(std::move(const_labels)),
      dep_labels_(std::move(dep_labels)) {
  cfg_.validate();
  Rng rng(cfg_.seed);
  enc_ = EncoderParams::init(vocab_.size(), cfg_.d_h, rng);
  con_ = GcnParams::init("const", const_labels_.size(), cfg_.d_l, cfg_.d_h, rng);
  dep_ = GcnParams::init("dep", dep_labels_.size(), cfg_.d_l, cfg_.d_h, rng);
  head_ = TagHead::init(cfg_.d_h * (1 + cfg_.num_views()), tags_.size(), rng);
  if (cfg_.encoder == EncoderKind::kPrecomputed) {
    auto ext = std::make_shared<PrecomputedEncoder>(PrecomputedEncoder::load_file(cfg_.encoder_file));
    if (ext->width() != cfg_.d_h)
      throw Error(ErrorKind::kShapeMismatch, "precomputed vectors have width " +
                                                 std::to_string(ext->width()) + ", d_h is " +
                                                 std::to_string(cfg_.d_h));
    external_ = std::move(ext);
  }
}

Model Model::from_checkpoint(const Checkpoint& ckpt) {
  Model m(ckpt.config, ckpt.vocab, ckpt.const_labels, ckpt.dep_labels);
  m.load_tensors(ckpt.tensors);
  return m;
}

std::vector<Parameter*> Model::parameters() {
  std::vector<Parameter*> out;
  if (!external_)
    for (Parameter* p : enc_.parameters()) out.push_back(p);
  if (cfg_.use_const)
    for (Parameter* p : con_.parameters()) out.push_back(p);
  if (cfg_.use_dep)
    for (Parameter* p : dep_.parameters()) out.push_back(p);
  for (Parameter* p : head_.parameters()) out.push_back(p);
  return out;
}

Checkpoint Model::snapshot() const {
  Checkpoint c;
  c.config = cfg_;
  c.vocab = vocab_;
  c.const_labels = const_labels_;
  c.dep_labels = dep_labels_;
  for (Parameter* p : const_cast<Model*>(this)->parameters()) c.tensors[p->name] = p->value;
  return c;
}

void Model::load_tensors(const std::map<std::string, Tensor>& tensors) {
  for (Parameter* p : parameters()) {
    auto it = tensors.find(p->name);
    if (it == tensors.end())
      throw Error(ErrorKind::kSchemaViolation, "checkpoint lacks tensor " + p->name);
    if (!it->second.same_shape(p->value))
      throw Error(ErrorKind::kShapeMismatch, "tensor " + p->name + " has the wrong shape");
    p->value = it->second;
    p->zero_grad();
  }
}

SentenceGraphs Model::prepare(const ParsedSentence& s) const {
  SentenceGraphs g;
  g.ids = token_ids(vocab_, s);
  if (cfg_.use_const) {
    g.con = build_const_graph(s, cfg_.flatten);
    g.adj_con = adjacency_tensor(*g.con);
  }
  if (cfg_.use_dep) {
    g.dep = build_dep_graph(s);
    g.adj_dep = adjacency_tensor(*g.dep);
  }
  return g;
}

ForwardResult Model::forward(Tape& tape, const ParsedSentence& s, const SentenceGraphs& g,
                             int verb) const {
  ForwardResult r;
  const EncoderInput in{&s, g.ids, verb};
  r.h_ctx = external_ ? external_->encode(tape, in) : WindowEncoder(enc_).encode(tape, in);
  if (g.con) {
    Var l = node_label_embed_const(tape, con_, *g.con, const_labels_);
    r.h_con = cfg_.use_gcn ? gcn_layer(tape, *g.con, r.h_ctx, l, con_).hidden
                           : label_projection(tape, l, con_);
  }
  if (g.dep) {
    Var l = node_label_embed_dep(tape, dep_, *g.dep, dep_labels_);
    r.h_dep = cfg_.use_gcn ? gcn_layer(tape, *g.dep, r.h_ctx, l, dep_).hidden
                           : label_projection(tape, l, dep_);
  }
  r.logits = tag_logits(tape, head_, aggregate(r.h_ctx, r.h_con, r.h_dep));
  return r;
}

Model::LossTerms Model::loss(Tape& tape, const ParsedSentence& s, const SentenceGraphs& g,
                             const TaggedInstance& inst) const {
  ForwardResult f = forward(tape, s, g, inst.indicator_verb);
  LossTerms t;
  t.logits = f.logits;
  t.ce = tagging_loss(f.logits, inst.labels);
  const LossWeights w = cfg_.effective_weights();
  const bool both = f.h_con.valid() && f.h_dep.valid();
  if (both && w.alpha != 0.0)
    t.r1 = loss_r1(f.h_con, f.h_dep, g.adj_con, g.adj_dep, cfg_.mv_exclude_self_loops);
  if (both && w.beta != 0.0) t.r2 = loss_r2(f.h_con, f.h_dep);
  if (both && w.gamma != 0.0)
    t.r3 = loss_r3(f.h_con, f.h_dep, g.adj_con, g.adj_dep, cfg_.mv_exclude_self_loops);
  t.total = combined_loss(t.ce, t.r1, t.r2, t.r3, w);
  return t;
}

Tensor Model::tag_probabilities(const ParsedSentence& s, const SentenceGraphs& g, int verb) const {
  Tape tape;
  return softmax_rows(forward(tape, s, g, verb).logits.value());
}

Tensor Model::tag_probabilities(const ParsedSentence& s, int indicator_verb) const {
  return tag_probabilities(s, prepare(s), indicator_verb);
}

// --- training -----------------------------------------------------------------------

void split_corpus(std::size_t n, double dev_fraction, std::uint64_t seed, std::vector<int>& train,
                  std::vector<int>& dev) {
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed ^ 0x5eedULL);
  rng.shuffle(order);
  const auto n_dev = static_cast<std::size_t>(std::floor(static_cast<double>(n) * dev_fraction));
  dev.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_dev));
  train.assign(order.begin() + static_cast<std::ptrdiff_t>(n_dev), order.end());
  std::sort(dev.begin(), dev.end());
  std::sort(train.begin(), train.end());
}

TrainResult train(std::span<const ParsedSentence> corpus, const TrainConfig& cfg) {
  cfg.validate();
  if (corpus.empty()) throw Error(ErrorKind::kEmptyCorpus, "training corpus is empty");
  TrainResult result;
  split_corpus(corpus.size(), cfg.dev_fraction, cfg.seed, result.train_sentences,
               result.dev_sentences);

  std::vector<ParsedSentence> train_set;
  for (int i : result.train_sentences) train_set.push_back(corpus[static_cast<size_t>(i)]);
  Model model(cfg, build_vocabulary(train_set), build_const_inventory(train_set),
              build_dep_inventory(train_set));

  std::vector<SentenceGraphs> graphs(corpus.size());
  std::vector<std::pair<int, TaggedInstance>> instances;
  for (int i : result.train_sentences) {
    graphs[static_cast<size_t>(i)] = model.prepare(corpus[static_cast<size_t>(i)]);
    for (TaggedInstance& inst : expand_instances(corpus[static_cast<size_t>(i)]))
      instances.emplace_back(i, std::move(inst));
  }
  for (int i : result.dev_sentences) graphs[static_cast<size_t>(i)] = model.prepare(corpus[static_cast<size_t>(i)]);
  if (instances.empty()) throw Error(ErrorKind::kEmptyCorpus, "no training instances (no verbs)");

  std::vector<SentenceTuples> dev_gold;
  for (int i : result.dev_sentences) dev_gold.push_back(gold_tuples(corpus[static_cast<size_t>(i)]));

  const std::vector<Parameter*> params = model.parameters();
  AdamState adam;
  AdamConfig adam_cfg;
  adam_cfg.lr = cfg.lr;
  Rng shuffle_rng(cfg.seed + 1);
  std::vector<size_t> order(instances.size());
  std::iota(order.begin(), order.end(), 0);

  struct InstanceResult {
    std::vector<Tensor> grads;
    double loss = 0.0;
    int correct = 0;
    int tokens = 0;
  };

  double best_f1 = -1.0;
  result.best = model.snapshot();
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double loss_sum = 0.0;
    long correct = 0, tokens = 0;
    for (size_t start = 0; start < order.size(); start += static_cast<size_t>(cfg.batch_size)) {
      const int b = static_cast<int>(std::min(order.size() - start, static_cast<size_t>(cfg.batch_size)));
      std::vector<InstanceResult> out(static_cast<size_t>(b));
      parallel_for(b, cfg.workers, [&](int k) {
        const auto& [si, inst] = instances[order[start + static_cast<size_t>(k)]];
        const ParsedSentence& s = corpus[static_cast<size_t>(si)];
        InstanceResult& r = out[static_cast<size_t>(k)];
        try {
          Tape tape;
          Model::LossTerms t = model.loss(tape, s, graphs[static_cast<size_t>(si)], inst);
          r.loss = t.total.value().item();
          const std::vector<int> pred = argmax_tags(t.logits.value());
          for (size_t i = 0; i < pred.size(); ++i) r.correct += pred[i] == inst.labels[i] ? 1 : 0;
          r.tokens = static_cast<int>(pred.size());
          tape.backward(t.total);
          for (const Parameter* p : params) {
            const Tensor* g = tape.param_grad(*p);
            r.grads.push_back(g ? *g : Tensor());
          }
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::kNonFiniteValue) throw;
          throw Error(ErrorKind::kNonFiniteLoss, "epoch " + std::to_string(epoch) + ", sentence " +
                                                     s.id + ", verb " +
                                                     std::to_string(inst.indicator_verb) + ": " +
                                                     e.what());
        }
      });
      // fixed reduction order: instance position in the batch
      for (Parameter* p : params) p->zero_grad();
      const double scale = 1.0 / b;
      for (const InstanceResult& r : out) {
        loss_sum += r.loss;
        correct += r.correct;
        tokens += r.tokens;
        for (size_t pi = 0; pi < params.size(); ++pi) {
          const Tensor& g = r.grads[pi];
          if (g.size() == 0) continue;
          Tensor& acc = params[pi]->grad;
          for (size_t k = 0; k < g.size(); ++k) acc[k] += scale * g[k];
        }
      }
      adam_step(params, adam, adam_cfg);
      for (const Parameter* p : params)
        if (!p->value.all_finite())
          throw Error(ErrorKind::kNonFiniteLoss,
                      "parameter " + p->name + " became non-finite at epoch " + std::to_string(epoch));
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.loss = loss_sum / static_cast<double>(instances.size());
    stats.train_accuracy = tokens == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(tokens);
    if (!dev_gold.empty()) {
      std::vector<SentenceTuples> pred;
      for (int i : result.dev_sentences)
        pred.push_back(predict_one(model, corpus[static_cast<size_t>(i)], graphs[static_cast<size_t>(i)]));
      stats.dev_f1 = exact_match_score(pred, dev_gold).f1;
    }
    result.history.push_back(stats);
    if (dev_gold.empty() || stats.dev_f1 >= best_f1) {
      best_f1 = stats.dev_f1;
      result.best = model.snapshot();
      result.best.epoch = epoch;
    }
    if (cfg.stop_accuracy > 0.0 && stats.train_accuracy >= cfg.stop_accuracy) break;
  }
  result.best.history = result.history;
  return result;
}

std::vector<SentenceTuples> predict(const Model& model, std::span<const ParsedSentence> corpus) {
  std::vector<SentenceTuples> out;
  out.reserve(corpus.size());
  for (const ParsedSentence& s : corpus) out.push_back(predict_one(model, s, model.prepare(s)));
  return out;
}

ScoreReport evaluate(const Model& model, std::span<const ParsedSentence> corpus, MatchMode mode) {
  if (corpus.empty()) throw Error(ErrorKind::kEmptyCorpus, "evaluation corpus is empty");
  return score(mode, predict(model, corpus), gold_tuples(corpus));
}

ScoreReport evaluate_checkpoint(const Checkpoint& ckpt, std::span<const ParsedSentence> corpus,
                                MatchMode mode) {
  if (corpus.empty()) throw Error(ErrorKind::kEmptyCorpus, "evaluation corpus is empty");
  return evaluate(Model::from_checkpoint(ckpt), corpus, mode);
}

double token_accuracy(const Model& model, std::span<const ParsedSentence> corpus) {
  long correct = 0, total = 0;
  for (const ParsedSentence& s : corpus) {
    const SentenceGraphs g = model.prepare(s);
    for (const TaggedInstance& inst : expand_instances(s)) {
      const std::vector<int> pred = argmax_tags(model.tag_probabilities(s, g, inst.indicator_verb));
      for (size_t i = 0; i < pred.size(); ++i) correct += pred[i] == inst.labels[i] ? 1 : 0;
      total += static_cast<long>(pred.size());
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

// --- ablation -------------------------------------------------------------------------

std::vector<AblationRow> ablation_grid() {
  std::vector<AblationRow> rows;
  for (bool gcn : {true, false}) {
    const std::string base = gcn ? "full" : "w/o GCN";
    rows.push_back(AblationRow{base, gcn, true, true, true, {}, {}});
    rows.push_back(AblationRow{base + " -R1", gcn, false, true, true, {}, {}});
    rows.push_back(AblationRow{base + " -R2", gcn, true, false, true, {}, {}});
    rows.push_back(AblationRow{base + " -R3", gcn, true, true, false, {}, {}});
  }
  return rows;
}

std::vector<AblationRow> run_ablation(std::span<const ParsedSentence> train_corpus,
                                      std::span<const ParsedSentence> test_corpus,
                                      const TrainConfig& cfg, std::vector<AblationRow> rows) {
  if (test_corpus.empty()) throw Error(ErrorKind::kEmptyCorpus, "ablation test corpus is empty");
  for (AblationRow& row : rows) {
    TrainConfig c = cfg;
    c.use_gcn = row.use_gcn;
    c.use_r1 = row.use_r1;
    c.use_r2 = row.use_r2;
    c.use_r3 = row.use_r3;
    const Model model = Model::from_checkpoint(train(train_corpus, c).best);
    const std::vector<SentenceTuples> pred = predict(model, test_corpus);
    const std::vector<SentenceTuples> gold = gold_tuples(test_corpus);
    row.exact = exact_match_score(pred, gold);
    row.lexical = lexical_match_score(pred, gold);
  }
  return rows;
}

std::string ablation_table(const std::vector<AblationRow>& rows) {
  std::ostringstream out;
  out << std::left << std::setw(14) << "model" << std::right << std::setw(9) << "exact P"
      << std::setw(9) << "exact R" << std::setw(9) << "exact F1" << std::setw(9) << "AUC"
      << std::setw(9) << "lex F1" << "\n";
  out << std::fixed << std::setprecision(4);
  for (const AblationRow& r : rows) {
    out << std::left << std::setw(14) << r.name << std::right << std::setw(9) << r.exact.precision
        << std::setw(9) << r.exact.recall << std::setw(9) << r.exact.f1 << std::setw(9)
        << r.exact.auc << std::setw(9) << r.lexical.f1 << "\n";
  }
  return out.str();
}

// --- gradient check ---------------------------------------------------------------

GradcheckReport random_gradcheck(std::uint64_t seed, int instances, int max_tokens, int d_h, int d_l,
                                 double eps) {
  if (instances <= 0 || max_tokens < 5)
    throw std::invalid_argument("gradcheck needs instances > 0 and max_tokens >= 5");
  Rng rng(seed);
  GradcheckReport report;
  for (int k = 0; k < instances; ++k) {
    ParsedSentence s;
    do {
      const auto kind = static_cast<SyntheticTemplate>(rng.below(kNumSyntheticTemplates));
      s = synthetic_sentence(kind, rng.next(), "gradcheck-" + std::to_string(k));
    } while (s.size() > max_tokens);

    TrainConfig cfg;
    cfg.seed = rng.next();
    cfg.d_h = d_h;
    cfg.d_l = d_l;
    const std::vector<ParsedSentence> one{s};
    Model model(cfg, build_vocabulary(one), build_const_inventory(one), build_dep_inventory(one));
    const SentenceGraphs g = model.prepare(s);
    const std::vector<TaggedInstance> insts = expand_instances(s);
    const TaggedInstance& inst = insts[rng.below(insts.size())];
    std::vector<Parameter*> params = model.parameters();
    auto loss = [&](Tape& tape) { return model.loss(tape, s, g, inst).total; };
    double err = grad_check(loss, params, eps);
    if (err > 1e-6) err = std::min(err, grad_check(loss, params, eps / 10.0));
    report.max_rel_error = std::max(report.max_rel_error, err);
    for (const Parameter* p : params) report.coordinates += static_cast<int>(p->value.size());
    ++report.instances;
  }
  return report;
}

}  // namespace smile
