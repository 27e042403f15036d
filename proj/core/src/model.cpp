#include "chordgraph/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "chordgraph/adamw.hpp"
#include "chordgraph/ops.hpp"

namespace chordgraph {

using ad::Tensor;

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError("config key '" + std::string(key) + "': cannot parse '" + std::string(value) + "'");
  }
  return out;
}

double parse_double(std::string_view key, std::string_view value) {
  // from_chars for double is missing from older standard libraries.
  std::string s(value);
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(s, &used);
  } catch (const std::exception &) {
    used = 0;
  }
  if (used != s.size() || s.empty() || !std::isfinite(out)) {
    throw ConfigError("config key '" + std::string(key) + "': cannot parse '" + s + "'");
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("config key '" + std::string(key) + "': expected true or false, got '" + std::string(value) + "'");
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

constexpr std::string_view kBaseKind = "chordgnn";
constexpr std::string_view kPostKind = "postprocessor";

std::string checkpoint_metadata(std::string_view kind, const ModelConfig &config) {
  return "kind=" + std::string(kind) + "\n" + config.to_text();
}

ModelConfig config_from_metadata(const std::string &metadata, std::string_view kind) {
  const std::string expected = "kind=" + std::string(kind) + "\n";
  if (metadata.compare(0, expected.size(), expected) != 0) {
    throw CheckpointError("checkpoint does not hold a " + std::string(kind));
  }
  try {
    return ModelConfig::parse(std::string_view(metadata).substr(expected.size()));
  } catch (const ConfigError &e) {
    throw CheckpointError(std::string("checkpoint metadata: ") + e.what());
  }
}

bool rn_match(const TaskClasses &a, const TaskClasses &b) {
  return FieldSelector::of(FieldSelector::Kind::ConventionalRN).equal(a, b);
}

std::vector<std::size_t> task_targets(const std::vector<TaskClasses> &targets, std::size_t t) {
  std::vector<std::size_t> out;
  out.reserve(targets.size());
  for (const auto &c : targets) out.push_back(c[t]);
  return out;
}

std::vector<Tensor> make_gammas() {
  std::vector<Tensor> g;
  for (std::size_t t = 0; t < kTaskCount; ++t) g.push_back(Tensor::scalar(1.0, true));
  return g;
}

void append_gammas(ad::NamedTensors &out, const std::vector<Tensor> &gammas) {
  for (std::size_t t = 0; t < kTaskCount; ++t) out.emplace_back("gamma." + task_registry()[t].name(), gammas[t]);
}

std::vector<std::size_t> shuffled(std::size_t n, Rng &rng) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  return order;
}

std::vector<std::vector<double>> snapshot(const ad::NamedTensors &params) {
  std::vector<std::vector<double>> out;
  for (const auto &[name, t] : params) out.emplace_back(t.values().begin(), t.values().end());
  return out;
}

void restore(ad::NamedTensors &params, const std::vector<std::vector<double>> &values) {
  for (std::size_t i = 0; i < params.size(); ++i) {
    std::copy(values[i].begin(), values[i].end(), params[i].second.values().begin());
  }
}

std::array<double, kTaskCount> gamma_values(const std::vector<Tensor> &g) {
  std::array<double, kTaskCount> out{};
  for (std::size_t t = 0; t < kTaskCount; ++t) out[t] = g[t].item();
  return out;
}

/// Shared epoch loop: `step_loss` runs one training-mode forward on a piece
/// (under an active tape) and returns its loss; `eval_fn` scores a split.
template <typename StepLoss, typename EvalFn>
TrainResult run_training(ad::NamedTensors params, const ad::AdamWConfig &opt_cfg, std::size_t epochs,
                         std::size_t batch_pieces, std::size_t patience, Rng &rng, std::span<const Example> train_set,
                         std::span<const Example> val_set, StepLoss step_loss, EvalFn eval_fn,
                         const std::vector<Tensor> &gammas, const EpochCallback &on_epoch) {
  if (train_set.empty()) throw std::invalid_argument("training corpus is empty");
  if (batch_pieces == 0) throw std::invalid_argument("batch_pieces must be positive");
  ad::AdamW opt(params, opt_cfg);
  TrainResult result;
  result.initial_loss = eval_fn(train_set).loss;
  double best_val = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> best_params;
  std::size_t stale = 0;
  for (std::size_t epoch = 1; epoch <= epochs; ++epoch) {
    const auto order = shuffled(train_set.size(), rng);
    double loss_sum = 0.0;
    opt.zero_grad();
    for (std::size_t start = 0; start < order.size(); start += batch_pieces) {
      const std::size_t stop = std::min(order.size(), start + batch_pieces);
      const double inv = 1.0 / static_cast<double>(stop - start);
      for (std::size_t i = start; i < stop; ++i) {
        const Example &ex = train_set[order[i]];
        ad::Tape tape;
        ad::TapeScope scope(tape);
        Tensor loss;
        try {
          loss = step_loss(ex);
        } catch (const std::domain_error &e) {
          throw TrainingDiverged("epoch " + std::to_string(epoch) + ", piece '" + ex.name + "': " + e.what());
        }
        if (!std::isfinite(loss.item())) {
          throw TrainingDiverged("epoch " + std::to_string(epoch) + ", piece '" + ex.name + "': loss is not finite");
        }
        loss_sum += loss.item();
        Tensor scaled = ad::scale(loss, inv);
        tape.backward(scaled);
      }
      opt.step();
      opt.zero_grad();
    }
    EpochLog log;
    log.epoch = epoch;
    log.train_loss = loss_sum / static_cast<double>(train_set.size());
    Evaluation tr;
    try {
      tr = eval_fn(train_set);
    } catch (const std::domain_error &e) {
      throw TrainingDiverged("epoch " + std::to_string(epoch) + " evaluation: " + e.what());
    }
    log.train_eval_loss = tr.loss;
    log.train_rn_accuracy = tr.rn_accuracy;
    log.gammas = gamma_values(gammas);
    bool stop = false;
    if (!val_set.empty()) {
      const Evaluation va = eval_fn(val_set);
      log.val_loss = va.loss;
      log.val_rn_accuracy = va.rn_accuracy;
      if (va.loss < best_val) {
        best_val = va.loss;
        best_params = snapshot(params);
        result.best_epoch = epoch;
        stale = 0;
      } else if (patience > 0 && ++stale >= patience) {
        stop = true;
      }
    } else {
      result.best_epoch = epoch;
    }
    result.log.push_back(log);
    if (on_epoch) on_epoch(log);
    if (stop) {
      result.early_stopped = true;
      break;
    }
  }
  if (!best_params.empty()) restore(params, best_params);
  return result;
}

}  // namespace

ModelConfig ModelConfig::parse(std::string_view text) {
  ModelConfig c;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key == "hidden_size") c.hidden_size = parse_number<std::size_t>(key, value);
    else if (key == "lr") c.lr = parse_double(key, value);
    else if (key == "weight_decay") c.weight_decay = parse_double(key, value);
    else if (key == "dropout") c.dropout = parse_double(key, value);
    else if (key == "sage_layers") c.sage_layers = parse_number<std::size_t>(key, value);
    else if (key == "shared_weights") c.shared_weights = parse_bool(key, value);
    else if (key == "reverse_during") c.reverse_during = parse_bool(key, value);
    else if (key == "bidirectional_gru") c.bidirectional_gru = parse_bool(key, value);
    else if (key == "init_gain") c.init_gain = parse_double(key, value);
    else if (key == "epochs") c.epochs = parse_number<std::size_t>(key, value);
    else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "batch_pieces") c.batch_pieces = parse_number<std::size_t>(key, value);
    else if (key == "patience") c.patience = parse_number<std::size_t>(key, value);
    else if (key == "post_hidden") c.post_hidden = parse_number<std::size_t>(key, value);
    else if (key == "post_epochs") c.post_epochs = parse_number<std::size_t>(key, value);
    else if (key == "post_lr") c.post_lr = parse_double(key, value);
    else if (key == "post_dropout") c.post_dropout = parse_double(key, value);
    else if (key == "post_input_scale") c.post_input_scale = parse_double(key, value);
    else if (key == "post_noisy_inputs") c.post_noisy_inputs = parse_bool(key, value);
    else throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "'");
  }
  if (c.hidden_size == 0 || c.post_hidden == 0) throw ConfigError("hidden sizes must be positive");
  if (c.sage_layers == 0) throw ConfigError("sage_layers must be positive");
  if (c.bidirectional_gru && c.hidden_size % 2 != 0) throw ConfigError("bidirectional_gru needs an even hidden_size");
  if (c.batch_pieces == 0) throw ConfigError("batch_pieces must be positive");
  if (c.dropout < 0.0 || c.dropout >= 1.0 || c.post_dropout < 0.0 || c.post_dropout >= 1.0) {
    throw ConfigError("dropout must lie in [0, 1)");
  }
  if (!(c.init_gain > 0.0) || !std::isfinite(c.init_gain)) throw ConfigError("init_gain must be positive");
  if (!(c.post_input_scale > 0.0) || !std::isfinite(c.post_input_scale)) {
    throw ConfigError("post_input_scale must be positive");
  }
  if (c.lr < 0.0 || c.post_lr < 0.0 || c.weight_decay < 0.0) throw ConfigError("lr and weight_decay must be >= 0");
  return c;
}

ModelConfig ModelConfig::load(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string ModelConfig::to_text() const {
  std::ostringstream os;
  os << "hidden_size=" << hidden_size << '\n'
     << "lr=" << format_double(lr) << '\n'
     << "weight_decay=" << format_double(weight_decay) << '\n'
     << "dropout=" << format_double(dropout) << '\n'
     << "sage_layers=" << sage_layers << '\n'
     << "shared_weights=" << (shared_weights ? "true" : "false") << '\n'
     << "reverse_during=" << (reverse_during ? "true" : "false") << '\n'
     << "bidirectional_gru=" << (bidirectional_gru ? "true" : "false") << '\n'
     << "init_gain=" << format_double(init_gain) << '\n'
     << "epochs=" << epochs << '\n'
     << "seed=" << seed << '\n'
     << "batch_pieces=" << batch_pieces << '\n'
     << "patience=" << patience << '\n'
     << "post_hidden=" << post_hidden << '\n'
     << "post_epochs=" << post_epochs << '\n'
     << "post_lr=" << format_double(post_lr) << '\n'
     << "post_dropout=" << format_double(post_dropout) << '\n'
     << "post_input_scale=" << format_double(post_input_scale) << '\n'
     << "post_noisy_inputs=" << (post_noisy_inputs ? "true" : "false") << '\n';
  return os.str();
}

EncoderConfig ModelConfig::encoder() const {
  EncoderConfig e;
  e.input_dim = kFeatureDim;
  e.hidden_size = hidden_size;
  e.sage_layers = sage_layers;
  e.shared_weights = shared_weights;
  e.reverse_during = reverse_during;
  e.bidirectional_gru = bidirectional_gru;
  e.dropout = dropout;
  return e;
}

TaskHead::TaskHead(std::size_t in, std::size_t width, std::size_t vocab, Rng &rng)
    : hidden(in, width, rng), output(width, vocab, rng) {}

Tensor TaskHead::forward(const Tensor &x) const { return output.forward(ad::relu(hidden.forward(x))); }

ad::NamedTensors TaskHead::parameters() const {
  ad::NamedTensors out;
  ad::append_prefixed(out, "hidden", hidden.parameters());
  ad::append_prefixed(out, "output", output.parameters());
  return out;
}

ChordGNN::ChordGNN(const ModelConfig &config, Rng &rng) : config_(config), encoder_(config.encoder(), rng) {
  for (const auto &spec : task_registry()) heads_.emplace_back(config.hidden_size, config.hidden_size, spec.size(), rng);
  if (config.init_gain != 1.0) {
    // Biases start at zero, so scaling everything only touches weights.
    ad::NamedTensors weights = encoder_.parameters();
    for (const auto &head : heads_) ad::append_prefixed(weights, "head", head.parameters());
    for (auto &[name, t] : weights) {
      for (double &v : t.values()) v *= config.init_gain;
    }
  }
  gammas_ = make_gammas();
}

TaskLogits ChordGNN::forward(const ScoreGraph &graph, bool training, Rng &rng) const {
  EncoderOutput enc = encoder_.forward(graph, training, rng);
  TaskLogits out;
  out.onsets = std::move(enc.onsets);
  for (const auto &head : heads_) out.logits.push_back(head.forward(enc.sequence));
  return out;
}

ad::NamedTensors ChordGNN::parameters() const {
  ad::NamedTensors out;
  ad::append_prefixed(out, "encoder", encoder_.parameters());
  for (std::size_t t = 0; t < heads_.size(); ++t) {
    ad::append_prefixed(out, "head." + task_registry()[t].name(), heads_[t].parameters());
  }
  append_gammas(out, gammas_);
  return out;
}

Checkpoint ChordGNN::to_checkpoint() const {
  return make_checkpoint(parameters(), checkpoint_metadata(kBaseKind, config_));
}

ChordGNN ChordGNN::from_checkpoint(const Checkpoint &ckpt) {
  Rng rng(0);
  ChordGNN model(config_from_metadata(ckpt.metadata, kBaseKind), rng);
  auto params = model.parameters();
  restore_parameters(ckpt, params);
  return model;
}

Tensor weighted_loss(std::span<const Tensor> task_losses, std::span<const Tensor> gammas) {
  if (task_losses.size() != gammas.size() || task_losses.empty()) {
    throw std::invalid_argument("weighted_loss: need one gamma per task loss");
  }
  Tensor total;
  for (std::size_t t = 0; t < task_losses.size(); ++t) {
    const Tensor g2 = ad::mul(gammas[t], gammas[t]);
    const Tensor denom = ad::scale(ad::add_scalar(g2, kGammaEpsilon), 2.0);
    const Tensor term = ad::add(ad::div(task_losses[t], denom), ad::log(ad::add_scalar(g2, 1.0)));
    total = total.defined() ? ad::add(total, term) : term;
  }
  return total;
}

LossBreakdown total_loss(std::span<const Tensor> logits, const std::vector<TaskClasses> &targets,
                         std::span<const Tensor> gammas) {
  if (logits.size() != kTaskCount || gammas.size() != kTaskCount) {
    throw std::invalid_argument("total_loss: expected " + std::to_string(kTaskCount) + " tasks");
  }
  LossBreakdown out;
  std::vector<Tensor> losses;
  for (std::size_t t = 0; t < kTaskCount; ++t) {
    if (logits[t].rows() != targets.size()) {
      throw std::invalid_argument("total_loss: " + std::to_string(targets.size()) + " targets for " +
                                  std::to_string(logits[t].rows()) + " onsets");
    }
    const auto tt = task_targets(targets, t);
    losses.push_back(ad::cross_entropy(logits[t], tt));
    out.task_losses[t] = losses.back().item();
  }
  out.total = weighted_loss(losses, gammas);
  return out;
}

std::size_t total_vocabulary_size() {
  std::size_t n = 0;
  for (const auto &spec : task_registry()) n += spec.size();
  return n;
}

PostProcessor::PostProcessor(const ModelConfig &config, Rng &rng)
    : config_(config), lstm_(total_vocabulary_size(), config.post_hidden, rng) {
  for (const auto &spec : task_registry()) outputs_.emplace_back(2 * config.post_hidden, spec.size(), rng);
  gammas_ = make_gammas();
}

PostProcessor PostProcessor::zeros(const ModelConfig &config) {
  PostProcessor p;
  p.config_ = config;
  p.lstm_ = ad::BiLstmLayer::zeros(total_vocabulary_size(), config.post_hidden);
  for (const auto &spec : task_registry()) p.outputs_.push_back(ad::Linear::zeros(2 * config.post_hidden, spec.size()));
  p.gammas_ = make_gammas();
  return p;
}

std::vector<Tensor> PostProcessor::forward(std::span<const Tensor> base_logits, bool training, Rng &rng) const {
  if (base_logits.size() != kTaskCount) throw std::invalid_argument("post-processor expects one logit matrix per task");
  std::vector<Tensor> inputs;
  for (const Tensor &l : base_logits) inputs.push_back(l.detach());
  Tensor x = ad::concat_cols(inputs);
  if (config_.post_input_scale != 1.0) x = ad::scale(x, config_.post_input_scale);
  const Tensor h = ad::dropout(lstm_.forward(x), config_.post_dropout, training, rng);
  std::vector<Tensor> out;
  for (const auto &o : outputs_) out.push_back(o.forward(h));
  return out;
}

ad::NamedTensors PostProcessor::parameters() const {
  ad::NamedTensors out;
  ad::append_prefixed(out, "lstm", lstm_.parameters());
  for (std::size_t t = 0; t < outputs_.size(); ++t) {
    ad::append_prefixed(out, "output." + task_registry()[t].name(), outputs_[t].parameters());
  }
  append_gammas(out, gammas_);
  return out;
}

Checkpoint PostProcessor::to_checkpoint() const {
  return make_checkpoint(parameters(), checkpoint_metadata(kPostKind, config_));
}

PostProcessor PostProcessor::from_checkpoint(const Checkpoint &ckpt) {
  Rng rng(0);
  PostProcessor post(config_from_metadata(ckpt.metadata, kPostKind), rng);
  auto params = post.parameters();
  restore_parameters(ckpt, params);
  return post;
}

Example make_example(std::string name, Score score, LabelTimeline truth, bool reverse_during) {
  Example ex;
  ex.name = std::move(name);
  GraphOptions opts;
  opts.reverse_during = reverse_during;
  ex.graph = build_graph(score, extract_features(score), opts);
  ex.targets = encode_labels(truth, score.distinct_onsets());
  ex.score = std::move(score);
  ex.truth = std::move(truth);
  return ex;
}

std::vector<TaskClasses> argmax_classes(std::span<const Tensor> logits) {
  if (logits.size() != kTaskCount) throw std::invalid_argument("argmax_classes: expected one matrix per task");
  const std::size_t k = logits[0].rows();
  std::vector<TaskClasses> out(k);
  for (std::size_t t = 0; t < kTaskCount; ++t) {
    if (logits[t].rows() != k) throw std::invalid_argument("argmax_classes: row counts differ between tasks");
    for (std::size_t i = 0; i < k; ++i) {
      std::size_t best = 0;
      for (std::size_t c = 1; c < logits[t].cols(); ++c) {
        if (logits[t].at(i, c) > logits[t].at(i, best)) best = c;
      }
      out[i][t] = best;
    }
  }
  return out;
}

Evaluation evaluate(const ChordGNN &model, std::span<const Example> pieces) {
  Evaluation ev;
  if (pieces.empty()) return ev;
  Rng unused(0);
  std::size_t onsets = 0, correct = 0;
  for (const Example &ex : pieces) {
    const TaskLogits out = model.forward(ex.graph, false, unused);
    ev.loss += total_loss(out.logits, ex.targets, model.gammas()).total.item();
    const auto pred = argmax_classes(out.logits);
    for (std::size_t i = 0; i < pred.size(); ++i) correct += rn_match(pred[i], ex.targets[i]) ? 1 : 0;
    onsets += pred.size();
  }
  ev.loss /= static_cast<double>(pieces.size());
  ev.rn_accuracy = static_cast<double>(correct) / static_cast<double>(onsets);
  return ev;
}

Evaluation evaluate_post(const ChordGNN &model, const PostProcessor &post, std::span<const Example> pieces) {
  Evaluation ev;
  if (pieces.empty()) return ev;
  Rng unused(0);
  std::size_t onsets = 0, correct = 0;
  for (const Example &ex : pieces) {
    const TaskLogits base = model.forward(ex.graph, false, unused);
    const auto logits = post.forward(base.logits, false, unused);
    ev.loss += total_loss(logits, ex.targets, post.gammas()).total.item();
    const auto pred = argmax_classes(logits);
    for (std::size_t i = 0; i < pred.size(); ++i) correct += rn_match(pred[i], ex.targets[i]) ? 1 : 0;
    onsets += pred.size();
  }
  ev.loss /= static_cast<double>(pieces.size());
  ev.rn_accuracy = static_cast<double>(correct) / static_cast<double>(onsets);
  return ev;
}

TrainResult train(ChordGNN &model, std::span<const Example> train_set, std::span<const Example> val_set,
                  const EpochCallback &on_epoch) {
  const ModelConfig &cfg = model.config();
  Rng rng(cfg.seed ^ 0x5452414E5345454Dull);
  ad::AdamWConfig opt;
  opt.lr = cfg.lr;
  opt.weight_decay = cfg.weight_decay;
  auto step = [&](const Example &ex) {
    const TaskLogits out = model.forward(ex.graph, true, rng);
    return total_loss(out.logits, ex.targets, model.gammas()).total;
  };
  auto eval_fn = [&](std::span<const Example> s) { return evaluate(model, s); };
  return run_training(model.parameters(), opt, cfg.epochs, cfg.batch_pieces, cfg.patience, rng, train_set, val_set,
                      step, eval_fn, model.gammas(), on_epoch);
}

TrainResult train_postprocessor(const ChordGNN &model, PostProcessor &post, std::span<const Example> train_set,
                                std::span<const Example> val_set, const EpochCallback &on_epoch) {
  const ModelConfig &cfg = post.config();
  Rng rng(cfg.seed ^ 0x504F5354504F5354ull);
  Rng base_rng = rng.split();
  std::vector<std::vector<Tensor>> cached;
  if (!cfg.post_noisy_inputs) {
    Rng unused(0);
    for (const Example &ex : train_set) cached.push_back(model.forward(ex.graph, false, unused).logits);
  }
  auto position = [&](const Example &ex) {
    return static_cast<std::size_t>(&ex - train_set.data());
  };
  ad::AdamWConfig opt;
  opt.lr = cfg.post_lr;
  opt.weight_decay = cfg.weight_decay;
  auto step = [&](const Example &ex) {
    std::vector<Tensor> base;
    if (cfg.post_noisy_inputs) {
      ad::NoGradScope frozen;
      base = model.forward(ex.graph, true, base_rng).logits;
    } else {
      base = cached[position(ex)];
    }
    const auto logits = post.forward(base, true, rng);
    return total_loss(logits, ex.targets, post.gammas()).total;
  };
  auto eval_fn = [&](std::span<const Example> s) { return evaluate_post(model, post, s); };
  return run_training(post.parameters(), opt, cfg.post_epochs, cfg.batch_pieces, cfg.patience, rng, train_set,
                      val_set, step, eval_fn, post.gammas(), on_epoch);
}

AnalysisTimeline timeline_from_predictions(const std::vector<RationalTime> &onsets,
                                           const std::vector<TaskClasses> &classes, RationalTime end) {
  if (onsets.empty() || onsets.size() != classes.size()) {
    throw std::invalid_argument("timeline_from_predictions: need one class vector per onset");
  }
  AnalysisTimeline tl;
  for (std::size_t i = 0; i < onsets.size(); ++i) {
    const RationalTime start = i == 0 ? std::min(RationalTime(0), onsets[0]) : onsets[i];
    const RationalTime stop = i + 1 < onsets.size() ? onsets[i + 1] : end;
    if (stop <= start) throw std::invalid_argument("timeline_from_predictions: onsets must increase below end");
    tl.segments.push_back({start, stop - start, classes[i]});
  }
  return tl;
}

AnalysisTimeline analyze(const Score &score, const ChordGNN &model, const PostProcessor *post) {
  if (score.size() == 0) throw std::invalid_argument("cannot analyze an empty score");
  GraphOptions opts;
  opts.reverse_during = model.config().reverse_during;
  const ScoreGraph graph = build_graph(score, extract_features(score), opts);
  Rng unused(0);
  TaskLogits out = model.forward(graph, false, unused);
  const auto logits = post ? post->forward(out.logits, false, unused) : out.logits;
  return timeline_from_predictions(out.onsets, argmax_classes(logits), score.end());
}

}  // namespace chordgraph
