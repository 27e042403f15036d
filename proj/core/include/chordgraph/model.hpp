#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "chordgraph/checkpoint.hpp"
#include "chordgraph/eval.hpp"
#include "chordgraph/gnn.hpp"
#include "chordgraph/score.hpp"
#include "chordgraph/tasks.hpp"

namespace chordgraph {

/// Model and training settings, read from `key = value` lines ('#' starts a
/// comment). Unknown keys and malformed values throw ConfigError.
struct ModelConfig {
  std::size_t hidden_size = 256;
  double lr = 0.0015;
  double weight_decay = 0.005;
  double dropout = 0.5;
  std::size_t sage_layers = 2;
  bool shared_weights = false;
  bool reverse_during = true;
  bool bidirectional_gru = false;
  /// Multiplies the +-1/sqrt(fan_in) init bound of every base-model weight
  /// matrix. sqrt(6) gives He-uniform bounds.
  double init_gain = 1.0;
  std::size_t epochs = 100;
  std::uint64_t seed = 0;
  std::size_t batch_pieces = 1;
  /// Early-stopping patience in epochs on validation loss; 0 disables it.
  std::size_t patience = 10;
  /// Post-processor BiLSTM width per direction.
  std::size_t post_hidden = 128;
  std::size_t post_epochs = 100;
  double post_lr = 0.0015;
  double post_dropout = 0.5;
  /// Multiplies the concatenated base logits before the BiLSTM. Large
  /// logits from a well-fit base model saturate the gates at 1.
  double post_input_scale = 1.0;
  /// Feed the post-processor base logits computed with dropout active.
  bool post_noisy_inputs = false;

  static ModelConfig parse(std::string_view text);
  static ModelConfig load(const std::string &path);
  std::string to_text() const;
  EncoderConfig encoder() const;

  friend bool operator==(const ModelConfig &, const ModelConfig &) = default;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Per-task logits, each onsets x vocabulary size, in `Task` order.
struct TaskLogits {
  std::vector<ad::Tensor> logits;
  std::vector<RationalTime> onsets;
};

/// Two-layer head: Linear(d, d) -> ReLU -> Linear(d, V).
struct TaskHead {
  ad::Linear hidden;
  ad::Linear output;

  TaskHead() = default;
  TaskHead(std::size_t in, std::size_t width, std::size_t vocab, Rng &rng);
  ad::Tensor forward(const ad::Tensor &x) const;
  ad::NamedTensors parameters() const;
};

class ChordGNN {
 public:
  ChordGNN() = default;
  ChordGNN(const ModelConfig &config, Rng &rng);

  TaskLogits forward(const ScoreGraph &graph, bool training, Rng &rng) const;

  const ModelConfig &config() const { return config_; }
  const Encoder &encoder() const { return encoder_; }
  const std::vector<TaskHead> &heads() const { return heads_; }
  std::vector<TaskHead> &heads() { return heads_; }
  /// Loss weights, one 1x1 tensor per task.
  const std::vector<ad::Tensor> &gammas() const { return gammas_; }
  ad::NamedTensors parameters() const;

  Checkpoint to_checkpoint() const;
  static ChordGNN from_checkpoint(const Checkpoint &ckpt);

 private:
  ModelConfig config_;
  Encoder encoder_;
  std::vector<TaskHead> heads_;
  std::vector<ad::Tensor> gammas_;
};

inline constexpr double kGammaEpsilon = 1e-8;

struct LossBreakdown {
  ad::Tensor total;
  std::array<double, kTaskCount> task_losses{};
};

/// sum_t L_t / (2 (gamma_t^2 + eps)) + log(1 + gamma_t^2).
ad::Tensor weighted_loss(std::span<const ad::Tensor> task_losses, std::span<const ad::Tensor> gammas);

/// Cross-entropy per task against `targets`, combined by weighted_loss.
LossBreakdown total_loss(std::span<const ad::Tensor> logits, const std::vector<TaskClasses> &targets,
                         std::span<const ad::Tensor> gammas);

/// BiLSTM over the concatenated base logits, then one Linear per task.
class PostProcessor {
 public:
  PostProcessor() = default;
  PostProcessor(const ModelConfig &config, Rng &rng);
  /// All weights zero: every task distribution comes out uniform.
  static PostProcessor zeros(const ModelConfig &config);

  /// `base_logits` are treated as constants.
  std::vector<ad::Tensor> forward(std::span<const ad::Tensor> base_logits, bool training, Rng &rng) const;

  const ModelConfig &config() const { return config_; }
  const std::vector<ad::Tensor> &gammas() const { return gammas_; }
  const std::vector<ad::Linear> &outputs() const { return outputs_; }
  ad::NamedTensors parameters() const;

  Checkpoint to_checkpoint() const;
  static PostProcessor from_checkpoint(const Checkpoint &ckpt);

 private:
  ModelConfig config_;
  ad::BiLstmLayer lstm_;
  std::vector<ad::Linear> outputs_;
  std::vector<ad::Tensor> gammas_;
};

/// Sum of all task vocabulary sizes.
std::size_t total_vocabulary_size();

/// One training or evaluation piece.
struct Example {
  std::string name;
  Score score;
  ScoreGraph graph;
  LabelTimeline truth;
  std::vector<TaskClasses> targets;  ///< one per distinct onset
};

/// Builds the graph and per-onset targets. Throws LabelError when the
/// annotation does not cover the score.
Example make_example(std::string name, Score score, LabelTimeline truth, bool reverse_during = true);

struct EpochLog {
  std::size_t epoch = 0;
  double train_loss = 0.0;      ///< mean training-mode loss over the epoch
  double train_eval_loss = 0.0; ///< eval-mode loss on the training set
  double train_rn_accuracy = 0.0;
  std::optional<double> val_loss;
  std::optional<double> val_rn_accuracy;
  std::array<double, kTaskCount> gammas{};
};

struct TrainResult {
  double initial_loss = 0.0;  ///< eval-mode training loss before any update
  std::vector<EpochLog> log;
  std::size_t best_epoch = 0;
  bool early_stopped = false;
};

class TrainingDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using EpochCallback = std::function<void(const EpochLog &)>;

/// Eval-mode mean loss and conventional-RN onset accuracy over `pieces`.
struct Evaluation {
  double loss = 0.0;
  double rn_accuracy = 0.0;
};
Evaluation evaluate(const ChordGNN &model, std::span<const Example> pieces);

/// AdamW over every parameter including the loss weights. Pieces are
/// shuffled each epoch and gradients averaged over `batch_pieces`. With a
/// validation set the parameters of the best validation epoch are restored
/// at the end. Throws TrainingDiverged when a loss turns non-finite.
TrainResult train(ChordGNN &model, std::span<const Example> train_set, std::span<const Example> val_set,
                  const EpochCallback &on_epoch = {});

/// Trains `post` on the frozen `model`'s logits. The base parameters are
/// never written.
TrainResult train_postprocessor(const ChordGNN &model, PostProcessor &post, std::span<const Example> train_set,
                                std::span<const Example> val_set, const EpochCallback &on_epoch = {});

Evaluation evaluate_post(const ChordGNN &model, const PostProcessor &post, std::span<const Example> pieces);

/// Per-task argmax (ties go to the lowest index).
std::vector<TaskClasses> argmax_classes(std::span<const ad::Tensor> logits);

/// Eval-mode inference. Each onset opens a segment that lasts until the next
/// onset; the first starts at 0 and the last ends at the score end.
AnalysisTimeline analyze(const Score &score, const ChordGNN &model, const PostProcessor *post = nullptr);
AnalysisTimeline timeline_from_predictions(const std::vector<RationalTime> &onsets,
                                           const std::vector<TaskClasses> &classes, RationalTime end);

}  // namespace chordgraph
