#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "chordgraph/augment.hpp"
#include "chordgraph/checkpoint.hpp"
#include "chordgraph/corpus.hpp"
#include "chordgraph/eval.hpp"
#include "chordgraph/model.hpp"
#include "chordgraph/score_graph.hpp"
#include "chordgraph/synth.hpp"

namespace fs = std::filesystem;
using namespace chordgraph;

namespace {

constexpr int kExitThreshold = 1;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;

/// Errors in user-supplied files and data.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

RationalTime parse_grid(const std::string &text) {
  RationalTime g;
  try {
    g = RationalTime::parse(text);
  } catch (const std::exception &e) {
    throw CLI::ValidationError("--grid", e.what());
  }
  if (g <= RationalTime(0)) throw CLI::ValidationError("--grid", "must be positive");
  return g;
}

std::vector<Example> to_examples(const std::vector<Piece> &pieces, bool reverse_during) {
  std::vector<Example> out;
  for (const Piece &p : pieces) out.push_back(make_example(p.name, p.score, p.timeline, reverse_during));
  return out;
}

void print_epoch(const EpochLog &log) {
  std::printf("epoch %4zu  train_loss %.5f  train_eval_loss %.5f  train_rn %.4f", log.epoch, log.train_loss,
              log.train_eval_loss, log.train_rn_accuracy);
  if (log.val_loss) std::printf("  val_loss %.5f  val_rn %.4f", *log.val_loss, *log.val_rn_accuracy);
  std::printf("\n");
  std::fflush(stdout);
}

ModelConfig load_config(const std::string &path) {
  if (path.empty()) return {};
  try {
    return ModelConfig::load(path);
  } catch (const ConfigError &e) {
    throw DataError(e.what());
  }
}

struct SynthArgs {
  std::size_t pieces = 8;
  std::uint64_t seed = 0;
  std::size_t test = 0;
  std::string out;
};

int run_synth(const SynthArgs &a) {
  if (a.test > a.pieces) throw CLI::ValidationError("--test", "cannot exceed --pieces");
  SynthOptions opts;
  opts.pieces = a.pieces;
  opts.seed = a.seed;
  auto pieces = synthesize_corpus(opts);
  if (a.test == 0) {
    write_corpus(a.out, pieces);
  } else {
    const auto split = pieces.end() - static_cast<long>(a.test);
    write_corpus(fs::path(a.out) / "train", {pieces.begin(), split});
    write_corpus(fs::path(a.out) / "test", {split, pieces.end()});
  }
  std::printf("wrote %zu pieces to %s\n", pieces.size(), a.out.c_str());
  return 0;
}

struct TrainArgs {
  std::string corpus;
  std::string val;
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> epochs;
  std::string out;
  bool augment = false;
};

int run_train(const TrainArgs &a) {
  ModelConfig cfg = load_config(a.config);
  if (a.seed) cfg.seed = *a.seed;
  if (a.epochs) cfg.epochs = *a.epochs;
  auto pieces = read_corpus(a.corpus);
  if (a.augment) pieces = augment_corpus(pieces, CorpusRole::Train);
  const auto train_set = to_examples(pieces, cfg.reverse_during);
  std::vector<Example> val_set;
  if (!a.val.empty()) val_set = to_examples(read_corpus(a.val), cfg.reverse_during);
  Rng rng(cfg.seed);
  ChordGNN model(cfg, rng);
  const TrainResult result = train(model, train_set, val_set, print_epoch);
  std::printf("initial loss %.5f, best epoch %zu%s\n", result.initial_loss, result.best_epoch,
              result.early_stopped ? " (early stop)" : "");
  save_checkpoint(a.out, model.to_checkpoint());
  return 0;
}

struct PostArgs {
  std::string corpus;
  std::string val;
  std::string model;
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> epochs;
  std::string out;
};

int run_posttrain(const PostArgs &a) {
  const ChordGNN model = ChordGNN::from_checkpoint(load_checkpoint(a.model));
  ModelConfig cfg = a.config.empty() ? model.config() : load_config(a.config);
  // The post-processor reads the base model's logits, so structural keys
  // always come from the base checkpoint.
  cfg.hidden_size = model.config().hidden_size;
  cfg.sage_layers = model.config().sage_layers;
  cfg.shared_weights = model.config().shared_weights;
  cfg.reverse_during = model.config().reverse_during;
  cfg.bidirectional_gru = model.config().bidirectional_gru;
  if (a.seed) cfg.seed = *a.seed;
  if (a.epochs) cfg.post_epochs = *a.epochs;
  const auto train_set = to_examples(read_corpus(a.corpus), cfg.reverse_during);
  std::vector<Example> val_set;
  if (!a.val.empty()) val_set = to_examples(read_corpus(a.val), cfg.reverse_during);
  Rng rng(cfg.seed ^ 0x9E3779B97F4A7C15ull);
  PostProcessor post(cfg, rng);
  const TrainResult result = train_postprocessor(model, post, train_set, val_set, print_epoch);
  std::printf("initial loss %.5f, best epoch %zu%s\n", result.initial_loss, result.best_epoch,
              result.early_stopped ? " (early stop)" : "");
  save_checkpoint(a.out, post.to_checkpoint());
  return 0;
}

struct EvalArgs {
  std::string corpus;
  std::string model;
  std::string post;
  std::string predictions;
  std::string grid = "1/32";
  std::optional<double> min_rn;
  std::string tsv;
};

int run_eval(const EvalArgs &a) {
  if (a.model.empty() == a.predictions.empty()) {
    throw CLI::ValidationError("eval", "give exactly one of --model or --predictions");
  }
  if (!a.post.empty() && a.model.empty()) throw CLI::ValidationError("--post", "requires --model");
  if (a.min_rn && (*a.min_rn < 0.0 || *a.min_rn > 1.0)) throw CLI::ValidationError("--min-rn", "must lie in [0, 1]");
  const RationalTime grid = parse_grid(a.grid);
  const auto pieces = read_corpus(a.corpus);
  std::optional<ChordGNN> model;
  std::optional<PostProcessor> post;
  if (!a.model.empty()) model = ChordGNN::from_checkpoint(load_checkpoint(a.model));
  if (!a.post.empty()) post = PostProcessor::from_checkpoint(load_checkpoint(a.post));
  CorpusReport rep;
  for (const Piece &p : pieces) {
    AnalysisTimeline pred;
    if (model) {
      pred = analyze(p.score, *model, post ? &*post : nullptr);
    } else {
      pred = to_analysis_timeline(read_timeline_file(fs::path(a.predictions) / (p.name + ".tsv")));
    }
    try {
      rep.pieces.push_back(report(p.name, pred, p.timeline, p.score.distinct_onsets(), grid));
    } catch (const std::invalid_argument &e) {
      throw DataError(p.name + ": " + e.what());
    }
  }
  std::cout << rep.to_table();
  if (!a.tsv.empty()) write_text_file(a.tsv, rep.to_tsv());
  if (a.min_rn) {
    const double rn = rep.mean()[5] / 100.0;
    if (rn < *a.min_rn) {
      std::fprintf(stderr, "RN CSR %.4f is below the threshold %.4f\n", rn, *a.min_rn);
      return kExitThreshold;
    }
  }
  return 0;
}

struct AnalyzeArgs {
  std::string score;
  std::string model;
  std::string post;
  std::string out;
};

int run_analyze(const AnalyzeArgs &a) {
  const Score score = read_score_file(a.score);
  const ChordGNN model = ChordGNN::from_checkpoint(load_checkpoint(a.model));
  std::optional<PostProcessor> post;
  if (!a.post.empty()) post = PostProcessor::from_checkpoint(load_checkpoint(a.post));
  const AnalysisTimeline tl = analyze(score, model, post ? &*post : nullptr);
  const std::string text = serialize_timeline_tsv(to_label_timeline(tl));
  if (a.out.empty()) {
    std::cout << text;
  } else {
    write_text_file(a.out, text);
  }
  return 0;
}

struct GraphArgs {
  std::string score;
  std::string out;
  std::string features;
  bool no_reverse = false;
};

int run_graph(const GraphArgs &a) {
  const Score score = read_score_file(a.score);
  GraphOptions opts;
  opts.reverse_during = !a.no_reverse;
  const ScoreGraph g = build_graph(score, extract_features(score), opts);
  if (a.out.empty()) {
    std::cout << dump_edges(g);
  } else {
    write_text_file(a.out, dump_edges(g));
  }
  if (!a.features.empty()) write_text_file(a.features, dump_features_csv(g));
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Roman numeral analysis with heterogeneous graph networks"};
  app.require_subcommand(1);

  SynthArgs synth_args;
  auto *synth_cmd = app.add_subcommand("synth", "Generate a synthetic annotated corpus");
  synth_cmd->add_option("-n,--pieces", synth_args.pieces, "Number of pieces")->capture_default_str();
  synth_cmd->add_option("--seed", synth_args.seed, "Random seed")->capture_default_str();
  synth_cmd->add_option("--test", synth_args.test, "Hold out this many pieces under <out>/test");
  synth_cmd->add_option("--out", synth_args.out, "Output directory")->required();

  TrainArgs train_args;
  auto *train_cmd = app.add_subcommand("train", "Train a model on a corpus directory");
  train_cmd->add_option("corpus", train_args.corpus, "Training corpus directory")->required()->check(CLI::ExistingDirectory);
  train_cmd->add_option("--val", train_args.val, "Validation corpus (enables early stopping)")->check(CLI::ExistingDirectory);
  train_cmd->add_option("--config", train_args.config, "key=value config file")->check(CLI::ExistingFile);
  train_cmd->add_option("--seed", train_args.seed, "Override the config seed");
  train_cmd->add_option("--epochs", train_args.epochs, "Override the config epoch count");
  train_cmd->add_flag("--augment", train_args.augment, "Add every legal transposition of the training pieces");
  train_cmd->add_option("--out", train_args.out, "Checkpoint to write")->required();

  PostArgs post_args;
  auto *post_cmd = app.add_subcommand("posttrain", "Train the post-processor on a frozen model");
  post_cmd->add_option("corpus", post_args.corpus, "Training corpus directory")->required()->check(CLI::ExistingDirectory);
  post_cmd->add_option("--val", post_args.val, "Validation corpus")->check(CLI::ExistingDirectory);
  post_cmd->add_option("--model", post_args.model, "Base model checkpoint")->required()->check(CLI::ExistingFile);
  post_cmd->add_option("--config", post_args.config, "key=value config file (post_* keys)")->check(CLI::ExistingFile);
  post_cmd->add_option("--seed", post_args.seed, "Override the config seed");
  post_cmd->add_option("--epochs", post_args.epochs, "Override post_epochs");
  post_cmd->add_option("--out", post_args.out, "Post-processor checkpoint to write")->required();

  EvalArgs eval_args;
  auto *eval_cmd = app.add_subcommand("eval", "Report CSR and onset accuracy on an annotated corpus");
  eval_cmd->add_option("corpus", eval_args.corpus, "Annotated corpus directory")->required()->check(CLI::ExistingDirectory);
  eval_cmd->add_option("--model", eval_args.model, "Model checkpoint")->check(CLI::ExistingFile);
  eval_cmd->add_option("--post", eval_args.post, "Post-processor checkpoint")->check(CLI::ExistingFile);
  eval_cmd->add_option("--predictions", eval_args.predictions, "Directory of <piece>.tsv predictions")
      ->check(CLI::ExistingDirectory);
  eval_cmd->add_option("--grid", eval_args.grid, "CSR sampling step in whole notes")->capture_default_str();
  eval_cmd->add_option("--min-rn", eval_args.min_rn, "Exit 1 when the mean RN CSR (fraction) is below this");
  eval_cmd->add_option("--tsv", eval_args.tsv, "Also write the report as TSV");

  AnalyzeArgs analyze_args;
  auto *analyze_cmd = app.add_subcommand("analyze", "Write the predicted annotation of one score");
  analyze_cmd->add_option("score", analyze_args.score, "Note table")->required()->check(CLI::ExistingFile);
  analyze_cmd->add_option("--model", analyze_args.model, "Model checkpoint")->required()->check(CLI::ExistingFile);
  analyze_cmd->add_option("--post", analyze_args.post, "Post-processor checkpoint")->check(CLI::ExistingFile);
  analyze_cmd->add_option("--out", analyze_args.out, "Output TSV (default stdout)");

  GraphArgs graph_args;
  auto *graph_cmd = app.add_subcommand("graph", "Dump the score graph edges");
  graph_cmd->add_option("score", graph_args.score, "Note table")->required()->check(CLI::ExistingFile);
  graph_cmd->add_option("--out", graph_args.out, "Edge dump file (default stdout)");
  graph_cmd->add_option("--features", graph_args.features, "Also write node features as CSV");
  graph_cmd->add_flag("--no-reverse-during", graph_args.no_reverse, "Omit the mirrored during edges");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*synth_cmd) return run_synth(synth_args);
    if (*train_cmd) return run_train(train_args);
    if (*post_cmd) return run_posttrain(post_args);
    if (*eval_cmd) return run_eval(eval_args);
    if (*analyze_cmd) return run_analyze(analyze_args);
    if (*graph_cmd) return run_graph(graph_args);
  } catch (const CLI::ValidationError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const TrainingDiverged &e) {
    std::cerr << "training diverged: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
