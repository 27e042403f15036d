#include <doctest.h>

#include <cmath>
#include <sstream>

#include "chordgraph/model.hpp"
#include "chordgraph/ops.hpp"
#include "fixtures.hpp"
#include "gradcheck.hpp"

using namespace chordgraph;
using namespace chordgraph::ad;

namespace {

std::string bytes(const Checkpoint &c) {
  std::ostringstream os;
  write_checkpoint(os, c);
  return os.str();
}

void zero_heads(ChordGNN &m) {
  for (auto &head : m.heads()) {
    for (auto &[name, t] : head.parameters()) {
      for (double &v : t.values()) v = 0.0;
    }
  }
}

std::vector<double> flat(const NamedTensors &params) {
  std::vector<double> out;
  for (const auto &[name, t] : params) out.insert(out.end(), t.values().begin(), t.values().end());
  return out;
}

}  // namespace

TEST_CASE("config defaults and parsing") {
  const ModelConfig d;
  CHECK(d.hidden_size == 256);
  CHECK(d.lr == 0.0015);
  CHECK(d.weight_decay == 0.005);
  CHECK(d.dropout == 0.5);
  CHECK(d.sage_layers == 2);
  CHECK_FALSE(d.shared_weights);
  CHECK(d.init_gain == 1.0);

  const ModelConfig c = ModelConfig::parse("# tiny\nhidden_size = 8\nlr=0.01\nshared_weights=true\ninit_gain=2\n");
  CHECK(c.hidden_size == 8);
  CHECK(c.lr == 0.01);
  CHECK(c.shared_weights);
  CHECK(c.init_gain == 2.0);
  const ModelConfig again = ModelConfig::parse(c.to_text());
  CHECK(again.to_text() == c.to_text());

  CHECK_THROWS_AS(ModelConfig::parse("hidden = 8\n"), ConfigError);
  CHECK_THROWS_AS(ModelConfig::parse("hidden_size = eight\n"), ConfigError);
  CHECK_THROWS_AS(ModelConfig::parse("dropout = 1\n"), ConfigError);
  CHECK_THROWS_AS(ModelConfig::parse("hidden_size\n"), ConfigError);
  CHECK_THROWS_AS(ModelConfig::parse("init_gain = 0\n"), ConfigError);
  CHECK_THROWS_AS(ModelConfig::parse("post_input_scale = -1\n"), ConfigError);
  CHECK(ModelConfig::parse("post_input_scale = 0.25\n").post_input_scale == 0.25);
  CHECK_THROWS_AS(ModelConfig::parse("hidden_size = 7\nbidirectional_gru = true\n"), ConfigError);
}

TEST_CASE("weighted loss closed forms") {
  std::vector<Tensor> losses, gammas;
  double expect = 0;
  for (std::size_t t = 0; t < kTaskCount; ++t) {
    const double l = 0.3 * static_cast<double>(t) + 0.1;
    losses.push_back(Tensor::scalar(l));
    gammas.push_back(Tensor::scalar(1.0));
    expect += l / 2;
  }
  expect += 11 * std::log(2.0);
  // The epsilon in the denominator moves the result by about 1e-8 per task.
  CHECK(std::abs(weighted_loss(losses, gammas).item() - expect) <= 1e-6);

  const Tensor one_loss[] = {Tensor::scalar(8.0)};
  const Tensor one_gamma[] = {Tensor::scalar(2.0)};
  CHECK(std::abs(weighted_loss(one_loss, one_gamma).item() - (1.0 + std::log(5.0))) <= 1e-6);
  CHECK(std::abs(weighted_loss(one_loss, one_gamma).item() - (8.0 / (2 * (4.0 + kGammaEpsilon)) + std::log(5.0))) <=
        1e-14);

  const Tensor zero_gamma[] = {Tensor::scalar(0.0)};
  CHECK(std::isfinite(weighted_loss(one_loss, zero_gamma).item()));
}

TEST_CASE("weighted loss gradients") {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Tensor> losses, gammas, inputs;
    for (std::size_t t = 0; t < 3; ++t) {
      losses.push_back(Tensor::scalar(rng.uniform(0.1, 5.0), true));
      double g = rng.uniform(0.2, 2.0);
      if (rng.bernoulli(0.5)) g = -g;
      gammas.push_back(Tensor::scalar(g, true));
    }
    inputs = losses;
    inputs.insert(inputs.end(), gammas.begin(), gammas.end());
    CHECK(cgtest::gradcheck([&] { return weighted_loss(losses, gammas); }, inputs).max_error < 1e-6);
  }
}

TEST_CASE("forward shapes and zero heads") {
  Rng rng(1);
  ChordGNN m(cgtest::tiny_config(6), rng);
  const Score one = parse_note_table("N 0 1/4 C 0 4\nN 0 1/4 E 0 4\nN 0 1/4 G 0 4\n");
  const ScoreGraph g = build_graph(one, extract_features(one));
  Rng d(0);
  TaskLogits out = m.forward(g, false, d);
  REQUIRE(out.logits.size() == kTaskCount);
  for (std::size_t t = 0; t < kTaskCount; ++t) {
    CHECK(out.logits[t].rows() == 1);
    CHECK(out.logits[t].cols() == task_registry()[t].size());
  }
  CHECK(m.gammas().size() == kTaskCount);
  CHECK(m.parameters().back().first == "gamma.bass");

  zero_heads(m);
  out = m.forward(g, false, d);
  for (std::size_t t = 0; t < kTaskCount; ++t) {
    const Tensor p = softmax_rows(out.logits[t]);
    for (double v : p.values()) CHECK(v == doctest::Approx(1.0 / static_cast<double>(p.cols())).epsilon(1e-15));
  }
  // Every logit ties, so every task picks class 0 and the timeline is constant.
  const AnalysisTimeline tl = analyze(one, m);
  REQUIRE(tl.segments.size() == 1);
  CHECK(tl.segments[0].classes == TaskClasses{});
}

TEST_CASE("init gain scales weights") {
  ModelConfig c = cgtest::tiny_config(6);
  Rng a(3), b(3);
  const ChordGNN plain(c, a);
  c.init_gain = 2.0;
  const ChordGNN scaled(c, b);
  const auto p = plain.parameters();
  const auto s = scaled.parameters();
  for (std::size_t i = 0; i < p.size(); ++i) {
    const bool gamma = p[i].first.rfind("gamma.", 0) == 0;
    for (std::size_t j = 0; j < p[i].second.size(); ++j) {
      CHECK(s[i].second.values()[j] == (gamma ? 1.0 : 2.0) * p[i].second.values()[j]);
    }
  }
}

TEST_CASE("total loss gradient through the whole model") {
  const auto ex = cgtest::synth_examples(1, 3);
  Rng rng(2);
  ModelConfig c = cgtest::tiny_config(3);
  c.sage_layers = 1;
  ChordGNN m(c, rng);
  // Keep the score short enough for a full sweep.
  Score small(std::vector<Note>(ex[0].score.notes().begin(), ex[0].score.notes().begin() + 6),
              ex[0].score.time_signatures());
  const Example e = make_example("small", small, ex[0].truth);
  std::vector<Tensor> inputs;
  for (const auto &[name, t] : m.parameters()) inputs.push_back(t);
  for (Tensor &g : inputs) g.set_requires_grad(true);
  auto f = [&] {
    Rng d(0);
    return total_loss(m.forward(e.graph, false, d).logits, e.targets, m.gammas()).total;
  };
  CHECK(cgtest::gradcheck(f, inputs, 1e-6).max_error < 1e-4);
}

TEST_CASE("training contracts") {
  const auto ex = cgtest::synth_examples(2, 11);
  ModelConfig c = cgtest::tiny_config(6);
  c.epochs = 2;

  SUBCASE("same seed, same checkpoint") {
    Rng a(c.seed), b(c.seed);
    ChordGNN m1(c, a), m2(c, b);
    train(m1, ex, {});
    train(m2, ex, {});
    CHECK(bytes(m1.to_checkpoint()) == bytes(m2.to_checkpoint()));
    const ChordGNN back = ChordGNN::from_checkpoint(m1.to_checkpoint());
    CHECK(bytes(back.to_checkpoint()) == bytes(m1.to_checkpoint()));
  }
  SUBCASE("zero learning rate changes nothing") {
    c.lr = 0.0;
    Rng a(c.seed);
    ChordGNN m(c, a);
    const auto before = flat(m.parameters());
    const TrainResult r = train(m, ex, {});
    CHECK(flat(m.parameters()) == before);
    CHECK(r.log.size() == 2);
  }
  SUBCASE("validation tracking") {
    c.epochs = 3;
    Rng a(c.seed);
    ChordGNN m(c, a);
    std::size_t calls = 0;
    const TrainResult r = train(m, std::span(ex).first(1), std::span(ex).last(1), [&](const EpochLog &) { ++calls; });
    CHECK(calls == 3);
    CHECK(r.log[0].val_loss.has_value());
    CHECK(r.best_epoch >= 1);
    CHECK(r.best_epoch <= 3);
  }
  SUBCASE("empty corpus") {
    Rng a(c.seed);
    ChordGNN m(c, a);
    CHECK_THROWS_AS(train(m, {}, {}), std::invalid_argument);
  }
}

TEST_CASE("post-processor contracts") {
  const auto ex = cgtest::synth_examples(2, 12);
  const ModelConfig c = cgtest::tiny_config(6);
  Rng rng(4);
  const ChordGNN base(c, rng);
  const std::string frozen = bytes(base.to_checkpoint());

  const PostProcessor zero = PostProcessor::zeros(c);
  Rng d(0);
  const auto logits = base.forward(ex[0].graph, false, d).logits;
  const auto out = zero.forward(logits, false, d);
  REQUIRE(out.size() == kTaskCount);
  for (const Tensor &t : out) {
    CHECK(t.rows() == ex[0].targets.size());
    const Tensor p = softmax_rows(t);
    for (double v : p.values()) CHECK(v == doctest::Approx(1.0 / static_cast<double>(t.cols())).epsilon(1e-15));
  }

  Rng r1(9), r2(9);
  PostProcessor p1(c, r1), p2(c, r2);
  train_postprocessor(base, p1, ex, {});
  train_postprocessor(base, p2, ex, {});
  CHECK(bytes(base.to_checkpoint()) == frozen);
  CHECK(bytes(p1.to_checkpoint()) == bytes(p2.to_checkpoint()));
  CHECK(bytes(PostProcessor::from_checkpoint(p1.to_checkpoint()).to_checkpoint()) == bytes(p1.to_checkpoint()));
  CHECK_THROWS_AS(ChordGNN::from_checkpoint(p1.to_checkpoint()), CheckpointError);
  CHECK_THROWS_AS(PostProcessor::from_checkpoint(base.to_checkpoint()), CheckpointError);

  ModelConfig noisy = c;
  noisy.post_noisy_inputs = true;
  noisy.dropout = 0.5;
  Rng r3(9);
  const ChordGNN noisy_base(noisy, r3);
  const std::string noisy_frozen = bytes(noisy_base.to_checkpoint());
  PostProcessor p3(noisy, r3);
  train_postprocessor(noisy_base, p3, ex, {});
  CHECK(bytes(noisy_base.to_checkpoint()) == noisy_frozen);
}

TEST_CASE("post-processor input scale") {
  const auto ex = cgtest::synth_examples(1, 13);
  ModelConfig c = cgtest::tiny_config(6);
  Rng rng(4);
  const ChordGNN base(c, rng);
  Rng d(0);
  const auto logits = base.forward(ex[0].graph, false, d).logits;
  std::vector<Tensor> scaled;
  for (const Tensor &t : logits) scaled.push_back(scale(t, 0.5));
  Rng r1(7), r2(7);
  const PostProcessor plain(c, r1);
  c.post_input_scale = 0.5;
  const PostProcessor halved(c, r2);
  const auto a = plain.forward(scaled, false, d);
  const auto b = halved.forward(logits, false, d);
  for (std::size_t t = 0; t < kTaskCount; ++t) {
    for (std::size_t i = 0; i < a[t].size(); ++i) CHECK(a[t].values()[i] == b[t].values()[i]);
  }
}

TEST_CASE("argmax and timelines") {
  Tensor a(2, 3, std::vector<double>{1, 3, 3, 2, 0, -1});
  std::vector<Tensor> logits(kTaskCount, a);
  const auto cls = argmax_classes(logits);
  REQUIRE(cls.size() == 2);
  CHECK(cls[0][0] == 1);
  CHECK(cls[1][0] == 0);

  const std::vector<RationalTime> onsets = {RationalTime(1, 4), RationalTime(1, 2)};
  const AnalysisTimeline tl = timeline_from_predictions(onsets, cls, RationalTime(2));
  REQUIRE(tl.segments.size() == 2);
  CHECK(tl.segments[0].onset == RationalTime(0));
  CHECK(tl.segments[0].duration == RationalTime(1, 2));
  CHECK(tl.segments[1].end() == RationalTime(2));
  CHECK_NOTHROW(tl.validate());
}

TEST_CASE("analysis covers the score") {
  const auto ex = cgtest::synth_examples(3, 21);
  Rng rng(6);
  const ChordGNN m(cgtest::tiny_config(5), rng);
  for (const auto &e : ex) {
    const AnalysisTimeline tl = analyze(e.score, m);
    CHECK_NOTHROW(tl.validate());
    CHECK(tl.start() == RationalTime(0));
    CHECK(tl.end() == e.score.end());
    CHECK(tl.segments.size() == e.targets.size());
  }
}

TEST_CASE("a single piece is memorised") {
  const auto ex = cgtest::synth_examples(1, 5);
  ModelConfig c = cgtest::tiny_config(64);
  c.epochs = 200;
  c.init_gain = std::sqrt(6.0);
  Rng rng(c.seed);
  ChordGNN m(c, rng);
  const std::array<double, kTaskCount> gamma0 = [&] {
    std::array<double, kTaskCount> g{};
    for (std::size_t t = 0; t < kTaskCount; ++t) g[t] = m.gammas()[t].item();
    return g;
  }();
  const TrainResult r = train(m, ex, {});
  CHECK(r.log[9].train_eval_loss < r.initial_loss);
  CHECK(r.log.back().train_eval_loss < 0.25 * r.initial_loss);

  std::size_t hits[5] = {};
  const Task parts[5] = {Task::LocalKey, Task::DegreePrimary, Task::DegreeSecondary, Task::Quality, Task::Inversion};
  Rng d(0);
  const auto pred = argmax_classes(m.forward(ex[0].graph, false, d).logits);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    for (std::size_t p = 0; p < 5; ++p) {
      const auto t = static_cast<std::size_t>(parts[p]);
      hits[p] += pred[i][t] == ex[0].targets[i][t];
    }
  }
  for (std::size_t p = 0; p < 5; ++p) CHECK(static_cast<double>(hits[p]) / static_cast<double>(pred.size()) >= 0.99);

  bool moved = false;
  for (std::size_t t = 0; t < kTaskCount; ++t) moved = moved || std::abs(m.gammas()[t].item() - gamma0[t]) > 1e-3;
  CHECK(moved);

  // The memorised piece analyses back to its own annotation at every onset.
  const AnalysisTimeline tl = analyze(ex[0].score, m);
  for (const RationalTime &t : ex[0].score.distinct_onsets()) {
    CHECK(decode_conventional_rn(tl.at(t)->classes) == decode_conventional_rn(encode_label(ex[0].truth.at(t)->label, 0)));
  }
}
