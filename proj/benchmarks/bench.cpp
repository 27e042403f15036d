#include <benchmark/benchmark.h>

#include "chordgraph/eval.hpp"
#include "chordgraph/gnn.hpp"
#include "chordgraph/model.hpp"
#include "chordgraph/ops.hpp"
#include "chordgraph/synth.hpp"

using namespace chordgraph;

namespace {

// Synthetic pieces laid end to end until the score has at least `notes` notes.
Piece long_piece(std::size_t notes) {
  SynthOptions opts;
  opts.pieces = 1;
  Piece out;
  std::vector<Note> all;
  RationalTime offset(0);
  for (std::uint64_t seed = 1; all.size() < notes; ++seed) {
    opts.seed = seed;
    const Piece p = synthesize_corpus(opts).front();
    for (Note n : p.score.notes()) {
      n.onset += offset;
      all.push_back(n);
    }
    for (LabelSegment s : p.timeline.segments) {
      s.onset += offset;
      out.timeline.segments.push_back(s);
    }
    offset += p.score.end();
  }
  out.score = Score(all, {});
  return out;
}

void BM_BuildGraph(benchmark::State &state) {
  const Piece p = long_piece(static_cast<std::size_t>(state.range(0)));
  const Matrix x = extract_features(p.score);
  for (auto _ : state) benchmark::DoNotOptimize(build_graph(p.score, x));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(p.score.size()));
}
BENCHMARK(BM_BuildGraph)->Arg(100)->Arg(1000)->Arg(10000);

void BM_SageForward(benchmark::State &state) {
  const Piece p = long_piece(static_cast<std::size_t>(state.range(0)));
  const ScoreGraph g = build_graph(p.score, extract_features(p.score));
  Rng rng(1);
  const HeteroSageLayer layer(kFeatureDim, 64, g.relations(), false, rng);
  const ad::Tensor h(g.features);
  for (auto _ : state) benchmark::DoNotOptimize(layer.forward(g, h));
}
BENCHMARK(BM_SageForward)->Arg(100)->Arg(1000);

void BM_SageBackward(benchmark::State &state) {
  const Piece p = long_piece(static_cast<std::size_t>(state.range(0)));
  const ScoreGraph g = build_graph(p.score, extract_features(p.score));
  Rng rng(1);
  const HeteroSageLayer layer(kFeatureDim, 64, g.relations(), false, rng);
  const ad::Tensor h(g.features);
  for (auto _ : state) {
    ad::Tape tape;
    ad::TapeScope scope(tape);
    ad::Tensor loss = ad::sum(layer.forward(g, h));
    tape.backward(loss);
  }
}
BENCHMARK(BM_SageBackward)->Arg(100)->Arg(1000);

void BM_ModelForward(benchmark::State &state) {
  const Piece p = long_piece(static_cast<std::size_t>(state.range(0)));
  const ScoreGraph g = build_graph(p.score, extract_features(p.score));
  ModelConfig c;
  c.hidden_size = 64;
  Rng rng(1);
  const ChordGNN model(c, rng);
  Rng unused(0);
  for (auto _ : state) benchmark::DoNotOptimize(model.forward(g, false, unused));
}
BENCHMARK(BM_ModelForward)->Arg(100)->Arg(1000);

void BM_Csr(benchmark::State &state) {
  const Piece p = long_piece(static_cast<std::size_t>(state.range(0)));
  AnalysisTimeline pred = to_analysis_timeline(p.timeline);
  // Shift every other boundary so the two timelines disagree.
  for (std::size_t i = 1; i < pred.segments.size(); i += 2) {
    const RationalTime d = pred.segments[i - 1].duration * RationalTime(1, 2);
    pred.segments[i - 1].duration -= d;
    pred.segments[i].onset -= d;
    pred.segments[i].duration += d;
  }
  const auto f = FieldSelector::of(FieldSelector::Kind::ConventionalRN);
  for (auto _ : state) benchmark::DoNotOptimize(csr(pred, p.timeline, f));
}
BENCHMARK(BM_Csr)->Arg(100)->Arg(1000)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
