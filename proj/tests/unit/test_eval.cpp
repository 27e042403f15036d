#include <doctest.h>

#include "chordgraph/eval.hpp"
#include "chordgraph/rng.hpp"
#include "oracles.hpp"

using namespace chordgraph;

namespace {

using K = FieldSelector::Kind;

using cgtest::grid_walk;
using cgtest::label_pool;
using cgtest::random_pred;
using cgtest::random_truth;
using cgtest::split_everywhere;

}  // namespace

TEST_CASE("csr of identical timelines is one") {
  Rng rng(1);
  const auto pool = label_pool();
  for (int trial = 0; trial < 20; ++trial) {
    const LabelTimeline truth = random_truth(rng, RationalTime(3), pool);
    const AnalysisTimeline pred = to_analysis_timeline(truth);
    for (K k : {K::Key, K::Degree, K::Quality, K::Inversion, K::Root, K::ConventionalRN, K::AlternativeRN}) {
      CHECK(csr(pred, truth, FieldSelector::of(k)) == 1.0);
    }
    CHECK(to_label_timeline(pred).segments.size() == truth.segments.size());
    CHECK(to_analysis_timeline(to_label_timeline(pred)) == pred);
  }
}

TEST_CASE("half right is one half") {
  const auto pool = label_pool();
  LabelTimeline truth;
  truth.segments.push_back({RationalTime(0), RationalTime(1), pool[0]});
  truth.segments.push_back({RationalTime(1), RationalTime(1), pool[2]});
  AnalysisTimeline pred;
  pred.segments.push_back({RationalTime(0), RationalTime(2), encode_label(pool[0], 0)});
  CHECK(csr(pred, truth, FieldSelector::of(K::ConventionalRN)) == 0.5);
  CHECK(csr(pred, truth, FieldSelector::of(K::Key)) == 1.0);
}

TEST_CASE("csr matches a brute-force grid walk") {
  Rng rng(77);
  const auto pool = label_pool();
  const FieldSelector fields[] = {FieldSelector::of(K::ConventionalRN), FieldSelector::of(K::AlternativeRN),
                                  FieldSelector::of(K::Degree), FieldSelector::of_task(Task::Bass)};
  for (int trial = 0; trial < 150; ++trial) {
    const RationalTime end(1 + static_cast<long>(rng.below(40)), 1 + static_cast<long>(rng.below(7)));
    const LabelTimeline truth = random_truth(rng, end, pool);
    const AnalysisTimeline pred = random_pred(rng, end, pool);
    for (const auto &f : fields) {
      const double c = csr(pred, truth, f);
      CHECK(c == grid_walk(pred, truth, f, kDefaultGrid));
      CHECK(c >= 0.0);
      CHECK(c <= 1.0);
      // Splitting segments does not change the label function of time.
      CHECK(csr(split_everywhere(pred, rng), truth, f) == c);
    }
    const RationalTime grid(1, 1 + static_cast<long>(rng.below(48)));
    CHECK(csr(pred, truth, fields[0], grid) == grid_walk(pred, truth, fields[0], grid));
  }
}

TEST_CASE("truth gaps count as misses") {
  const auto pool = label_pool();
  LabelTimeline truth;
  truth.segments.push_back({RationalTime(0), RationalTime(1, 2), pool[0]});
  truth.segments.push_back({RationalTime(3, 4), RationalTime(1, 4), pool[0]});
  AnalysisTimeline pred;
  pred.segments.push_back({RationalTime(0), RationalTime(1), encode_label(pool[0], 0)});
  CHECK(csr(pred, truth, FieldSelector::of(K::ConventionalRN)) == 0.75);
}

TEST_CASE("grid refinement is exact on grid-aligned boundaries") {
  Rng rng(4);
  const auto pool = label_pool();
  for (int trial = 0; trial < 30; ++trial) {
    LabelTimeline truth;
    AnalysisTimeline pred;
    RationalTime t(0);
    for (int i = 0; i < 6; ++i) {
      const RationalTime d(1 + static_cast<long>(rng.below(20)), 32);
      truth.segments.push_back({t, d, pool[rng.below(pool.size())]});
      t += d;
    }
    RationalTime u(0);
    while (u < t) {
      RationalTime d(1 + static_cast<long>(rng.below(20)), 32);
      if (u + d > t) d = t - u;
      pred.segments.push_back({u, d, encode_label(pool[rng.below(pool.size())], 0)});
      u += d;
    }
    const auto f = FieldSelector::of(K::ConventionalRN);
    CHECK(csr(pred, truth, f, RationalTime(1, 32)) == csr(pred, truth, f, RationalTime(1, 64)));
  }
}

TEST_CASE("csr preconditions") {
  const auto pool = label_pool();
  LabelTimeline truth;
  truth.segments.push_back({RationalTime(0), RationalTime(1), pool[0]});
  AnalysisTimeline pred;
  pred.segments.push_back({RationalTime(0), RationalTime(2), encode_label(pool[0], 0)});
  const auto f = FieldSelector::of(K::ConventionalRN);
  CHECK_THROWS_AS(csr(pred, truth, f), std::invalid_argument);
  CHECK_THROWS_AS(csr(pred, LabelTimeline{}, f), std::invalid_argument);
  pred.segments[0].duration = RationalTime(1);
  CHECK_THROWS_AS(csr(pred, truth, f, RationalTime(0)), std::invalid_argument);

  AnalysisTimeline gapped;
  gapped.segments.push_back({RationalTime(0), RationalTime(1, 2), encode_label(pool[0], 0)});
  gapped.segments.push_back({RationalTime(3, 4), RationalTime(1, 4), encode_label(pool[0], 0)});
  CHECK_THROWS_AS(gapped.validate(), LabelError);
}

TEST_CASE("onset accuracy") {
  const auto pool = label_pool();
  LabelTimeline truth;
  for (int i = 0; i < 4; ++i) truth.segments.push_back({RationalTime(i, 4), RationalTime(1, 4), pool[i]});
  AnalysisTimeline pred = to_analysis_timeline(truth);
  const std::vector<RationalTime> onsets = {RationalTime(0), RationalTime(1, 4), RationalTime(1, 2), RationalTime(3, 4)};
  const auto f = FieldSelector::of(K::ConventionalRN);
  CHECK(onset_accuracy(pred, truth, onsets, f) == 1.0);
  pred.segments[2].classes = encode_label(pool[5], 0);
  CHECK(onset_accuracy(pred, truth, onsets, f) == 0.75);
  CHECK_THROWS_AS(onset_accuracy(pred, truth, {}, f), std::invalid_argument);
  CHECK_THROWS_AS(onset_accuracy(pred, truth, {RationalTime(5)}, f), std::invalid_argument);
}

TEST_CASE("short wrong segment on a long note") {
  const auto pool = label_pool();
  LabelTimeline truth;
  truth.segments.push_back({RationalTime(0), RationalTime(2), pool[0]});
  AnalysisTimeline pred;
  pred.segments.push_back({RationalTime(0), RationalTime(1, 8), encode_label(pool[2], 0)});
  pred.segments.push_back({RationalTime(1, 8), RationalTime(15, 8), encode_label(pool[0], 0)});
  const auto f = FieldSelector::of(K::ConventionalRN);
  const std::vector<RationalTime> onsets = {RationalTime(0), RationalTime(1)};
  CHECK(onset_accuracy(pred, truth, onsets, f) == 0.5);
  CHECK(csr(pred, truth, f) == 60.0 / 64.0);
  CHECK(csr(pred, truth, f) == grid_walk(pred, truth, f, kDefaultGrid));
}

TEST_CASE("reports") {
  Rng rng(2);
  const auto pool = label_pool();
  const LabelTimeline a = random_truth(rng, RationalTime(2), pool);
  const std::vector<RationalTime> onsets = {RationalTime(0), RationalTime(1)};
  const PieceReport perfect = report("a", to_analysis_timeline(a), a, onsets);
  for (double v : perfect.values) CHECK(v == 100.0);
  CHECK(report_column_names()[5] == "RN");

  LabelTimeline half;
  half.segments.push_back({RationalTime(0), RationalTime(1), pool[0]});
  half.segments.push_back({RationalTime(1), RationalTime(1), pool[2]});
  AnalysisTimeline constant;
  constant.segments.push_back({RationalTime(0), RationalTime(2), encode_label(pool[0], 0)});
  CorpusReport corpus;
  corpus.pieces.push_back(perfect);
  corpus.pieces.push_back(report("b", constant, half, onsets));
  CHECK(corpus.pieces[1].values[5] == 50.0);
  CHECK(corpus.mean()[5] == 75.0);
  CHECK(corpus.mean()[6] == 75.0);
  const std::string tsv = corpus.to_tsv();
  CHECK(tsv.find("RN_alt") != std::string::npos);
  CHECK(tsv.find("mean") != std::string::npos);
  CHECK_FALSE(corpus.to_table().empty());
}
