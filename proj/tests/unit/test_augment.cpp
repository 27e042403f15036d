#include <doctest.h>

#include <filesystem>
#include <set>

#include "chordgraph/augment.hpp"
#include "chordgraph/corpus.hpp"
#include "chordgraph/synth.hpp"

using namespace chordgraph;

namespace {

Key key(const char *name) { return *Key::parse(name); }
Degree deg(const char *name) { return *Degree::parse(name); }

// A short cadence in `k` with notes from its scale.
Piece cadence(const Key &k) {
  Piece p;
  p.name = "cadence";
  std::vector<Note> notes;
  LabelTimeline tl;
  const char *degrees[] = {"I", "IV", "V", "I"};
  for (int i = 0; i < 4; ++i) {
    const ChordLabel l = make_chord_label(k, deg(degrees[i]), std::nullopt, Quality::Major, 0);
    for (int m : chord_member_fifths(Quality::Major)) {
      const SpelledPitchClass pc = SpelledPitchClass::from_fifths(l.root.fifths() + m);
      notes.push_back({0, RationalTime(i, 4), RationalTime(1, 4), {pc.step, pc.alter, 4}});
    }
    tl.segments.push_back({RationalTime(i, 4), RationalTime(1, 4), l});
  }
  p.score = Score(notes, {});
  p.timeline = tl;
  return p;
}

Piece modulating() {
  Piece a = cadence(key("C"));
  const Piece b = cadence(key("E"));
  std::vector<Note> notes = a.score.notes();
  for (Note n : b.score.notes()) {
    n.onset += RationalTime(1);
    notes.push_back(n);
  }
  for (LabelSegment s : b.timeline.segments) {
    s.onset += RationalTime(1);
    a.timeline.segments.push_back(s);
  }
  a.score = Score(notes, {});
  return a;
}

std::vector<int> range(int lo, int hi) {
  std::vector<int> out;
  for (int i = lo; i <= hi; ++i) out.push_back(i);
  return out;
}

}  // namespace

TEST_CASE("semitone shift") {
  CHECK(semitone_shift(0) == 0);
  CHECK(semitone_shift(1) == -5);
  CHECK(semitone_shift(2) == 2);
  CHECK(semitone_shift(-1) == 5);
  CHECK(semitone_shift(6) == -6);
  CHECK(semitone_shift(-6) == 6);
  CHECK(semitone_shift(12) == 0);
  for (int k = -34; k <= 34; ++k) {
    CHECK(((semitone_shift(k) - 7 * k) % 12 + 12) % 12 == 0);
    CHECK(std::abs(semitone_shift(k)) <= 6);
  }
  const SpelledPitch b3{Step::B, 0, 3};
  CHECK(transpose_pitch(b3, 1) == SpelledPitch{Step::F, 1, 3});
  CHECK(transpose_pitch(b3, 2) == SpelledPitch{Step::C, 1, 4});
}

TEST_CASE("unison and a major second") {
  const Piece c = cadence(key("C"));
  const auto [score0, tl0] = transpose(c.score, c.timeline, 0);
  CHECK(score0 == c.score);
  CHECK(tl0 == c.timeline);

  const auto [score2, tl2] = transpose(c.score, c.timeline, 2);
  for (std::size_t i = 0; i < tl2.segments.size(); ++i) {
    const ChordLabel &a = c.timeline.segments[i].label;
    const ChordLabel &b = tl2.segments[i].label;
    CHECK(b.key == key("D"));
    CHECK(b.primary == a.primary);
    CHECK(b.secondary == a.secondary);
    CHECK(b.quality == a.quality);
    CHECK(b.inversion == a.inversion);
    CHECK(b.restricted == a.restricted);
  }
  CHECK(score2.notes()[0].pitch == SpelledPitch{Step::D, 0, 4});
}

TEST_CASE("legal intervals") {
  const Piece c = cadence(key("C"));
  CHECK(enumerate_transpositions(c.score, c.timeline) == range(-7, 7));
  const Piece b = cadence(key("B"));
  CHECK(enumerate_transpositions(b.score, b.timeline) == range(-12, 2));

  // Brute force: both keys must stay within seven accidentals.
  const Piece m = modulating();
  std::vector<int> expect;
  for (int k = -34; k <= 34; ++k) {
    if (std::abs(key("C").signature() + k) <= 7 && std::abs(key("E").signature() + k) <= 7) expect.push_back(k);
  }
  CHECK(enumerate_transpositions(m.score, m.timeline) == expect);
  CHECK(expect == range(-7, 3));
  CHECK(transposition_problem(m.score, m.timeline, 4).has_value());
  CHECK_THROWS_AS(transpose(m.score, m.timeline, 4), TranspositionError);
}

TEST_CASE("round trips, intervals and derived roots") {
  SynthOptions opts;
  opts.pieces = 10;
  opts.seed = 3;
  const auto corpus = synthesize_corpus(opts);
  Rng rng(8);
  for (int trial = 0; trial < 40; ++trial) {
    const Piece &p = corpus[rng.below(corpus.size())];
    const auto legal = enumerate_transpositions(p.score, p.timeline);
    REQUIRE_FALSE(legal.empty());
    const int k = legal[rng.below(legal.size())];
    const auto [s, tl] = transpose(p.score, p.timeline, k);
    const auto [s_back, tl_back] = transpose(s, tl, -k);
    CHECK(s_back == p.score);
    CHECK(tl_back == p.timeline);
    const auto &a = p.score.notes();
    const auto &b = s.notes();
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 1; i < a.size(); ++i) {
      CHECK(b[i].pitch.midi() - b[0].pitch.midi() == a[i].pitch.midi() - a[0].pitch.midi());
    }
    for (std::size_t i = 0; i < tl.segments.size(); ++i) {
      const ChordLabel &orig = p.timeline.segments[i].label;
      const ChordLabel &moved = tl.segments[i].label;
      CHECK(derive_root(moved.key, moved.primary, moved.secondary, moved.quality).fifths() == orig.root.fifths() + k);
      CHECK(moved.root.fifths() == orig.root.fifths() + k);
      CHECK(std::abs(moved.key.signature()) <= 7);
    }
  }
}

TEST_CASE("augmentation is for training corpora only") {
  const std::vector<Piece> corpus = {cadence(key("C"))};
  const auto train = augment_corpus(corpus, CorpusRole::Train);
  CHECK(train.size() == 15);
  CHECK(train.front().name == "cadence");
  std::set<std::string> names;
  for (const auto &p : train) names.insert(p.name);
  CHECK(names.size() == 15);
  CHECK(names.count("cadence@+2") == 1);
  CHECK(names.count("cadence@-7") == 1);
  CHECK_THROWS_AS(augment_corpus(corpus, CorpusRole::Validation), std::logic_error);
  CHECK_THROWS_AS(augment_corpus(corpus, CorpusRole::Test), std::logic_error);
}

TEST_CASE("synthetic corpora") {
  SynthOptions opts;
  opts.pieces = 6;
  opts.seed = 42;
  const auto a = synthesize_corpus(opts);
  const auto b = synthesize_corpus(opts);
  REQUIRE(a.size() == 6);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].score == b[i].score);
    CHECK(a[i].timeline == b[i].timeline);
    CHECK_NOTHROW(check_coverage(a[i]));
    CHECK(a[i].timeline.start() == RationalTime(0));
    CHECK(a[i].timeline.end() == a[i].score.end());
  }
  CHECK(a[0].name == "piece_000");
  opts.seed = 43;
  CHECK_FALSE(synthesize_corpus(opts)[0].score == a[0].score);

  const auto dir = std::filesystem::temp_directory_path() / "chordgraph_unit_corpus";
  std::filesystem::remove_all(dir);
  write_corpus(dir, a);
  const auto back = read_corpus(dir);
  REQUIRE(back.size() == a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(back[i].name == a[i].name);
    CHECK(back[i].score == a[i].score);
    CHECK(back[i].timeline == a[i].timeline);
  }
  std::filesystem::remove(dir / "piece_000.tsv");
  CHECK_THROWS_AS(read_corpus(dir), CorpusError);
  std::filesystem::remove_all(dir);
}
