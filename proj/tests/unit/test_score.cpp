#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "chordgraph/score.hpp"
#include "random_score.hpp"

using namespace chordgraph;

namespace {

__extension__ using i128 = __int128;

// Cross-multiplied comparison in 128 bits.
bool less_oracle(const RationalTime &a, const RationalTime &b) {
  return static_cast<i128>(a.num()) * b.den() < static_cast<i128>(b.num()) * a.den();
}

// Walks bars one at a time from the start of the piece.
MetricalPosition bar_walker(const std::vector<TimeSignature> &sigs, RationalTime t) {
  long bar = 0;
  for (std::size_t i = 0; i < sigs.size(); ++i) {
    const RationalTime next = i + 1 < sigs.size() ? sigs[i + 1].onset : t + RationalTime(1);
    RationalTime pos = sigs[i].onset;
    while (pos < next) {
      const RationalTime bar_end = pos + sigs[i].bar_length();
      if (t >= pos && t < bar_end && t < next) {
        const RationalTime off = t - pos;
        const RationalTime beats = off / sigs[i].beat_length();
        BeatStrength s = BeatStrength::Offbeat;
        if (off == RationalTime(0)) {
          s = BeatStrength::Downbeat;
        } else if (beats.is_integer()) {
          s = (sigs[i].beats % 2 == 0 && beats == RationalTime(sigs[i].beats / 2)) ? BeatStrength::Strong
                                                                                      : BeatStrength::Weak;
        }
        return {bar, off, s};
      }
      pos = bar_end;
      ++bar;
    }
  }
  FAIL("time not reached");
  return {};
}

}  // namespace

TEST_CASE("rational arithmetic is exact") {
  CHECK(RationalTime(2, 4) == RationalTime(1, 2));
  CHECK(RationalTime(3, -6) == RationalTime(-1, 2));
  CHECK(RationalTime(-1, 2).den() == 2);
  CHECK(RationalTime(1, 3) < RationalTime(3, 8));
  CHECK(RationalTime(-7, 2).floor() == -4);
  CHECK(RationalTime(-7, 2).ceil() == -3);
  CHECK(RationalTime::parse("6/8") == RationalTime(3, 4));
  CHECK(RationalTime::parse("5") == RationalTime(5));
  CHECK(RationalTime(3, 4).to_string() == "3/4");
  CHECK_THROWS_AS(RationalTime(1, 0), std::invalid_argument);
  CHECK_THROWS_AS(RationalTime::parse("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(RationalTime::parse("x/2"), std::invalid_argument);

  Rng rng(11);
  for (int i = 0; i < 2000; ++i) {
    auto r = [&] {
      return RationalTime(static_cast<std::int64_t>(rng.below(2001)) - 1000,
                          static_cast<std::int64_t>(rng.below(999)) + 1);
    };
    const RationalTime a = r(), b = r(), c = r();
    CHECK((a + b) + c == a + (b + c));
    CHECK((a < b) == less_oracle(a, b));
    CHECK((a - b) + b == a);
    if (b != RationalTime(0)) CHECK((a / b) * b == a);
  }
}

TEST_CASE("spelled pitches keep their spelling") {
  const SpelledPitch gs{Step::G, 1, 4}, ab{Step::A, -1, 4};
  CHECK(gs.midi() == ab.midi());
  CHECK_FALSE(gs == ab);
  CHECK(SpelledPitch{Step::C, 0, 4}.midi() == 60);
  CHECK(SpelledPitch{Step::C, -1, 4}.midi() == 59);
  CHECK_THROWS_AS((SpelledPitch{Step::C, 3, 4}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((SpelledPitch{Step::C, 0, 11}.validate()), std::invalid_argument);
  for (int f = -15; f <= 19; ++f) CHECK(SpelledPitchClass::from_fifths(f).fifths() == f);
  CHECK(SpelledPitchClass::from_fifths(6).name() == "F#");
  CHECK(SpelledPitchClass::from_fifths(-2).name() == "Bb");
  CHECK(SpelledPitchClass::parse("Ebb")->fifths() == -10);
}

TEST_CASE("note table parsing") {
  std::vector<std::string> warnings;
  const Score one = parse_note_table("T 0/1 4 4\nN 0/1 1/4 C 0 4\n", &warnings);
  REQUIRE(one.size() == 1);
  CHECK(one.notes()[0].pitch == SpelledPitch{Step::C, 0, 4});
  CHECK(one.notes()[0].duration == RationalTime(1, 4));
  CHECK(warnings.empty());

  const Score untagged = parse_note_table("0/1 4 4\n0/1 1/4 C 0 4\n");
  CHECK(untagged == one);

  warnings.clear();
  const Score defaulted = parse_note_table("N 0/1 1/4 C 0 4\n", &warnings);
  CHECK(warnings.size() == 1);
  CHECK(defaulted.time_signatures() == std::vector<TimeSignature>{{RationalTime(0), 4, 4}});

  auto error_at = [](std::string_view text) -> std::pair<std::size_t, std::size_t> {
    try {
      parse_note_table(text);
    } catch (const ParseError &e) {
      return {e.line(), e.column()};
    }
    return {0, 0};
  };
  CHECK(error_at("T 0/1 4 4\nN 0/1 1/4 H 0 4\n").first == 2);
  CHECK(error_at("T 0/1 4 4\nN 0/1 1/4 H 0 4\n").second > 1);
  CHECK(error_at("N 0/1 0/4 C 0 4\n").first == 1);
  CHECK(error_at("N 0/1 -1/4 C 0 4\n").first == 1);
  CHECK(error_at("N 0/0 1/4 C 0 4\n").first == 1);
  CHECK(error_at("# comment\n\nN 0/1 1/4 C 0\n").first == 3);
}

TEST_CASE("mixed denominators sort exactly") {
  std::string text = "T 0/1 4 4\n";
  std::vector<RationalTime> onsets;
  for (int i = 0; i < 8; ++i) {
    onsets.emplace_back(i, 3);
    onsets.emplace_back(i, 8);
  }
  for (const auto &o : onsets) text += "N " + o.to_string() + " 1/8 E 0 4\n";
  const Score s = parse_note_table(text);
  REQUIRE(s.size() == 16);
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    CHECK_FALSE(less_oracle(s.notes()[i + 1].onset, s.notes()[i].onset));
    CHECK(s.notes()[i].id == i);
  }
  CHECK(RationalTime(1, 3) < RationalTime(3, 8));
}

TEST_CASE("note table round trip") {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const Score s = cgtest::random_score(rng, 1 + rng.below(20));
    CHECK(parse_note_table(serialize_note_table(s)) == s);
  }
}

TEST_CASE("metrical positions") {
  const Score four(std::vector<Note>{}, {{RationalTime(0), 4, 4}});
  CHECK(metrical_position(four, RationalTime(0)) == MetricalPosition{0, RationalTime(0), BeatStrength::Downbeat});
  CHECK(metrical_position(four, RationalTime(1, 2)) == MetricalPosition{0, RationalTime(1, 2), BeatStrength::Strong});
  CHECK(metrical_position(four, RationalTime(1, 4)).strength == BeatStrength::Weak);
  CHECK(metrical_position(four, RationalTime(1, 8)).strength == BeatStrength::Offbeat);
  CHECK_THROWS(metrical_position(four, RationalTime(-1, 4)));

  const std::vector<TimeSignature> sigs = {{RationalTime(0), 3, 4}, {RationalTime(3, 4), 4, 4}};
  const Score mixed(std::vector<Note>{}, sigs);
  CHECK(metrical_position(mixed, RationalTime(7, 4)) == MetricalPosition{2, RationalTime(0), BeatStrength::Downbeat});
  CHECK(metrical_position(mixed, RationalTime(1, 2)).strength == BeatStrength::Weak);

  // A 5/8 bar cut short by a change after 3/8.
  const std::vector<TimeSignature> odd = {
      {RationalTime(0), 5, 8}, {RationalTime(3, 8), 6, 8}, {RationalTime(15, 8), 2, 2}};
  const Score odd_score(std::vector<Note>{}, odd);
  for (int k = 0; k < 120; ++k) {
    const RationalTime t(k, 24);
    CHECK(metrical_position(odd_score, t) == bar_walker(odd, t));
    CHECK(metrical_position(mixed, t) == bar_walker(sigs, t));
  }
}

TEST_CASE("feature rows") {
  const Score s = parse_note_table("T 0 4 4\nN 0 1/4 C 0 4\nN 1 1/4 C 0 4\nN 1/8 3/8 F 1 10\n");
  const Matrix x = extract_features(s);
  REQUIRE(x.rows == 3);
  REQUIRE(x.cols == kFeatureDim);
  CHECK(x(0, kStepFeatureOffset + 0) == 1.0);
  CHECK(x(0, kAlterFeatureOffset + 2) == 1.0);
  CHECK(x(0, kOctaveFeatureOffset + 4) == 1.0);
  CHECK(x(0, kDurationFeatureOffset + 3) == 1.0);
  CHECK(x(0, kBeatFeatureOffset + 0) == 1.0);
  // Sorted order is C4@0, F#10@1/8, C4@1: same pitch, duration and strength
  // in another bar.
  CHECK(std::equal(x.row(0).begin(), x.row(0).end(), x.row(2).begin()));
  // Octave 10 clamps into the last slot; dotted quarter; offbeat.
  const Note &fs = s.notes()[1];
  CHECK(fs.pitch.step == Step::F);
  CHECK(x(1, kOctaveFeatureOffset + 9) == 1.0);
  CHECK(x(1, kAlterFeatureOffset + 3) == 1.0);
  CHECK(x(1, kDurationFeatureOffset + 9) == 1.0);
  CHECK(x(1, kBeatFeatureOffset + 3) == 1.0);
  for (std::size_t r = 0; r < x.rows; ++r) {
    CHECK(std::accumulate(x.row(r).begin(), x.row(r).end(), 0.0) == 5.0);
  }
}

TEST_CASE("feature encoding matches a hand table on a scale") {
  // C major scale in eighths starting at beat 2 of a 4/4 bar.
  std::string text = "T 0 4 4\n";
  const char *letters = "CDEFGABC";
  for (int i = 0; i < 8; ++i) {
    text += "N " + RationalTime(2 + i, 8).to_string() + " 1/8 " + letters[i] + " 0 " + (i == 7 ? "5" : "4") + "\n";
  }
  const Matrix x = extract_features(parse_note_table(text));
  // step, alter slot, octave slot, duration slot, strength slot per note.
  const int table[8][5] = {{0, 2, 4, 4, 2}, {1, 2, 4, 4, 3}, {2, 2, 4, 4, 1}, {3, 2, 4, 4, 3},
                           {4, 2, 4, 4, 2}, {5, 2, 4, 4, 3}, {6, 2, 4, 4, 0}, {0, 2, 5, 4, 3}};
  for (std::size_t r = 0; r < 8; ++r) {
    Matrix expect(1, kFeatureDim);
    expect(0, kStepFeatureOffset + table[r][0]) = 1;
    expect(0, kAlterFeatureOffset + table[r][1]) = 1;
    expect(0, kOctaveFeatureOffset + table[r][2]) = 1;
    expect(0, kDurationFeatureOffset + table[r][3]) = 1;
    expect(0, kBeatFeatureOffset + table[r][4]) = 1;
    CHECK(std::equal(expect.data.begin(), expect.data.end(), x.row(r).begin()));
  }
}

TEST_CASE("duration classes") {
  CHECK(duration_class(RationalTime(2)) == 0);
  CHECK(duration_class(RationalTime(1)) == 1);
  CHECK(duration_class(RationalTime(1, 64)) == 7);
  CHECK(duration_class(RationalTime(3, 4)) == 8);
  CHECK(duration_class(RationalTime(3, 16)) == 10);
  CHECK(duration_class(RationalTime(1, 6)) == 11);
  CHECK(duration_class(RationalTime(1, 12)) == 12);
  CHECK(duration_class(RationalTime(5, 16)) == 13);
}

TEST_CASE("permuting input lines permutes nothing") {
  Rng rng(9);
  const Score s = cgtest::random_score(rng, 15);
  std::vector<Note> notes = s.notes();
  std::reverse(notes.begin(), notes.end());
  const Score t(notes, s.time_signatures());
  CHECK(extract_features(s) == extract_features(t));
}
