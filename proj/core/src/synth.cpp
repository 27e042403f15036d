#include "chordgraph/synth.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace chordgraph {

namespace {

enum class Function { Tonic, Predominant, Dominant, Applied };

struct ChordChoice {
  Degree primary;
  std::optional<Degree> secondary;
  Quality quality;
  std::vector<int> inversions;  // allowed, first is most common
};

using Table = std::vector<ChordChoice>;

Degree deg(int step, int alter = 0) { return Degree{step, alter}; }

const Table &table(Mode mode, Function f) {
  using Q = Quality;
  static const Table major_tonic = {{deg(1), {}, Q::Major, {0, 0, 1}},
                                    {deg(6), {}, Q::Minor, {0, 1}},
                                    {deg(3), {}, Q::Minor, {0}},
                                    {deg(1), {}, Q::Major7, {0, 1}}};
  static const Table major_pre = {{deg(4), {}, Q::Major, {0, 0, 1}},
                                  {deg(2), {}, Q::Minor, {0, 1}},
                                  {deg(2), {}, Q::Minor7, {0, 1, 2}},
                                  {deg(4), {}, Q::Major7, {0}}};
  static const Table major_dom = {{deg(5), {}, Q::Major, {0, 0, 1}},
                                  {deg(5), {}, Q::Dominant7, {0, 1, 2, 3}},
                                  {deg(7), {}, Q::Diminished, {1}},
                                  {deg(7), {}, Q::HalfDiminished7, {0, 1}}};
  static const Table major_applied = {{deg(5), deg(5), Q::Major, {0, 1}},
                                      {deg(5), deg(5), Q::Dominant7, {0, 1, 3}},
                                      {deg(7), deg(5), Q::Diminished7, {0, 1}},
                                      {deg(5), deg(4), Q::Dominant7, {0, 1}},
                                      {deg(5), deg(6), Q::Major, {0, 1}},
                                      {deg(5), deg(2), Q::Dominant7, {0}}};
  static const Table minor_tonic = {{deg(1), {}, Q::Minor, {0, 0, 1}},
                                    {deg(6), {}, Q::Major, {0, 1}},
                                    {deg(3, 0), {}, Q::Major, {0}},
                                    {deg(7, -1), {}, Q::Major, {0}}};
  static const Table minor_pre = {{deg(4), {}, Q::Minor, {0, 0, 1}},
                                  {deg(2), {}, Q::Diminished, {1}},
                                  {deg(2), {}, Q::HalfDiminished7, {0, 1}},
                                  {deg(4), {}, Q::Minor7, {0}},
                                  {deg(2, -1), {}, Q::Major, {1}}};
  static const Table minor_dom = {{deg(5), {}, Q::Major, {0, 0, 1}},
                                  {deg(5), {}, Q::Dominant7, {0, 1, 2, 3}},
                                  {deg(7), {}, Q::Diminished7, {0, 1, 2}},
                                  {deg(7), {}, Q::Diminished, {1}}};
  static const Table minor_applied = {{deg(5), deg(5), Q::Major, {0, 1}},
                                      {deg(5), deg(5), Q::Dominant7, {0, 1, 3}},
                                      {deg(7), deg(5), Q::Diminished7, {0, 1}},
                                      {deg(5), deg(4), Q::Dominant7, {0, 1}}};
  const bool major = mode == Mode::Major;
  switch (f) {
    case Function::Tonic: return major ? major_tonic : minor_tonic;
    case Function::Predominant: return major ? major_pre : minor_pre;
    case Function::Dominant: return major ? major_dom : minor_dom;
    case Function::Applied: return major ? major_applied : minor_applied;
  }
  throw std::logic_error("unknown function");
}

template <typename T>
const T &pick(const std::vector<T> &v, Rng &rng) {
  return v[rng.below(v.size())];
}

struct PlannedChord {
  ChordLabel label;
  RationalTime onset;
  RationalTime duration;
};

ChordLabel choose(const Key &key, Function f, Rng &rng) {
  const ChordChoice &c = pick(table(key.mode, f), rng);
  return make_chord_label(key, c.primary, c.secondary, c.quality, pick(c.inversions, rng));
}

ChordLabel tonic_chord(const Key &key, int inversion = 0) {
  return make_chord_label(key, deg(1), std::nullopt, key.mode == Mode::Major ? Quality::Major : Quality::Minor,
                          inversion);
}

/// One phrase: tonic opening, optional tonic prolongation, predominant,
/// optional applied chord, cadence.
std::vector<ChordLabel> phrase(const Key &key, bool final_phrase, Rng &rng) {
  std::vector<ChordLabel> out;
  out.push_back(tonic_chord(key, rng.bernoulli(0.2) ? 1 : 0));
  if (rng.bernoulli(0.6)) out.push_back(choose(key, Function::Tonic, rng));
  if (rng.bernoulli(0.3)) out.push_back(choose(key, Function::Dominant, rng));
  out.push_back(choose(key, Function::Predominant, rng));
  if (rng.bernoulli(0.5)) out.push_back(choose(key, Function::Applied, rng));
  if (rng.bernoulli(0.3)) out.push_back(tonic_chord(key, 2));  // cadential six-four
  const Quality dom = rng.bernoulli(0.5) ? Quality::Dominant7 : Quality::Major;
  out.push_back(make_chord_label(key, deg(5), std::nullopt, dom, 0));
  if (final_phrase || rng.bernoulli(0.6)) out.push_back(tonic_chord(key));
  // No immediate repetitions: they would not be label changes.
  std::vector<ChordLabel> dedup;
  for (const auto &l : out) {
    if (dedup.empty() || !(dedup.back() == l)) dedup.push_back(l);
  }
  return dedup;
}

Key related_key(const Key &home, Rng &rng) {
  if (home.mode == Mode::Major) {
    if (rng.bernoulli(0.6)) return home.transposed(1);
    return Key{SpelledPitchClass::from_fifths(home.tonic.fifths() + 3), Mode::Minor};
  }
  if (rng.bernoulli(0.6)) return Key{SpelledPitchClass::from_fifths(home.tonic.fifths() - 3), Mode::Major};
  return home.transposed(1);
}

/// Chord members as pitch classes on the line of fifths, root first.
std::vector<int> members(const ChordLabel &l) {
  std::vector<int> out;
  for (int f : chord_member_fifths(l.quality)) out.push_back(l.root.fifths() + f);
  return out;
}

SpelledPitch place(int fifths, int low_midi) {
  const SpelledPitchClass pc = SpelledPitchClass::from_fifths(fifths);
  for (int octave = 0; octave <= 9; ++octave) {
    SpelledPitch p{pc.step, pc.alter, octave};
    if (p.midi() >= low_midi) return p;
  }
  throw std::logic_error("pitch out of range");
}

struct Voicing {
  SpelledPitch bass;
  std::vector<SpelledPitch> upper;  // ascending
};

Voicing voice(const ChordLabel &l, Rng &rng) {
  const auto m = members(l);
  Voicing v;
  v.bass = place(m[static_cast<std::size_t>(l.inversion)], 40 + static_cast<int>(rng.below(8)));
  std::vector<int> upper_pcs;
  if (m.size() == 4) {
    upper_pcs = {m[1], m[2], m[3]};
    if (l.inversion != 0) upper_pcs[1] = m[0];
  } else {
    upper_pcs = {m[0], m[1], m[2]};
  }
  // Close position from a random start in the treble.
  std::rotate(upper_pcs.begin(), upper_pcs.begin() + static_cast<long>(rng.below(3)), upper_pcs.end());
  int low = 60 + static_cast<int>(rng.below(5));
  for (int pc : upper_pcs) {
    SpelledPitch p = place(pc, low);
    v.upper.push_back(p);
    low = p.midi() + 1;
  }
  return v;
}

enum class Texture { Block, Repeated, Broken, Alberti };

void realise(const PlannedChord &c, Texture texture, const TimeSignature &ts, Rng &rng, std::vector<Note> &notes) {
  const Voicing v = voice(c.label, rng);
  auto add = [&](RationalTime onset, RationalTime dur, const SpelledPitch &p) {
    notes.push_back(Note{0, onset, dur, p});
  };
  const RationalTime beat = ts.beat_length();
  const RationalTime eighth(1, 8);
  switch (texture) {
    case Texture::Block:
      add(c.onset, c.duration, v.bass);
      for (const auto &p : v.upper) add(c.onset, c.duration, p);
      break;
    case Texture::Repeated:
      add(c.onset, c.duration, v.bass);
      for (RationalTime t = c.onset; t < c.onset + c.duration; t += beat) {
        for (const auto &p : v.upper) add(t, beat, p);
      }
      break;
    case Texture::Broken: {
      add(c.onset, c.duration, v.bass);
      std::size_t i = 0;
      const bool descending = rng.bernoulli(0.5);
      for (RationalTime t = c.onset; t < c.onset + c.duration; t += eighth, ++i) {
        const std::size_t k = i % v.upper.size();
        add(t, eighth, v.upper[descending ? v.upper.size() - 1 - k : k]);
      }
      break;
    }
    case Texture::Alberti: {
      add(c.onset, c.duration, v.bass);
      static constexpr std::size_t pattern[4] = {0, 2, 1, 2};
      std::size_t i = 0;
      for (RationalTime t = c.onset; t < c.onset + c.duration; t += eighth, ++i) {
        add(t, eighth, v.upper[pattern[i % 4]]);
      }
      break;
    }
  }
}

/// Chord durations for one bar.
std::vector<RationalTime> bar_split(const TimeSignature &ts, Rng &rng) {
  const RationalTime bar = ts.bar_length();
  if (rng.bernoulli(0.5)) return {bar};
  if (ts.beats == 4) return {RationalTime(1, 2), RationalTime(1, 2)};
  return {RationalTime(1, 2), RationalTime(1, 4)};
}

}  // namespace

Piece synthesize_piece(const std::string &name, const SynthOptions &options, Rng &rng) {
  if (options.min_phrases == 0 || options.max_phrases < options.min_phrases) {
    throw std::invalid_argument("synth: bad phrase count range");
  }
  for (int attempt = 0; attempt < 100; ++attempt) {
    const Mode mode = rng.bernoulli(0.6) ? Mode::Major : Mode::Minor;
    const int sig = static_cast<int>(rng.below(static_cast<std::uint64_t>(2 * options.max_signature + 1))) -
                    options.max_signature;
    const Key home{SpelledPitchClass::from_fifths(sig + (mode == Mode::Minor ? 3 : 0)), mode};
    const TimeSignature ts{RationalTime(0), rng.bernoulli(0.65) ? 4 : 3, 4};
    const std::size_t phrases =
        options.min_phrases + rng.below(options.max_phrases - options.min_phrases + 1);
    const bool modulate = phrases > 1 && rng.bernoulli(options.modulation_rate);
    const Key second = modulate ? related_key(home, rng) : home;

    std::vector<ChordLabel> labels;
    for (std::size_t p = 0; p < phrases; ++p) {
      const bool last = p + 1 == phrases;
      const Key &key = (modulate && p >= phrases / 2 && !last) ? second : home;
      const auto ph = phrase(key, last, rng);
      for (const auto &l : ph) {
        if (labels.empty() || !(labels.back() == l)) labels.push_back(l);
      }
    }

    // Every bar is filled; the closing tonic takes a whole bar of its own.
    std::vector<PlannedChord> plan;
    RationalTime t(0);
    const std::size_t body = labels.size() - 1;
    std::size_t i = 0;
    while (i < body) {
      auto durs = bar_split(ts, rng);
      if (i + durs.size() > body) durs = {ts.bar_length()};
      for (const RationalTime &d : durs) {
        plan.push_back({labels[i++], t, d});
        t += d;
      }
    }
    plan.push_back({labels.back(), t, ts.bar_length()});

    const Texture textures[] = {Texture::Block, Texture::Repeated, Texture::Broken, Texture::Alberti};
    const Texture main_texture = textures[rng.below(4)];
    std::vector<Note> notes;
    Piece piece;
    piece.name = name;
    for (std::size_t c = 0; c < plan.size(); ++c) {
      Texture tex = main_texture;
      if (c + 1 == plan.size()) tex = Texture::Block;
      else if (rng.bernoulli(0.15)) tex = textures[rng.below(4)];
      realise(plan[c], tex, ts, rng, notes);
      piece.timeline.segments.push_back({plan[c].onset, plan[c].duration, plan[c].label, -1});
    }
    try {
      piece.score = Score(std::move(notes), {ts});
      piece.timeline.validate();
      bool ok = true;
      for (const auto &s : piece.timeline.segments) ok = ok && label_in_vocabulary(s.label);
      if (!ok) continue;
      encode_labels(piece.timeline, piece.score.distinct_onsets());
    } catch (const std::exception &) {
      continue;
    }
    return piece;
  }
  throw std::runtime_error("synth: could not build a valid piece");
}

std::vector<Piece> synthesize_corpus(const SynthOptions &options) {
  Rng root(options.seed);
  std::vector<Piece> out;
  for (std::size_t i = 0; i < options.pieces; ++i) {
    Rng rng = root.split();
    char name[32];
    std::snprintf(name, sizeof(name), "piece_%03zu", i);
    out.push_back(synthesize_piece(name, options, rng));
  }
  return out;
}

}  // namespace chordgraph
