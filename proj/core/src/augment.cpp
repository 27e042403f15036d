#include "chordgraph/augment.hpp"

#include <cmath>

namespace chordgraph {

namespace {

constexpr int kMaxKeySignature = 7;
// Far enough that any alteration in [-2, 2] can reach any other.
constexpr int kSearchRadius = 34;

}  // namespace

int semitone_shift(int fifths) {
  const int raw = 7 * fifths;
  // Round raw / 12 half away from zero.
  const int q = raw >= 0 ? (2 * raw + 12) / 24 : -((-2 * raw + 12) / 24);
  return raw - 12 * q;
}

SpelledPitch transpose_pitch(const SpelledPitch &pitch, int fifths) {
  const SpelledPitchClass pc = SpelledPitchClass::from_fifths(pitch.pitch_class().fifths() + fifths);
  const int midi = pitch.midi() + semitone_shift(fifths);
  const int base = step_semitones(pc.step) + pc.alter;
  // midi = 12 * (octave + 1) + base, exactly divisible by construction.
  const int octave = (midi - base) / 12 - 1;
  return SpelledPitch{pc.step, pc.alter, octave};
}

std::optional<std::string> transposition_problem(const Score &score, const LabelTimeline &timeline, int fifths) {
  for (const Note &n : score.notes()) {
    const SpelledPitch p = transpose_pitch(n.pitch, fifths);
    if (p.alter < kMinAlter || p.alter > kMaxAlter) {
      return "note " + std::to_string(n.id) + " would need alteration " + std::to_string(p.alter);
    }
    if (p.octave < kMinOctave || p.octave > kMaxOctave) {
      return "note " + std::to_string(n.id) + " would leave the octave range";
    }
  }
  for (std::size_t i = 0; i < timeline.segments.size(); ++i) {
    const ChordLabel l = transpose_label(timeline.segments[i].label, fifths);
    const int sig = l.key.signature();
    if (sig < -kMaxKeySignature || sig > kMaxKeySignature) {
      return "segment " + std::to_string(i) + " key " + l.key.name() + " has " + std::to_string(std::abs(sig)) +
             (sig < 0 ? " flats" : " sharps");
    }
    if (!label_in_vocabulary(l)) return "segment " + std::to_string(i) + " label leaves the task vocabularies";
  }
  return std::nullopt;
}

std::pair<Score, LabelTimeline> transpose(const Score &score, const LabelTimeline &timeline, int fifths) {
  if (auto problem = transposition_problem(score, timeline, fifths)) {
    throw TranspositionError("cannot transpose by " + std::to_string(fifths) + " fifths: " + *problem);
  }
  std::vector<Note> notes = score.notes();
  for (Note &n : notes) n.pitch = transpose_pitch(n.pitch, fifths);
  LabelTimeline tl = timeline;
  for (auto &seg : tl.segments) seg.label = transpose_label(seg.label, fifths);
  return {Score(std::move(notes), score.time_signatures()), std::move(tl)};
}

std::vector<int> enumerate_transpositions(const Score &score, const LabelTimeline &timeline) {
  std::vector<int> out;
  for (int k = -kSearchRadius; k <= kSearchRadius; ++k) {
    if (!transposition_problem(score, timeline, k)) out.push_back(k);
  }
  return out;
}

std::vector<Piece> augment_corpus(const std::vector<Piece> &corpus, CorpusRole role) {
  if (role != CorpusRole::Train) throw std::logic_error("transposition augmentation applies to training corpora only");
  std::vector<Piece> out;
  for (const Piece &p : corpus) {
    out.push_back(p);
    for (int k : enumerate_transpositions(p.score, p.timeline)) {
      if (k == 0) continue;
      auto [score, tl] = transpose(p.score, p.timeline, k);
      out.push_back({p.name + "@" + (k > 0 ? "+" : "") + std::to_string(k), std::move(score), std::move(tl)});
    }
  }
  return out;
}

}  // namespace chordgraph
