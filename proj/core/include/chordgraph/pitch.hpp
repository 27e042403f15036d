#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace chordgraph {

enum class Step : std::uint8_t { C, D, E, F, G, A, B };

inline constexpr int kStepCount = 7;
inline constexpr int kMinAlter = -2;
inline constexpr int kMaxAlter = 2;
inline constexpr int kMinOctave = 0;
inline constexpr int kMaxOctave = 10;

/// Semitones above C for a natural step.
int step_semitones(Step step);
/// Position of the natural step on the line of fifths (F = -1, C = 0, ... B = 5).
int step_fifths(Step step);
char step_letter(Step step);
std::optional<Step> step_from_letter(char letter);

/// Letter plus alteration, without octave. `fifths()` is the line-of-fifths
/// coordinate: +1 is a perfect fifth up, +7 is a chromatic semitone up.
struct SpelledPitchClass {
  Step step = Step::C;
  int alter = 0;

  int fifths() const { return step_fifths(step) + 7 * alter; }
  /// Pitch class 0..11.
  int semitone_class() const;
  /// "C", "F#", "Bb", "Ebb", "G##".
  std::string name() const;

  static SpelledPitchClass from_fifths(int fifths);
  /// Inverse of name(); nullopt on malformed input.
  static std::optional<SpelledPitchClass> parse(std::string_view text);

  friend bool operator==(const SpelledPitchClass &, const SpelledPitchClass &) = default;
};

/// A spelled pitch. Distinct spellings of one MIDI number stay distinct.
struct SpelledPitch {
  Step step = Step::C;
  int alter = 0;
  int octave = 4;

  /// 12 * (octave + 1) + step semitones + alter.
  int midi() const;
  SpelledPitchClass pitch_class() const { return {step, alter}; }

  /// Throws std::invalid_argument when alter or octave leave their ranges.
  void validate() const;

  friend bool operator==(const SpelledPitch &, const SpelledPitch &) = default;
};

}  // namespace chordgraph
