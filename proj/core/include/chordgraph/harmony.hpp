#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chordgraph/pitch.hpp"

namespace chordgraph {

enum class Mode : std::uint8_t { Major, Minor };

/// A key: spelled tonic plus mode. Written "C", "F#", "Bb" for major and
/// "c", "f#", "bb" for minor.
struct Key {
  SpelledPitchClass tonic;
  Mode mode = Mode::Major;

  /// Sharps (positive) or flats (negative) in the key signature.
  int signature() const { return tonic.fifths() - (mode == Mode::Minor ? 3 : 0); }
  std::string name() const;
  static std::optional<Key> parse(std::string_view text);
  Key transposed(int fifths) const { return {SpelledPitchClass::from_fifths(tonic.fifths() + fifths), mode}; }

  friend bool operator==(const Key &, const Key &) = default;
};

/// Scale degree 1..7 with a chromatic alteration in [-1, 1]. Minor-key
/// degrees count on the harmonic minor scale (7 is the leading tone).
struct Degree {
  int step = 1;
  int alter = 0;

  /// "V", "bVI", "#IV".
  std::string name() const;
  static std::optional<Degree> parse(std::string_view text);

  friend bool operator==(const Degree &, const Degree &) = default;
};

enum class Quality : std::uint8_t { Major, Minor, Diminished, Augmented, Major7, Minor7, Dominant7, Diminished7, HalfDiminished7 };

inline constexpr int kQualityCount = 9;

std::string_view quality_name(Quality q);
std::optional<Quality> quality_from_name(std::string_view name);
/// 3 for triads, 4 for seventh chords.
int chord_size(Quality q);
/// Chord members on the line of fifths relative to the root, stacked in
/// thirds: root, third, fifth[, seventh].
std::vector<int> chord_member_fifths(Quality q);

/// 12-bit pitch-class set.
struct PcSet {
  std::uint16_t bits = 0;

  bool contains(int pc) const { return (bits >> pc) & 1u; }
  std::vector<int> members() const;
  /// Rotation by `semitones`.
  PcSet transposed(int semitones) const;
  /// Ascending pitch classes joined by commas, e.g. "2,6,9".
  std::string name() const;
  static std::optional<PcSet> parse(std::string_view text);
  static PcSet of_chord(SpelledPitchClass root, Quality q);

  friend bool operator==(const PcSet &, const PcSet &) = default;
};

/// Tonic of `degree` in `key` as a spelled pitch class.
SpelledPitchClass scale_degree_pitch(const Key &key, const Degree &degree);

/// Key implied by a secondary degree (the local key when there is none).
/// Unaltered degrees take the mode of their diatonic triad (major and
/// augmented triads give a major key); flattened degrees tonicize major keys
/// and sharpened ones minor keys.
Key tonicized_key(const Key &key, const std::optional<Degree> &secondary);

/// Root of the chord: the primary degree counted in the tonicized key.
SpelledPitchClass derive_root(const Key &key, const Degree &primary, const std::optional<Degree> &secondary,
                              Quality quality);

/// Lowest chord tone: inversion k selects chord member k above the root
/// (0 root, 1 third, 2 fifth, 3 seventh). Throws std::invalid_argument when
/// the inversion does not exist for the quality.
SpelledPitchClass derive_bass(SpelledPitchClass root, Quality quality, int inversion);

/// Roman-numeral text for display, e.g. "V65/V", "viio7", "iv6".
std::string roman_numeral_text(const Degree &primary, const std::optional<Degree> &secondary, Quality quality,
                               int inversion);

}  // namespace chordgraph
