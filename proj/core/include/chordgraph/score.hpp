#pragma once

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "chordgraph/matrix.hpp"
#include "chordgraph/pitch.hpp"
#include "chordgraph/rational.hpp"

namespace chordgraph {

struct Note {
  std::size_t id = 0;
  RationalTime onset;
  RationalTime duration;
  SpelledPitch pitch;

  RationalTime offset() const { return onset + duration; }

  friend bool operator==(const Note &, const Note &) = default;
};

struct TimeSignature {
  RationalTime onset;
  int beats = 4;
  int beat_unit = 4;

  /// Bar length in whole notes.
  RationalTime bar_length() const { return RationalTime(beats, beat_unit); }
  RationalTime beat_length() const { return RationalTime(1, beat_unit); }

  friend bool operator==(const TimeSignature &, const TimeSignature &) = default;
};

/// Notes sorted by (onset, MIDI number, spelling, duration) with ids 0..n-1 in
/// that order, plus time-signature events sorted by onset starting at 0.
class Score {
 public:
  Score() = default;
  /// Sorts, assigns ids and validates. Input ids are ignored. An empty
  /// time-signature list becomes a single 4/4 at onset 0.
  Score(std::vector<Note> notes, std::vector<TimeSignature> time_signatures);

  const std::vector<Note> &notes() const { return notes_; }
  const std::vector<TimeSignature> &time_signatures() const { return time_signatures_; }
  std::size_t size() const { return notes_.size(); }
  bool empty() const { return notes_.empty(); }

  /// Latest note offset; zero for an empty score.
  RationalTime end() const;
  /// Distinct onsets, ascending.
  std::vector<RationalTime> distinct_onsets() const;

  friend bool operator==(const Score &, const Score &) = default;

 private:
  std::vector<Note> notes_;
  std::vector<TimeSignature> time_signatures_;
};

/// Parse failure with a 1-based line and column.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string &what);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Reads the note-table text format. `warnings` receives non-fatal notes such
/// as the implicit 4/4 default.
Score parse_note_table(std::string_view text, std::vector<std::string> *warnings = nullptr);
Score parse_note_table(std::istream &in, std::vector<std::string> *warnings = nullptr);
std::string serialize_note_table(const Score &score);

enum class BeatStrength { Downbeat, Strong, Weak, Offbeat };

struct MetricalPosition {
  long bar_index = 0;
  RationalTime beat_offset;  ///< Offset from the bar start, whole-note units.
  BeatStrength strength = BeatStrength::Downbeat;

  friend bool operator==(const MetricalPosition &, const MetricalPosition &) = default;
};

/// Bars restart at every time-signature event; a bar cut short by a change
/// still counts as one bar.
MetricalPosition metrical_position(const Score &score, RationalTime t);

// Feature layout: step(7) alter(5) octave(10) duration(14) beat strength(4).
inline constexpr std::size_t kStepFeatureOffset = 0;
inline constexpr std::size_t kAlterFeatureOffset = 7;
inline constexpr std::size_t kOctaveFeatureOffset = 12;
inline constexpr std::size_t kDurationFeatureOffset = 22;
inline constexpr std::size_t kBeatFeatureOffset = 36;
inline constexpr std::size_t kFeatureDim = 40;
inline constexpr std::size_t kDurationClassCount = 14;

/// Index into the duration vocabulary (breve, whole, half, quarter, 8th,
/// 16th, 32nd, 64th, dotted half, dotted quarter, dotted 8th, triplet
/// quarter, triplet 8th, other).
std::size_t duration_class(RationalTime duration);

/// One row per note, in score order.
Matrix extract_features(const Score &score);

}  // namespace chordgraph
