#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "chordgraph/harmony.hpp"
#include "chordgraph/rational.hpp"

namespace chordgraph {

enum class Task : std::uint8_t {
  LocalKey,
  Tonicization,
  DegreePrimary,
  DegreeSecondary,
  Quality,
  Inversion,
  Root,
  RomanNumeralRestricted,
  HarmonicRhythm,
  PcSet,
  Bass,
};

inline constexpr std::size_t kTaskCount = 11;
inline constexpr std::size_t kHarmonicRhythmCap = 6;

/// Ordered class vocabulary of one task. Loaded from the bundled vocabulary
/// files (one label per line, index = line number).
class TaskSpec {
 public:
  TaskSpec(Task task, std::string name, std::vector<std::string> vocabulary);

  Task task() const { return task_; }
  const std::string &name() const { return name_; }
  const std::vector<std::string> &vocabulary() const { return vocabulary_; }
  std::size_t size() const { return vocabulary_.size(); }
  std::optional<std::size_t> index_of(std::string_view label) const;
  const std::string &label(std::size_t index) const { return vocabulary_.at(index); }

 private:
  Task task_;
  std::string name_;
  std::vector<std::string> vocabulary_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// The 11 tasks in `Task` order.
const std::vector<TaskSpec> &task_registry();
const TaskSpec &task_spec(Task task);
std::optional<Task> task_from_name(std::string_view name);
/// Raw text of a bundled vocabulary file, keyed by task name.
std::string_view bundled_vocabulary(std::string_view task_name);

/// An entry of the restricted Roman-numeral vocabulary. Entries that name a
/// (degree, secondary degree, quality) triple are expressible conventionally;
/// augmented sixths carry explicit members instead; "Other" collects every
/// label the list does not cover.
struct RestrictedSymbol {
  std::string name;
  std::optional<Degree> primary;
  std::optional<Degree> secondary;
  std::optional<Quality> quality;
  std::vector<int> members;  ///< alternative-only chords: fifths relative to the tonic, root first
  bool is_other = false;

  bool alternative_only() const { return !is_other && !quality.has_value(); }
};

/// Parses a restricted-vocabulary entry such as "V7/V", "iiø7", "N", "Ger".
RestrictedSymbol parse_restricted_symbol(std::string_view name);
const std::vector<RestrictedSymbol> &restricted_symbols();
/// Index of the restricted symbol for a conventional triple, or the index of
/// "Other" when the list does not cover it.
std::size_t restricted_index(const Degree &primary, const std::optional<Degree> &secondary, Quality quality);
std::size_t restricted_other_index();

class LabelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Full per-onset annotation: the five conventional components plus the
/// auxiliary task labels. Ground truth derives the auxiliaries; predictions
/// carry whatever each head produced.
struct ChordLabel {
  Key key;
  Degree primary;
  std::optional<Degree> secondary;
  Quality quality = Quality::Major;
  int inversion = 0;
  SpelledPitchClass root;
  SpelledPitchClass bass;
  PcSet pcset;
  Key tonicization;
  std::size_t restricted = 0;

  friend bool operator==(const ChordLabel &, const ChordLabel &) = default;
};

/// Builds a label with every auxiliary field derived from the five components.
ChordLabel make_chord_label(const Key &key, const Degree &primary, const std::optional<Degree> &secondary,
                            Quality quality, int inversion);

/// Keys, roots, basses, pcsets and tonicizations move by `fifths`; degrees,
/// qualities, inversions and the restricted symbol stay put.
ChordLabel transpose_label(const ChordLabel &label, int fifths);

using TaskClasses = std::array<std::size_t, kTaskCount>;

/// Class index per task. Throws LabelError when a field is outside its
/// vocabulary.
TaskClasses encode_label(const ChordLabel &label, std::size_t harmonic_rhythm);
/// Reads every field back from its own task head.
ChordLabel label_from_classes(const TaskClasses &classes);
/// True when every field of `label` has a vocabulary entry.
bool label_in_vocabulary(const ChordLabel &label);

/// Conventional Roman numeral assembled from key, degrees, quality and
/// inversion, with the root recomputed from them.
struct RNLabel {
  Key key;
  Degree primary;
  std::optional<Degree> secondary;
  Quality quality = Quality::Major;
  int inversion = 0;
  SpelledPitchClass root;

  std::string text() const;
  friend bool operator==(const RNLabel &, const RNLabel &) = default;
};

RNLabel decode_conventional_rn(const TaskClasses &classes);

/// Alternative Roman numeral: key, restricted symbol and inversion.
struct AlternativeRN {
  Key key;
  std::size_t symbol = 0;
  int inversion = 0;

  const RestrictedSymbol &entry() const { return restricted_symbols().at(symbol); }
  bool alternative_only() const { return entry().alternative_only(); }
  friend bool operator==(const AlternativeRN &, const AlternativeRN &) = default;
};

AlternativeRN decode_alternative_rn(const TaskClasses &classes);

/// What actually sounds: root, pitch-class content and bass.
struct ChordIdentity {
  SpelledPitchClass root;
  PcSet pcset;
  SpelledPitchClass bass;
  friend bool operator==(const ChordIdentity &, const ChordIdentity &) = default;
};

std::optional<ChordIdentity> chord_identity(const RNLabel &rn);
/// nullopt for "Other" or an inversion the chord does not have.
std::optional<ChordIdentity> chord_identity(const AlternativeRN &rn);

struct LabelSegment {
  RationalTime onset;
  RationalTime duration;
  ChordLabel label;
  /// Predicted harmonic-rhythm class, or -1 when not recorded.
  int harmonic_rhythm = -1;

  RationalTime end() const { return onset + duration; }
  friend bool operator==(const LabelSegment &, const LabelSegment &) = default;
};

/// Time-segmented annotation. Segments are sorted, non-overlapping and have
/// positive durations.
struct LabelTimeline {
  std::vector<LabelSegment> segments;

  /// Throws LabelError on unsorted or overlapping segments and on
  /// non-positive durations.
  void validate() const;
  RationalTime start() const;
  RationalTime end() const;
  /// Segment containing t under the half-open [onset, onset + duration)
  /// convention, or nullptr inside a gap.
  const LabelSegment *at(RationalTime t) const;

  friend bool operator==(const LabelTimeline &, const LabelTimeline &) = default;
};

/// Per-onset class vectors. Onset t takes the label of the segment containing
/// it; the harmonic-rhythm class counts earlier onsets in the same segment,
/// capped at 6. Throws LabelError for uncovered onsets.
std::vector<TaskClasses> encode_labels(const LabelTimeline &timeline, const std::vector<RationalTime> &onsets);

/// TSV with columns
///   onset duration key degree1 degree2 quality inversion
///   [root bass pcset tonicization rn_alt [harmonic_rhythm]]
/// Lines starting with '#' are comments. Without auxiliary columns they are
/// derived from the first seven (which must then be consistent); with them,
/// every column is taken as written. A harmonic_rhythm of "-" means none.
LabelTimeline parse_timeline_tsv(std::string_view text);
LabelTimeline parse_timeline_tsv(std::istream &in);
std::string serialize_timeline_tsv(const LabelTimeline &timeline);

/// Fraction of segments whose conventional triple has a named restricted
/// symbol (i.e. is not "Other").
double restricted_coverage(const std::vector<LabelTimeline> &corpus);

}  // namespace chordgraph
