#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "chordgraph/rational.hpp"
#include "chordgraph/tasks.hpp"

namespace chordgraph {

/// One predicted segment: every task's class plus both decoded numerals.
struct AnalysisSegment {
  RationalTime onset;
  RationalTime duration;
  TaskClasses classes{};

  RationalTime end() const { return onset + duration; }
  RNLabel conventional() const { return decode_conventional_rn(classes); }
  AlternativeRN alternative() const { return decode_alternative_rn(classes); }
  friend bool operator==(const AnalysisSegment &, const AnalysisSegment &) = default;
};

/// Sorted, non-overlapping, gap-free predicted segments.
struct AnalysisTimeline {
  std::vector<AnalysisSegment> segments;

  /// Throws LabelError on unsorted, overlapping, gapped or empty segments.
  void validate() const;
  RationalTime start() const;
  RationalTime end() const;
  const AnalysisSegment *at(RationalTime t) const;

  friend bool operator==(const AnalysisTimeline &, const AnalysisTimeline &) = default;
};

/// Converts to/from the annotation TSV representation. Every predicted field
/// is written explicitly, so the conversion is lossless in both directions
/// for vocabulary labels.
LabelTimeline to_label_timeline(const AnalysisTimeline &timeline);
AnalysisTimeline to_analysis_timeline(const LabelTimeline &timeline);

/// What two labels are compared on.
struct FieldSelector {
  enum class Kind { Task, Key, Degree, Quality, Inversion, Root, ConventionalRN, AlternativeRN };
  Kind kind = Kind::ConventionalRN;
  Task task = Task::LocalKey;  ///< used with Kind::Task

  static FieldSelector of_task(Task t) { return {Kind::Task, t}; }
  static FieldSelector of(Kind k) { return {k, Task::LocalKey}; }
  bool equal(const TaskClasses &a, const TaskClasses &b) const;
  std::string name() const;
};

inline const RationalTime kDefaultGrid{1, 32};

/// Chord Symbol Recall: both timelines are sampled at start, start + grid,
/// ... below the common end; a sample matches when both have a segment there
/// and `field` agrees. Throws std::invalid_argument when the spans differ or
/// are empty, or when grid <= 0.
double csr(const AnalysisTimeline &pred, const LabelTimeline &truth, FieldSelector field,
           RationalTime grid = kDefaultGrid);

/// Fraction of `onsets` at which `field` agrees. Throws
/// std::invalid_argument for an empty onset list or an uncovered onset.
double onset_accuracy(const AnalysisTimeline &pred, const LabelTimeline &truth,
                      const std::vector<RationalTime> &onsets, FieldSelector field);

inline constexpr std::size_t kReportColumns = 8;
/// Key, Degree, Quality, Inversion, Root, RN, RN(Onset), RN_alt.
const std::array<std::string_view, kReportColumns> &report_column_names();

struct PieceReport {
  std::string name;
  std::array<double, kReportColumns> values{};  ///< percentages
};

struct CorpusReport {
  std::vector<PieceReport> pieces;
  /// Unweighted mean over pieces.
  std::array<double, kReportColumns> mean() const;
  std::string to_tsv() const;
  std::string to_table() const;
};

PieceReport report(std::string name, const AnalysisTimeline &pred, const LabelTimeline &truth,
                   const std::vector<RationalTime> &onsets, RationalTime grid = kDefaultGrid);

}  // namespace chordgraph
