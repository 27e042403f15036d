#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "chordgraph/score.hpp"
#include "chordgraph/tasks.hpp"

namespace chordgraph {

/// Intervals are steps on the line of fifths (+2 = up a major second).

class TranspositionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Semitone displacement of a transposition: the member of 7k mod 12
/// nearest to zero (a tritone goes down for +6 and up for -6).
int semitone_shift(int fifths);

/// Respells and moves the pitch; no range checks.
SpelledPitch transpose_pitch(const SpelledPitch &pitch, int fifths);

/// Why transposing by `fifths` is illegal, or nullopt when it is legal.
/// Legal means: every local key keeps at most 7 sharps or flats, every note
/// keeps its alteration in [-2, 2] and octave in range, and every label
/// stays inside the task vocabularies.
std::optional<std::string> transposition_problem(const Score &score, const LabelTimeline &timeline, int fifths);

/// Throws TranspositionError when the interval is illegal.
std::pair<Score, LabelTimeline> transpose(const Score &score, const LabelTimeline &timeline, int fifths);

/// Every legal interval in ascending order; always contains 0 for a legal
/// piece.
std::vector<int> enumerate_transpositions(const Score &score, const LabelTimeline &timeline);

enum class CorpusRole { Train, Validation, Test };

struct Piece {
  std::string name;
  Score score;
  LabelTimeline timeline;
};

/// Every piece in every legal transposition (the original included, first).
/// Only training corpora may be augmented; other roles throw std::logic_error.
std::vector<Piece> augment_corpus(const std::vector<Piece> &corpus, CorpusRole role);

}  // namespace chordgraph
