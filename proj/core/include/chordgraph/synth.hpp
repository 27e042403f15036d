#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "chordgraph/augment.hpp"
#include "chordgraph/rng.hpp"

namespace chordgraph {

struct SynthOptions {
  std::size_t pieces = 8;
  std::uint64_t seed = 0;
  std::size_t min_phrases = 2;
  std::size_t max_phrases = 3;
  /// Largest key signature (sharps or flats) of a home key.
  int max_signature = 4;
  /// Chance that the second half moves to a related key.
  double modulation_rate = 0.3;
};

/// Four-voice functional progressions (tonic, predominant, dominant and
/// secondary-dominant areas, with inversions and sevenths) realised as block
/// chords, repeated chords, broken chords or Alberti figures, in 4/4 or 3/4.
/// The annotation is built together with the notes, one segment per chord.
Piece synthesize_piece(const std::string &name, const SynthOptions &options, Rng &rng);

/// `options.pieces` pieces named piece_000, piece_001, ...; deterministic per
/// seed.
std::vector<Piece> synthesize_corpus(const SynthOptions &options);

}  // namespace chordgraph
