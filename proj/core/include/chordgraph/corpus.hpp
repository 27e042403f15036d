#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "chordgraph/augment.hpp"

namespace chordgraph {

class CorpusError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A corpus directory holds `<name>.notes` note tables next to `<name>.tsv`
/// annotations. Pieces are read in file-name order; a note table without an
/// annotation, or any parse failure, throws CorpusError naming the file.
std::vector<Piece> read_corpus(const std::filesystem::path &dir);
void write_corpus(const std::filesystem::path &dir, const std::vector<Piece> &pieces);

Score read_score_file(const std::filesystem::path &path);
LabelTimeline read_timeline_file(const std::filesystem::path &path);
void write_text_file(const std::filesystem::path &path, const std::string &text);

/// Throws CorpusError unless the annotation covers every onset of the score
/// and every label encodes.
void check_coverage(const Piece &piece);

}  // namespace chordgraph
