#include "chordgraph/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace chordgraph {

namespace {

std::string read_text(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorpusError("cannot open '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

Score read_score_file(const std::filesystem::path &path) {
  const std::string text = read_text(path);
  try {
    return parse_note_table(text);
  } catch (const ParseError &e) {
    throw CorpusError(path.string() + ":" + std::to_string(e.line()) + ":" + std::to_string(e.column()) + ": " +
                      e.what());
  } catch (const std::invalid_argument &e) {
    throw CorpusError(path.string() + ": " + e.what());
  }
}

LabelTimeline read_timeline_file(const std::filesystem::path &path) {
  const std::string text = read_text(path);
  try {
    return parse_timeline_tsv(text);
  } catch (const std::exception &e) {
    throw CorpusError(path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CorpusError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw CorpusError("failed writing '" + path.string() + "'");
}

void check_coverage(const Piece &piece) {
  try {
    encode_labels(piece.timeline, piece.score.distinct_onsets());
  } catch (const LabelError &e) {
    throw CorpusError(piece.name + ": " + e.what());
  }
}

std::vector<Piece> read_corpus(const std::filesystem::path &dir) {
  if (!std::filesystem::is_directory(dir)) throw CorpusError("'" + dir.string() + "' is not a directory");
  std::vector<std::filesystem::path> tables;
  for (const auto &entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".notes") tables.push_back(entry.path());
  }
  std::sort(tables.begin(), tables.end());
  std::vector<Piece> out;
  for (const auto &table : tables) {
    std::filesystem::path tsv = table;
    tsv.replace_extension(".tsv");
    if (!std::filesystem::exists(tsv)) throw CorpusError("'" + table.string() + "' has no annotation file");
    Piece p{table.stem().string(), read_score_file(table), read_timeline_file(tsv)};
    check_coverage(p);
    out.push_back(std::move(p));
  }
  if (out.empty()) throw CorpusError("no .notes files in '" + dir.string() + "'");
  return out;
}

void write_corpus(const std::filesystem::path &dir, const std::vector<Piece> &pieces) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw CorpusError("cannot create '" + dir.string() + "': " + ec.message());
  for (const Piece &p : pieces) {
    write_text_file(dir / (p.name + ".notes"), serialize_note_table(p.score));
    write_text_file(dir / (p.name + ".tsv"), serialize_timeline_tsv(p.timeline));
  }
}

}  // namespace chordgraph
