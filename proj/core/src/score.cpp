#include "chordgraph/score.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <istream>
#include <iterator>
#include <sstream>
#include <tuple>

namespace chordgraph {

namespace {

bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

void validate_time_signature(const TimeSignature &ts) {
  if (ts.beats <= 0) throw std::invalid_argument("time signature needs a positive beat count");
  if (!is_power_of_two(ts.beat_unit)) throw std::invalid_argument("time signature beat unit must be a power of two");
}

}  // namespace

Score::Score(std::vector<Note> notes, std::vector<TimeSignature> time_signatures)
    : notes_(std::move(notes)), time_signatures_(std::move(time_signatures)) {
  for (const Note &n : notes_) {
    if (n.duration <= RationalTime(0)) throw std::invalid_argument("note duration must be positive");
    if (n.onset < RationalTime(0)) throw std::invalid_argument("note onset must be non-negative");
    n.pitch.validate();
  }
  std::stable_sort(notes_.begin(), notes_.end(), [](const Note &a, const Note &b) {
    const int ma = a.pitch.midi();
    const int mb = b.pitch.midi();
    const int fa = a.pitch.pitch_class().fifths();
    const int fb = b.pitch.pitch_class().fifths();
    return std::tie(a.onset, ma, fa, a.duration) < std::tie(b.onset, mb, fb, b.duration);
  });
  for (std::size_t i = 0; i < notes_.size(); ++i) notes_[i].id = i;

  if (time_signatures_.empty()) time_signatures_.push_back({RationalTime(0), 4, 4});
  std::stable_sort(time_signatures_.begin(), time_signatures_.end(),
                   [](const TimeSignature &a, const TimeSignature &b) { return a.onset < b.onset; });
  if (time_signatures_.front().onset != RationalTime(0)) {
    throw std::invalid_argument("first time signature must be at onset 0");
  }
  for (std::size_t i = 0; i < time_signatures_.size(); ++i) {
    validate_time_signature(time_signatures_[i]);
    if (i > 0 && time_signatures_[i].onset == time_signatures_[i - 1].onset) {
      throw std::invalid_argument("two time signatures at onset " + time_signatures_[i].onset.to_string());
    }
  }
}

RationalTime Score::end() const {
  RationalTime end(0);
  for (const Note &n : notes_) end = std::max(end, n.offset());
  return end;
}

std::vector<RationalTime> Score::distinct_onsets() const {
  std::vector<RationalTime> out;
  for (const Note &n : notes_) {
    if (out.empty() || out.back() != n.onset) out.push_back(n.onset);
  }
  return out;
}

ParseError::ParseError(std::size_t line, std::size_t column, const std::string &what)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

namespace {

struct Token {
  std::string_view text;
  std::size_t column;  // 1-based
};

std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    if (i >= line.size()) break;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    tokens.push_back({line.substr(start, i - start), start + 1});
  }
  return tokens;
}

RationalTime parse_time(const Token &tok, std::size_t line) {
  try {
    return RationalTime::parse(tok.text);
  } catch (const std::exception &e) {
    throw ParseError(line, tok.column, e.what());
  }
}

int parse_integer(const Token &tok, std::size_t line, const char *what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(std::string(tok.text), &used);
    if (used != tok.text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception &) {
    throw ParseError(line, tok.column, std::string("malformed ") + what + " '" + std::string(tok.text) + "'");
  }
}

bool looks_like_time(std::string_view s) {
  return !s.empty() && (std::isdigit(static_cast<unsigned char>(s.front())) || s.front() == '-' || s.front() == '+');
}

}  // namespace

Score parse_note_table(std::string_view text, std::vector<std::string> *warnings) {
  std::vector<Note> notes;
  std::vector<TimeSignature> signatures;
  std::vector<std::size_t> signature_lines;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    std::vector<Token> tokens = tokenize(line);
    if (tokens.empty()) continue;

    // The record tag is optional: a bare 3-field line is a time signature and
    // a bare 5-field line is a note.
    char kind = 0;
    if (tokens.front().text == "T" || tokens.front().text == "N") {
      kind = tokens.front().text.front();
      tokens.erase(tokens.begin());
    } else if (looks_like_time(tokens.front().text) && (tokens.size() == 3 || tokens.size() == 5)) {
      kind = tokens.size() == 3 ? 'T' : 'N';
    } else {
      throw ParseError(line_no, tokens.front().column, "expected record tag 'T' or 'N'");
    }

    const std::size_t expected = kind == 'T' ? 3 : 5;
    if (tokens.size() != expected) {
      const std::size_t col = tokens.size() > expected ? tokens[expected].column : line.size() + 1;
      throw ParseError(line_no, col,
                       std::string(kind == 'T' ? "time signature" : "note") + " line needs " +
                           std::to_string(expected) + " fields, got " + std::to_string(tokens.size()));
    }

    if (kind == 'T') {
      TimeSignature ts;
      ts.onset = parse_time(tokens[0], line_no);
      ts.beats = parse_integer(tokens[1], line_no, "beat count");
      ts.beat_unit = parse_integer(tokens[2], line_no, "beat unit");
      if (ts.onset < RationalTime(0)) throw ParseError(line_no, tokens[0].column, "negative time signature onset");
      if (ts.beats <= 0) throw ParseError(line_no, tokens[1].column, "beat count must be positive");
      if (!is_power_of_two(ts.beat_unit)) throw ParseError(line_no, tokens[2].column, "beat unit must be a power of two");
      signatures.push_back(ts);
      signature_lines.push_back(line_no);
      continue;
    }

    Note note;
    note.onset = parse_time(tokens[0], line_no);
    note.duration = parse_time(tokens[1], line_no);
    if (note.onset < RationalTime(0)) throw ParseError(line_no, tokens[0].column, "negative onset");
    if (note.duration <= RationalTime(0)) throw ParseError(line_no, tokens[1].column, "duration must be positive");
    if (tokens[2].text.size() != 1 || !step_from_letter(tokens[2].text.front())) {
      throw ParseError(line_no, tokens[2].column, "unknown step letter '" + std::string(tokens[2].text) + "'");
    }
    note.pitch.step = *step_from_letter(tokens[2].text.front());
    note.pitch.alter = parse_integer(tokens[3], line_no, "alteration");
    note.pitch.octave = parse_integer(tokens[4], line_no, "octave");
    if (note.pitch.alter < kMinAlter || note.pitch.alter > kMaxAlter) {
      throw ParseError(line_no, tokens[3].column, "alteration outside [-2, 2]");
    }
    if (note.pitch.octave < kMinOctave || note.pitch.octave > kMaxOctave) {
      throw ParseError(line_no, tokens[4].column, "octave outside [0, 10]");
    }
    notes.push_back(note);
  }

  if (signatures.empty()) {
    if (warnings) warnings->push_back("no time signature given; assuming 4/4 at onset 0");
  } else {
    const auto first = std::min_element(signatures.begin(), signatures.end(),
                                        [](const auto &a, const auto &b) { return a.onset < b.onset; });
    if (first->onset != RationalTime(0)) {
      throw ParseError(signature_lines[static_cast<std::size_t>(first - signatures.begin())], 1,
                       "first time signature must be at onset 0");
    }
    for (std::size_t i = 0; i < signatures.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        if (signatures[i].onset == signatures[j].onset) {
          throw ParseError(signature_lines[i], 1, "duplicate time signature onset");
        }
      }
    }
  }
  return Score(std::move(notes), std::move(signatures));
}

Score parse_note_table(std::istream &in, std::vector<std::string> *warnings) {
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_note_table(std::string_view(text), warnings);
}

std::string serialize_note_table(const Score &score) {
  std::ostringstream out;
  for (const TimeSignature &ts : score.time_signatures()) {
    out << "T " << ts.onset << ' ' << ts.beats << ' ' << ts.beat_unit << '\n';
  }
  for (const Note &n : score.notes()) {
    out << "N " << n.onset << ' ' << n.duration << ' ' << step_letter(n.pitch.step) << ' ' << n.pitch.alter << ' '
        << n.pitch.octave << '\n';
  }
  return out.str();
}

MetricalPosition metrical_position(const Score &score, RationalTime t) {
  const auto &sigs = score.time_signatures();
  if (sigs.empty()) throw std::invalid_argument("score has no time signature");
  if (t < sigs.front().onset) throw std::invalid_argument("time " + t.to_string() + " precedes the first time signature");

  long bars_before = 0;
  std::size_t active = 0;
  for (std::size_t i = 0; i + 1 < sigs.size() && sigs[i + 1].onset <= t; ++i) {
    const RationalTime span = sigs[i + 1].onset - sigs[i].onset;
    bars_before += static_cast<long>((span / sigs[i].bar_length()).ceil());
    active = i + 1;
  }
  const TimeSignature &ts = sigs[active];
  const RationalTime since = t - ts.onset;
  const std::int64_t bars_in = (since / ts.bar_length()).floor();

  MetricalPosition pos;
  pos.bar_index = bars_before + static_cast<long>(bars_in);
  pos.beat_offset = since - RationalTime(bars_in) * ts.bar_length();

  const RationalTime beat = pos.beat_offset / ts.beat_length();
  if (pos.beat_offset == RationalTime(0)) {
    pos.strength = BeatStrength::Downbeat;
  } else if (!beat.is_integer()) {
    pos.strength = BeatStrength::Offbeat;
  } else if (ts.beats % 2 == 0 && beat.num() == ts.beats / 2) {
    pos.strength = BeatStrength::Strong;
  } else {
    pos.strength = BeatStrength::Weak;
  }
  return pos;
}

std::size_t duration_class(RationalTime d) {
  static const std::array<RationalTime, kDurationClassCount - 1> kDurations = {
      RationalTime(2),     RationalTime(1),     RationalTime(1, 2),  RationalTime(1, 4),  RationalTime(1, 8),
      RationalTime(1, 16), RationalTime(1, 32), RationalTime(1, 64), RationalTime(3, 4),  RationalTime(3, 8),
      RationalTime(3, 16), RationalTime(1, 6),  RationalTime(1, 12)};
  for (std::size_t i = 0; i < kDurations.size(); ++i) {
    if (kDurations[i] == d) return i;
  }
  return kDurationClassCount - 1;
}

Matrix extract_features(const Score &score) {
  Matrix x(score.size(), kFeatureDim);
  for (const Note &n : score.notes()) {
    auto row = x.row(n.id);
    row[kStepFeatureOffset + static_cast<std::size_t>(n.pitch.step)] = 1.0;
    row[kAlterFeatureOffset + static_cast<std::size_t>(n.pitch.alter - kMinAlter)] = 1.0;
    row[kOctaveFeatureOffset + static_cast<std::size_t>(std::min(n.pitch.octave, 9))] = 1.0;
    row[kDurationFeatureOffset + duration_class(n.duration)] = 1.0;
    row[kBeatFeatureOffset + static_cast<std::size_t>(metrical_position(score, n.onset).strength)] = 1.0;
  }
  return x;
}

}  // namespace chordgraph
