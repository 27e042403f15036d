#include "chordgraph/harmony.hpp"

#include <array>
#include <cctype>
#include <stdexcept>

namespace chordgraph {

namespace {

constexpr std::array<std::string_view, 7> kNumerals = {"I", "II", "III", "IV", "V", "VI", "VII"};
constexpr std::array<std::string_view, kQualityCount> kQualityNames = {"M", "m", "d", "a", "M7", "m7", "D7", "d7", "h7"};

// Degree tonics relative to the key tonic on the line of fifths.
constexpr std::array<int, 7> kMajorScale = {0, 2, 4, -1, 1, 3, 5};
constexpr std::array<int, 7> kHarmonicMinorScale = {0, 2, -3, -1, 1, -4, 5};

// Diatonic triad mode per degree (true = major or augmented).
constexpr std::array<bool, 7> kMajorKeyTriadIsMajor = {true, false, false, true, true, false, false};
constexpr std::array<bool, 7> kMinorKeyTriadIsMajor = {false, false, true, false, true, true, false};

std::string upper(std::string_view s) {
  std::string out(s);
  for (char &c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

std::string Key::name() const {
  std::string s = tonic.name();
  if (mode == Mode::Minor) s[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(s[0])));
  return s;
}

std::optional<Key> Key::parse(std::string_view text) {
  if (text.empty()) return std::nullopt;
  const char first = text.front();
  const bool minor = std::islower(static_cast<unsigned char>(first));
  std::string spelled(text);
  spelled[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(first)));
  const auto pc = SpelledPitchClass::parse(spelled);
  if (!pc) return std::nullopt;
  return Key{*pc, minor ? Mode::Minor : Mode::Major};
}

std::string Degree::name() const {
  std::string s;
  if (alter < 0) s.append(static_cast<std::size_t>(-alter), 'b');
  if (alter > 0) s.append(static_cast<std::size_t>(alter), '#');
  s += kNumerals[static_cast<std::size_t>(step - 1)];
  return s;
}

std::optional<Degree> Degree::parse(std::string_view text) {
  Degree d;
  d.alter = 0;
  std::size_t i = 0;
  while (i < text.size() && (text[i] == 'b' || text[i] == '#')) {
    d.alter += text[i] == '#' ? 1 : -1;
    ++i;
  }
  if (d.alter < -1 || d.alter > 1) return std::nullopt;
  const std::string numeral = upper(text.substr(i));
  for (std::size_t k = 0; k < kNumerals.size(); ++k) {
    if (numeral == kNumerals[k]) {
      d.step = static_cast<int>(k) + 1;
      return d;
    }
  }
  return std::nullopt;
}

std::string_view quality_name(Quality q) { return kQualityNames[static_cast<std::size_t>(q)]; }

std::optional<Quality> quality_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kQualityNames.size(); ++i) {
    if (kQualityNames[i] == name) return static_cast<Quality>(i);
  }
  return std::nullopt;
}

int chord_size(Quality q) { return static_cast<int>(q) >= static_cast<int>(Quality::Major7) ? 4 : 3; }

std::vector<int> chord_member_fifths(Quality q) {
  switch (q) {
    case Quality::Major: return {0, 4, 1};
    case Quality::Minor: return {0, -3, 1};
    case Quality::Diminished: return {0, -3, -6};
    case Quality::Augmented: return {0, 4, 8};
    case Quality::Major7: return {0, 4, 1, 5};
    case Quality::Minor7: return {0, -3, 1, -2};
    case Quality::Dominant7: return {0, 4, 1, -2};
    case Quality::Diminished7: return {0, -3, -6, -9};
    case Quality::HalfDiminished7: return {0, -3, -6, -2};
  }
  throw std::logic_error("unknown quality");
}

std::vector<int> PcSet::members() const {
  std::vector<int> out;
  for (int pc = 0; pc < 12; ++pc) {
    if (contains(pc)) out.push_back(pc);
  }
  return out;
}

PcSet PcSet::transposed(int semitones) const {
  PcSet out;
  for (int pc : members()) out.bits |= static_cast<std::uint16_t>(1u << (((pc + semitones) % 12 + 12) % 12));
  return out;
}

std::string PcSet::name() const {
  std::string s;
  for (int pc : members()) {
    if (!s.empty()) s += ',';
    s += std::to_string(pc);
  }
  return s;
}

std::optional<PcSet> PcSet::parse(std::string_view text) {
  PcSet out;
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t j = text.find(',', i);
    if (j == std::string_view::npos) j = text.size();
    const std::string_view part = text.substr(i, j - i);
    if (part.empty() || part.size() > 2) return std::nullopt;
    int pc = 0;
    for (char c : part) {
      if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
      pc = pc * 10 + (c - '0');
    }
    if (pc > 11) return std::nullopt;
    out.bits |= static_cast<std::uint16_t>(1u << pc);
    i = j + 1;
  }
  if (out.bits == 0) return std::nullopt;
  return out;
}

PcSet PcSet::of_chord(SpelledPitchClass root, Quality q) {
  PcSet out;
  for (int f : chord_member_fifths(q)) {
    out.bits |= static_cast<std::uint16_t>(1u << SpelledPitchClass::from_fifths(root.fifths() + f).semitone_class());
  }
  return out;
}

SpelledPitchClass scale_degree_pitch(const Key &key, const Degree &degree) {
  if (degree.step < 1 || degree.step > 7) throw std::invalid_argument("degree step outside 1..7");
  const auto &scale = key.mode == Mode::Major ? kMajorScale : kHarmonicMinorScale;
  return SpelledPitchClass::from_fifths(key.tonic.fifths() + scale[static_cast<std::size_t>(degree.step - 1)] +
                                        7 * degree.alter);
}

Key tonicized_key(const Key &key, const std::optional<Degree> &secondary) {
  if (!secondary) return key;
  Mode mode;
  if (secondary->alter < 0) {
    mode = Mode::Major;
  } else if (secondary->alter > 0) {
    mode = Mode::Minor;
  } else {
    const auto &table = key.mode == Mode::Major ? kMajorKeyTriadIsMajor : kMinorKeyTriadIsMajor;
    mode = table[static_cast<std::size_t>(secondary->step - 1)] ? Mode::Major : Mode::Minor;
  }
  return Key{scale_degree_pitch(key, *secondary), mode};
}

SpelledPitchClass derive_root(const Key &key, const Degree &primary, const std::optional<Degree> &secondary,
                              Quality /*quality*/) {
  return scale_degree_pitch(tonicized_key(key, secondary), primary);
}

SpelledPitchClass derive_bass(SpelledPitchClass root, Quality quality, int inversion) {
  const auto members = chord_member_fifths(quality);
  if (inversion < 0 || inversion >= static_cast<int>(members.size())) {
    throw std::invalid_argument("inversion " + std::to_string(inversion) + " does not exist for quality " +
                                std::string(quality_name(quality)));
  }
  return SpelledPitchClass::from_fifths(root.fifths() + members[static_cast<std::size_t>(inversion)]);
}

std::string roman_numeral_text(const Degree &primary, const std::optional<Degree> &secondary, Quality quality,
                               int inversion) {
  if (inversion < 0 || inversion >= chord_size(quality)) {
    throw std::invalid_argument("inversion " + std::to_string(inversion) + " does not exist for quality " +
                                std::string(quality_name(quality)));
  }
  const bool lower = quality == Quality::Minor || quality == Quality::Diminished || quality == Quality::Minor7 ||
                     quality == Quality::Diminished7 || quality == Quality::HalfDiminished7;
  std::string numeral = primary.name();
  if (lower) {
    for (char &c : numeral) {
      if (c == 'I' || c == 'V') c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
  }
  switch (quality) {
    case Quality::Diminished:
    case Quality::Diminished7: numeral += "o"; break;
    case Quality::Augmented: numeral += "+"; break;
    case Quality::HalfDiminished7: numeral += "ø"; break;
    case Quality::Major7: numeral += "M"; break;
    default: break;
  }
  static constexpr std::array<std::string_view, 3> kTriadFigures = {"", "6", "64"};
  static constexpr std::array<std::string_view, 4> kSeventhFigures = {"7", "65", "43", "42"};
  if (chord_size(quality) == 3) {
    numeral += kTriadFigures[static_cast<std::size_t>(inversion)];
  } else {
    numeral += kSeventhFigures[static_cast<std::size_t>(inversion)];
  }
  if (secondary) numeral += "/" + secondary->name();
  return numeral;
}

}  // namespace chordgraph
