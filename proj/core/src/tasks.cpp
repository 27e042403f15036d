#include "chordgraph/tasks.hpp"

#include <algorithm>
#include <istream>
#include <iterator>
#include <sstream>

namespace chordgraph {

namespace {

constexpr std::array<std::string_view, kTaskCount> kTaskNames = {
    "localkey", "tonicization", "degree_primary", "degree_secondary", "quality",  "inversion",
    "root",     "romannumeral_restricted",         "harmonic_rhythm",  "pcset",   "bass"};

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string line(text.substr(pos, nl - pos));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) out.push_back(std::move(line));
    pos = nl + 1;
  }
  return out;
}

std::size_t task_index(Task t) { return static_cast<std::size_t>(t); }

std::size_t lookup(Task task, const std::string &label) {
  const auto idx = task_spec(task).index_of(label);
  if (!idx) {
    throw LabelError("label '" + label + "' is not in the " + std::string(kTaskNames[task_index(task)]) +
                     " vocabulary");
  }
  return *idx;
}

std::string secondary_name(const std::optional<Degree> &d) { return d ? d->name() : "none"; }

}  // namespace

TaskSpec::TaskSpec(Task task, std::string name, std::vector<std::string> vocabulary)
    : task_(task), name_(std::move(name)), vocabulary_(std::move(vocabulary)) {
  for (std::size_t i = 0; i < vocabulary_.size(); ++i) {
    if (!index_.emplace(vocabulary_[i], i).second) {
      throw std::invalid_argument("duplicate label '" + vocabulary_[i] + "' in " + name_ + " vocabulary");
    }
  }
}

std::optional<std::size_t> TaskSpec::index_of(std::string_view label) const {
  const auto it = index_.find(std::string(label));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const std::vector<TaskSpec> &task_registry() {
  static const std::vector<TaskSpec> registry = [] {
    std::vector<TaskSpec> specs;
    for (std::size_t i = 0; i < kTaskCount; ++i) {
      specs.emplace_back(static_cast<Task>(i), std::string(kTaskNames[i]), split_lines(bundled_vocabulary(kTaskNames[i])));
    }
    return specs;
  }();
  return registry;
}

const TaskSpec &task_spec(Task task) { return task_registry()[task_index(task)]; }

std::optional<Task> task_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kTaskCount; ++i) {
    if (kTaskNames[i] == name) return static_cast<Task>(i);
  }
  return std::nullopt;
}

RestrictedSymbol parse_restricted_symbol(std::string_view name) {
  RestrictedSymbol sym;
  sym.name = std::string(name);
  if (name == "Other") {
    sym.is_other = true;
    return sym;
  }
  // Augmented sixths, spelled on the line of fifths from the tonic: b6, 1, #4
  // (+ b3 for the German, + 2 for the French).
  if (name == "It") {
    sym.members = {-4, 0, 6};
    return sym;
  }
  if (name == "Ger") {
    sym.members = {-4, 0, -3, 6};
    return sym;
  }
  if (name == "Fr") {
    sym.members = {-4, 0, 2, 6};
    return sym;
  }
  if (name == "N") {
    sym.primary = Degree{2, -1};
    sym.quality = Quality::Major;
    return sym;
  }

  std::string_view head = name;
  if (const auto slash = name.find('/'); slash != std::string_view::npos) {
    head = name.substr(0, slash);
    sym.secondary = Degree::parse(name.substr(slash + 1));
    if (!sym.secondary) throw std::invalid_argument("bad secondary degree in '" + std::string(name) + "'");
  }
  std::size_t i = 0;
  while (i < head.size() && (head[i] == 'b' || head[i] == '#')) ++i;
  std::size_t j = i;
  while (j < head.size() && (head[j] == 'I' || head[j] == 'V' || head[j] == 'i' || head[j] == 'v')) ++j;
  if (j == i) throw std::invalid_argument("no numeral in '" + std::string(name) + "'");
  const bool upper_case = head[i] == 'I' || head[i] == 'V';
  sym.primary = Degree::parse(head.substr(0, j));
  if (!sym.primary) throw std::invalid_argument("bad numeral in '" + std::string(name) + "'");
  const std::string_view suffix = head.substr(j);
  if (upper_case) {
    if (suffix.empty()) sym.quality = Quality::Major;
    else if (suffix == "+") sym.quality = Quality::Augmented;
    else if (suffix == "7") sym.quality = Quality::Dominant7;
    else if (suffix == "M7") sym.quality = Quality::Major7;
  } else {
    if (suffix.empty()) sym.quality = Quality::Minor;
    else if (suffix == "o") sym.quality = Quality::Diminished;
    else if (suffix == "7") sym.quality = Quality::Minor7;
    else if (suffix == "o7") sym.quality = Quality::Diminished7;
    else if (suffix == "ø7") sym.quality = Quality::HalfDiminished7;
  }
  if (!sym.quality) throw std::invalid_argument("unknown quality suffix in '" + std::string(name) + "'");
  return sym;
}

const std::vector<RestrictedSymbol> &restricted_symbols() {
  static const std::vector<RestrictedSymbol> symbols = [] {
    std::vector<RestrictedSymbol> out;
    for (const auto &label : task_spec(Task::RomanNumeralRestricted).vocabulary()) {
      out.push_back(parse_restricted_symbol(label));
    }
    return out;
  }();
  return symbols;
}

std::size_t restricted_other_index() {
  static const std::size_t idx = [] {
    const auto &syms = restricted_symbols();
    for (std::size_t i = 0; i < syms.size(); ++i) {
      if (syms[i].is_other) return i;
    }
    throw std::logic_error("restricted vocabulary lacks 'Other'");
  }();
  return idx;
}

std::size_t restricted_index(const Degree &primary, const std::optional<Degree> &secondary, Quality quality) {
  const auto &syms = restricted_symbols();
  for (std::size_t i = 0; i < syms.size(); ++i) {
    const auto &s = syms[i];
    if (s.quality && *s.quality == quality && s.primary && *s.primary == primary && s.secondary == secondary) return i;
  }
  return restricted_other_index();
}

ChordLabel make_chord_label(const Key &key, const Degree &primary, const std::optional<Degree> &secondary,
                            Quality quality, int inversion) {
  ChordLabel l;
  l.key = key;
  l.primary = primary;
  l.secondary = secondary;
  l.quality = quality;
  l.inversion = inversion;
  l.root = derive_root(key, primary, secondary, quality);
  l.bass = derive_bass(l.root, quality, inversion);
  l.pcset = PcSet::of_chord(l.root, quality);
  l.tonicization = tonicized_key(key, secondary);
  l.restricted = restricted_index(primary, secondary, quality);
  return l;
}

ChordLabel transpose_label(const ChordLabel &label, int fifths) {
  ChordLabel out = label;
  out.key = label.key.transposed(fifths);
  out.tonicization = label.tonicization.transposed(fifths);
  out.root = SpelledPitchClass::from_fifths(label.root.fifths() + fifths);
  out.bass = SpelledPitchClass::from_fifths(label.bass.fifths() + fifths);
  out.pcset = label.pcset.transposed(7 * fifths);
  return out;
}

TaskClasses encode_label(const ChordLabel &label, std::size_t harmonic_rhythm) {
  TaskClasses c{};
  c[task_index(Task::LocalKey)] = lookup(Task::LocalKey, label.key.name());
  c[task_index(Task::Tonicization)] = lookup(Task::Tonicization, label.tonicization.name());
  c[task_index(Task::DegreePrimary)] = lookup(Task::DegreePrimary, label.primary.name());
  c[task_index(Task::DegreeSecondary)] = lookup(Task::DegreeSecondary, secondary_name(label.secondary));
  c[task_index(Task::Quality)] = lookup(Task::Quality, std::string(quality_name(label.quality)));
  c[task_index(Task::Inversion)] = lookup(Task::Inversion, std::to_string(label.inversion));
  c[task_index(Task::Root)] = lookup(Task::Root, label.root.name());
  if (label.restricted >= task_spec(Task::RomanNumeralRestricted).size()) {
    throw LabelError("restricted symbol index out of range");
  }
  c[task_index(Task::RomanNumeralRestricted)] = label.restricted;
  c[task_index(Task::HarmonicRhythm)] = std::min(harmonic_rhythm, kHarmonicRhythmCap);
  c[task_index(Task::PcSet)] = lookup(Task::PcSet, label.pcset.name());
  c[task_index(Task::Bass)] = lookup(Task::Bass, label.bass.name());
  return c;
}

bool label_in_vocabulary(const ChordLabel &label) {
  try {
    encode_label(label, 0);
    return true;
  } catch (const LabelError &) {
    return false;
  }
}

ChordLabel label_from_classes(const TaskClasses &c) {
  const auto text = [&](Task t) -> const std::string & { return task_spec(t).label(c[task_index(t)]); };
  ChordLabel l;
  l.key = *Key::parse(text(Task::LocalKey));
  l.tonicization = *Key::parse(text(Task::Tonicization));
  l.primary = *Degree::parse(text(Task::DegreePrimary));
  const std::string &sec = text(Task::DegreeSecondary);
  l.secondary = sec == "none" ? std::nullopt : Degree::parse(sec);
  l.quality = *quality_from_name(text(Task::Quality));
  l.inversion = std::stoi(text(Task::Inversion));
  l.root = *SpelledPitchClass::parse(text(Task::Root));
  l.restricted = c[task_index(Task::RomanNumeralRestricted)];
  l.pcset = *PcSet::parse(text(Task::PcSet));
  l.bass = *SpelledPitchClass::parse(text(Task::Bass));
  return l;
}

std::string RNLabel::text() const {
  std::string inv = inversion < chord_size(quality) ? roman_numeral_text(primary, secondary, quality, inversion)
                                                    : roman_numeral_text(primary, secondary, quality, 0) + "?";
  return key.name() + ":" + inv;
}

RNLabel decode_conventional_rn(const TaskClasses &classes) {
  const ChordLabel l = label_from_classes(classes);
  RNLabel rn;
  rn.key = l.key;
  rn.primary = l.primary;
  rn.secondary = l.secondary;
  rn.quality = l.quality;
  rn.inversion = l.inversion;
  rn.root = derive_root(rn.key, rn.primary, rn.secondary, rn.quality);
  return rn;
}

AlternativeRN decode_alternative_rn(const TaskClasses &classes) {
  AlternativeRN rn;
  rn.key = *Key::parse(task_spec(Task::LocalKey).label(classes[task_index(Task::LocalKey)]));
  rn.symbol = classes[task_index(Task::RomanNumeralRestricted)];
  rn.inversion = std::stoi(task_spec(Task::Inversion).label(classes[task_index(Task::Inversion)]));
  return rn;
}

std::optional<ChordIdentity> chord_identity(const RNLabel &rn) {
  if (rn.inversion < 0 || rn.inversion >= chord_size(rn.quality)) return std::nullopt;
  return ChordIdentity{rn.root, PcSet::of_chord(rn.root, rn.quality), derive_bass(rn.root, rn.quality, rn.inversion)};
}

std::optional<ChordIdentity> chord_identity(const AlternativeRN &rn) {
  const RestrictedSymbol &sym = rn.entry();
  if (sym.is_other) return std::nullopt;
  if (sym.quality) {
    RNLabel conv;
    conv.key = rn.key;
    conv.primary = *sym.primary;
    conv.secondary = sym.secondary;
    conv.quality = *sym.quality;
    conv.inversion = rn.inversion;
    conv.root = derive_root(conv.key, conv.primary, conv.secondary, conv.quality);
    return chord_identity(conv);
  }
  if (rn.inversion < 0 || rn.inversion >= static_cast<int>(sym.members.size())) return std::nullopt;
  const int tonic = rn.key.tonic.fifths();
  ChordIdentity id;
  id.root = SpelledPitchClass::from_fifths(tonic + sym.members.front());
  id.bass = SpelledPitchClass::from_fifths(tonic + sym.members[static_cast<std::size_t>(rn.inversion)]);
  for (int m : sym.members) {
    id.pcset.bits |= static_cast<std::uint16_t>(1u << SpelledPitchClass::from_fifths(tonic + m).semitone_class());
  }
  return id;
}

void LabelTimeline::validate() const {
  for (std::size_t i = 0; i < segments.size(); ++i) {
    if (segments[i].duration <= RationalTime(0)) {
      throw LabelError("segment " + std::to_string(i) + " has non-positive duration");
    }
    if (i > 0 && segments[i].onset < segments[i - 1].end()) {
      throw LabelError("segment " + std::to_string(i) + " overlaps or precedes its predecessor");
    }
  }
}

RationalTime LabelTimeline::start() const { return segments.empty() ? RationalTime(0) : segments.front().onset; }
RationalTime LabelTimeline::end() const { return segments.empty() ? RationalTime(0) : segments.back().end(); }

const LabelSegment *LabelTimeline::at(RationalTime t) const {
  auto it = std::upper_bound(segments.begin(), segments.end(), t,
                             [](const RationalTime &v, const LabelSegment &s) { return v < s.onset; });
  if (it == segments.begin()) return nullptr;
  --it;
  return t < it->end() ? &*it : nullptr;
}

std::vector<TaskClasses> encode_labels(const LabelTimeline &timeline, const std::vector<RationalTime> &onsets) {
  std::vector<TaskClasses> out;
  out.reserve(onsets.size());
  const LabelSegment *current = nullptr;
  std::size_t since_change = 0;
  if (!std::is_sorted(onsets.begin(), onsets.end())) throw LabelError("onsets must be sorted");
  for (const RationalTime &t : onsets) {
    const LabelSegment *seg = timeline.at(t);
    if (!seg) throw LabelError("onset " + t.to_string() + " is not covered by any annotation segment");
    if (seg == current) {
      ++since_change;
    } else {
      since_change = 0;
      current = seg;
    }
    out.push_back(encode_label(seg->label, since_change));
  }
  return out;
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == '\t' || line[i] == ' ' || line[i] == '\r')) ++i;
    if (i >= line.size()) break;
    const std::size_t start = i;
    while (i < line.size() && line[i] != '\t' && line[i] != ' ' && line[i] != '\r') ++i;
    fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

[[noreturn]] void tsv_error(std::size_t line, const std::string &what) {
  throw LabelError("annotation line " + std::to_string(line) + ": " + what);
}

}  // namespace

LabelTimeline parse_timeline_tsv(std::string_view text) {
  LabelTimeline tl;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto f = split_fields(line);
    if (f.empty()) continue;
    if (f.size() != 7 && f.size() != 12 && f.size() != 13) {
      tsv_error(line_no, "expected 7, 12 or 13 columns, got " + std::to_string(f.size()));
    }
    LabelSegment seg;
    try {
      seg.onset = RationalTime::parse(f[0]);
      seg.duration = RationalTime::parse(f[1]);
    } catch (const std::exception &e) {
      tsv_error(line_no, e.what());
    }
    const auto key = Key::parse(f[2]);
    const auto primary = Degree::parse(f[3]);
    std::optional<Degree> secondary;
    if (f[4] != "none") {
      secondary = Degree::parse(f[4]);
      if (!secondary) tsv_error(line_no, "bad secondary degree '" + std::string(f[4]) + "'");
    }
    const auto quality = quality_from_name(f[5]);
    if (!key) tsv_error(line_no, "bad key '" + std::string(f[2]) + "'");
    if (!primary) tsv_error(line_no, "bad degree '" + std::string(f[3]) + "'");
    if (!quality) tsv_error(line_no, "bad quality '" + std::string(f[5]) + "'");
    if (f[6].size() != 1 || f[6][0] < '0' || f[6][0] > '3') tsv_error(line_no, "bad inversion '" + std::string(f[6]) + "'");
    const int inversion = f[6][0] - '0';
    if (f.size() == 7) {
      if (inversion >= chord_size(*quality)) tsv_error(line_no, "inversion exceeds chord size");
      seg.label = make_chord_label(*key, *primary, secondary, *quality, inversion);
    } else {
      // Explicit auxiliary columns are taken as given (predictions need not
      // be mutually consistent).
      seg.label.key = *key;
      seg.label.primary = *primary;
      seg.label.secondary = secondary;
      seg.label.quality = *quality;
      seg.label.inversion = inversion;
      const auto root = SpelledPitchClass::parse(f[7]);
      const auto bass = SpelledPitchClass::parse(f[8]);
      const auto pcset = PcSet::parse(f[9]);
      const auto tonic = Key::parse(f[10]);
      const auto rn_alt = task_spec(Task::RomanNumeralRestricted).index_of(f[11]);
      if (!root || !bass || !pcset || !tonic || !rn_alt) tsv_error(line_no, "malformed auxiliary columns");
      seg.label.root = *root;
      seg.label.bass = *bass;
      seg.label.pcset = *pcset;
      seg.label.tonicization = *tonic;
      seg.label.restricted = *rn_alt;
    }
    if (f.size() == 13 && f[12] != "-") {
      if (f[12].size() != 1 || f[12][0] < '0' || f[12][0] > '6') tsv_error(line_no, "bad harmonic rhythm column");
      seg.harmonic_rhythm = f[12][0] - '0';
    }
    tl.segments.push_back(std::move(seg));
  }
  tl.validate();
  return tl;
}

LabelTimeline parse_timeline_tsv(std::istream &in) {
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_timeline_tsv(std::string_view(text));
}

std::string serialize_timeline_tsv(const LabelTimeline &timeline) {
  std::ostringstream os;
  os << "# onset\tduration\tkey\tdegree1\tdegree2\tquality\tinversion\troot\tbass\tpcset\ttonicization\trn_alt";
  const bool with_hr = std::any_of(timeline.segments.begin(), timeline.segments.end(),
                                   [](const LabelSegment &s) { return s.harmonic_rhythm >= 0; });
  if (with_hr) os << "\tharmonic_rhythm";
  os << '\n';
  for (const auto &s : timeline.segments) {
    const ChordLabel &l = s.label;
    os << s.onset << '\t' << s.duration << '\t' << l.key.name() << '\t' << l.primary.name() << '\t'
       << secondary_name(l.secondary) << '\t' << quality_name(l.quality) << '\t' << l.inversion << '\t'
       << l.root.name() << '\t' << l.bass.name() << '\t' << l.pcset.name() << '\t' << l.tonicization.name() << '\t'
       << task_spec(Task::RomanNumeralRestricted).label(l.restricted);
    if (with_hr) {
      if (s.harmonic_rhythm < 0) {
        os << "\t-";
      } else {
        os << '\t' << s.harmonic_rhythm;
      }
    }
    os << '\n';
  }
  return os.str();
}

double restricted_coverage(const std::vector<LabelTimeline> &corpus) {
  std::size_t total = 0, covered = 0;
  for (const auto &tl : corpus) {
    for (const auto &s : tl.segments) {
      ++total;
      if (restricted_index(s.label.primary, s.label.secondary, s.label.quality) != restricted_other_index()) ++covered;
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(covered) / static_cast<double>(total);
}

}  // namespace chordgraph
