#include "chordgraph/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace chordgraph {

namespace {

std::size_t ix(Task t) { return static_cast<std::size_t>(t); }

bool same(const TaskClasses &a, const TaskClasses &b, std::initializer_list<Task> tasks) {
  for (Task t : tasks) {
    if (a[ix(t)] != b[ix(t)]) return false;
  }
  return true;
}

/// Classes of every truth segment, so sampling does not re-encode.
std::vector<TaskClasses> truth_classes(const LabelTimeline &truth) {
  std::vector<TaskClasses> out;
  out.reserve(truth.segments.size());
  for (const auto &s : truth.segments) {
    out.push_back(encode_label(s.label, static_cast<std::size_t>(std::max(s.harmonic_rhythm, 0))));
  }
  return out;
}

std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", v);
  return buf;
}

}  // namespace

void AnalysisTimeline::validate() const {
  if (segments.empty()) throw LabelError("analysis timeline is empty");
  for (std::size_t i = 0; i < segments.size(); ++i) {
    if (segments[i].duration <= RationalTime(0)) {
      throw LabelError("analysis segment " + std::to_string(i) + " has non-positive duration");
    }
    if (i > 0 && segments[i].onset != segments[i - 1].end()) {
      throw LabelError("analysis segment " + std::to_string(i) + " does not start where its predecessor ends");
    }
  }
}

RationalTime AnalysisTimeline::start() const { return segments.empty() ? RationalTime(0) : segments.front().onset; }
RationalTime AnalysisTimeline::end() const { return segments.empty() ? RationalTime(0) : segments.back().end(); }

const AnalysisSegment *AnalysisTimeline::at(RationalTime t) const {
  auto it = std::upper_bound(segments.begin(), segments.end(), t,
                             [](const RationalTime &v, const AnalysisSegment &s) { return v < s.onset; });
  if (it == segments.begin()) return nullptr;
  --it;
  return t < it->end() ? &*it : nullptr;
}

LabelTimeline to_label_timeline(const AnalysisTimeline &timeline) {
  LabelTimeline out;
  for (const auto &s : timeline.segments) {
    out.segments.push_back({s.onset, s.duration, label_from_classes(s.classes),
                            static_cast<int>(s.classes[ix(Task::HarmonicRhythm)])});
  }
  return out;
}

AnalysisTimeline to_analysis_timeline(const LabelTimeline &timeline) {
  AnalysisTimeline out;
  for (const auto &s : timeline.segments) {
    out.segments.push_back(
        {s.onset, s.duration, encode_label(s.label, static_cast<std::size_t>(std::max(s.harmonic_rhythm, 0)))});
  }
  return out;
}

bool FieldSelector::equal(const TaskClasses &a, const TaskClasses &b) const {
  switch (kind) {
    case Kind::Task: return a[ix(task)] == b[ix(task)];
    case Kind::Key: return same(a, b, {Task::LocalKey});
    case Kind::Degree: return same(a, b, {Task::DegreePrimary, Task::DegreeSecondary});
    case Kind::Quality: return same(a, b, {Task::Quality});
    case Kind::Inversion: return same(a, b, {Task::Inversion});
    case Kind::Root: return same(a, b, {Task::Root});
    case Kind::ConventionalRN:
      return same(a, b, {Task::LocalKey, Task::DegreePrimary, Task::DegreeSecondary, Task::Quality, Task::Inversion});
    case Kind::AlternativeRN: return same(a, b, {Task::LocalKey, Task::RomanNumeralRestricted, Task::Inversion});
  }
  return false;
}

std::string FieldSelector::name() const {
  switch (kind) {
    case Kind::Task: return task_spec(task).name();
    case Kind::Key: return "Key";
    case Kind::Degree: return "Degree";
    case Kind::Quality: return "Quality";
    case Kind::Inversion: return "Inversion";
    case Kind::Root: return "Root";
    case Kind::ConventionalRN: return "RN";
    case Kind::AlternativeRN: return "RN_alt";
  }
  return "?";
}

double csr(const AnalysisTimeline &pred, const LabelTimeline &truth, FieldSelector field, RationalTime grid) {
  if (grid <= RationalTime(0)) throw std::invalid_argument("csr: grid must be positive");
  if (pred.segments.empty() || truth.segments.empty()) throw std::invalid_argument("csr: empty timeline");
  if (pred.start() != truth.start() || pred.end() != truth.end()) {
    throw std::invalid_argument("csr: spans differ (prediction [" + pred.start().to_string() + ", " +
                                pred.end().to_string() + "), truth [" + truth.start().to_string() + ", " +
                                truth.end().to_string() + "))");
  }
  const auto truth_cls = truth_classes(truth);
  const RationalTime start = truth.start();
  const RationalTime end = truth.end();
  std::size_t samples = 0, matches = 0;
  std::size_t pi = 0, ti = 0;
  for (RationalTime t = start; t < end; t += grid) {
    ++samples;
    while (pi < pred.segments.size() && pred.segments[pi].end() <= t) ++pi;
    while (ti < truth.segments.size() && truth.segments[ti].end() <= t) ++ti;
    if (pi == pred.segments.size() || ti == truth.segments.size()) continue;
    if (t < pred.segments[pi].onset || t < truth.segments[ti].onset) continue;
    if (field.equal(pred.segments[pi].classes, truth_cls[ti])) ++matches;
  }
  return static_cast<double>(matches) / static_cast<double>(samples);
}

double onset_accuracy(const AnalysisTimeline &pred, const LabelTimeline &truth,
                      const std::vector<RationalTime> &onsets, FieldSelector field) {
  if (onsets.empty()) throw std::invalid_argument("onset_accuracy: no onsets");
  std::size_t correct = 0;
  for (const RationalTime &t : onsets) {
    const AnalysisSegment *p = pred.at(t);
    const LabelSegment *g = truth.at(t);
    if (!p || !g) throw std::invalid_argument("onset_accuracy: onset " + t.to_string() + " is not covered");
    const auto gt = encode_label(g->label, static_cast<std::size_t>(std::max(g->harmonic_rhythm, 0)));
    if (field.equal(p->classes, gt)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(onsets.size());
}

const std::array<std::string_view, kReportColumns> &report_column_names() {
  static const std::array<std::string_view, kReportColumns> names = {"Key",  "Degree", "Quality",   "Inversion",
                                                                     "Root", "RN",     "RN(Onset)", "RN_alt"};
  return names;
}

PieceReport report(std::string name, const AnalysisTimeline &pred, const LabelTimeline &truth,
                   const std::vector<RationalTime> &onsets, RationalTime grid) {
  using K = FieldSelector::Kind;
  PieceReport r;
  r.name = std::move(name);
  const K csr_fields[] = {K::Key, K::Degree, K::Quality, K::Inversion, K::Root, K::ConventionalRN};
  for (std::size_t i = 0; i < 6; ++i) r.values[i] = 100.0 * csr(pred, truth, FieldSelector::of(csr_fields[i]), grid);
  r.values[6] = 100.0 * onset_accuracy(pred, truth, onsets, FieldSelector::of(K::ConventionalRN));
  r.values[7] = 100.0 * csr(pred, truth, FieldSelector::of(K::AlternativeRN), grid);
  return r;
}

std::array<double, kReportColumns> CorpusReport::mean() const {
  std::array<double, kReportColumns> m{};
  if (pieces.empty()) return m;
  for (const auto &p : pieces) {
    for (std::size_t i = 0; i < kReportColumns; ++i) m[i] += p.values[i];
  }
  for (double &v : m) v /= static_cast<double>(pieces.size());
  return m;
}

std::string CorpusReport::to_tsv() const {
  std::ostringstream os;
  os << "piece";
  for (auto c : report_column_names()) os << '\t' << c;
  os << '\n';
  auto row = [&](const std::string &name, const std::array<double, kReportColumns> &v) {
    os << name;
    for (double x : v) os << '\t' << percent(x);
    os << '\n';
  };
  for (const auto &p : pieces) row(p.name, p.values);
  row("mean", mean());
  return os.str();
}

std::string CorpusReport::to_table() const {
  std::size_t name_width = 5;
  for (const auto &p : pieces) name_width = std::max(name_width, p.name.size());
  std::ostringstream os;
  auto pad = [](std::string s, std::size_t w) {
    if (s.size() < w) s.insert(0, w - s.size(), ' ');
    return s;
  };
  os << std::string(name_width, ' ');
  for (auto c : report_column_names()) os << "  " << pad(std::string(c), 9);
  os << '\n';
  auto row = [&](std::string name, const std::array<double, kReportColumns> &v) {
    name.resize(name_width, ' ');
    os << name;
    for (double x : v) os << "  " << pad(percent(x), 9);
    os << '\n';
  };
  for (const auto &p : pieces) row(p.name, p.values);
  if (pieces.size() != 1) row("mean", mean());
  return os.str();
}

}  // namespace chordgraph
