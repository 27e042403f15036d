#pragma once

#include <array>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "chordgraph/eval.hpp"
#include "chordgraph/rng.hpp"
#include "chordgraph/score_graph.hpp"

namespace cgtest {

using EdgeSet = std::set<std::pair<std::size_t, std::size_t>>;

// Straight from the predicates, over all ordered pairs.
inline std::array<EdgeSet, 4> enumerate_edges(const chordgraph::Score &s) {
  using chordgraph::Note;
  std::array<EdgeSet, 4> out;
  const auto &n = s.notes();
  for (std::size_t u = 0; u < n.size(); ++u) {
    for (std::size_t v = 0; v < n.size(); ++v) {
      if (u == v) continue;
      if (n[u].onset == n[v].onset) out[0].insert({u, v});
      if (n[u].onset > n[v].onset && n[u].onset <= n[v].offset()) out[1].insert({v, u});
      if (n[u].offset() == n[v].onset) out[2].insert({u, v});
      if (n[u].offset() < n[v].onset) {
        bool between = false;
        for (const Note &w : n) between = between || (n[u].offset() < w.onset && w.onset < n[v].onset);
        if (!between) out[3].insert({u, v});
      }
    }
  }
  return out;
}

inline EdgeSet as_set(const std::vector<chordgraph::Edge> &edges) {
  EdgeSet s;
  for (const chordgraph::Edge &e : edges) s.insert({e.src, e.dst});
  return s;
}

inline std::vector<chordgraph::ChordLabel> label_pool() {
  using namespace chordgraph;
  std::vector<ChordLabel> out;
  for (const char *k : {"C", "G", "a"}) {
    const Key key = *Key::parse(k);
    for (const char *d : {"I", "V", "IV"}) {
      out.push_back(make_chord_label(key, *Degree::parse(d), std::nullopt, Quality::Major, 0));
      out.push_back(make_chord_label(key, *Degree::parse(d), std::nullopt, Quality::Major, 1));
    }
    out.push_back(make_chord_label(key, *Degree::parse("V"), *Degree::parse("V"), Quality::Dominant7, 0));
  }
  return out;
}

inline chordgraph::RationalTime random_step(chordgraph::Rng &rng) {
  static const long dens[] = {3, 5, 8, 12, 16, 32};
  return chordgraph::RationalTime(1 + static_cast<long>(rng.below(12)), dens[rng.below(6)]);
}

// Segments with random off-grid boundaries covering [0, end).
inline chordgraph::LabelTimeline random_truth(chordgraph::Rng &rng, chordgraph::RationalTime end,
                                              const std::vector<chordgraph::ChordLabel> &pool) {
  using chordgraph::RationalTime;
  std::vector<RationalTime> cuts = {RationalTime(0)};
  for (RationalTime t = random_step(rng); t < end; t += random_step(rng)) cuts.push_back(t);
  cuts.push_back(end);
  chordgraph::LabelTimeline tl;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    tl.segments.push_back({cuts[i], cuts[i + 1] - cuts[i], pool[rng.below(pool.size())]});
  }
  return tl;
}

inline chordgraph::AnalysisTimeline random_pred(chordgraph::Rng &rng, chordgraph::RationalTime end,
                                                const std::vector<chordgraph::ChordLabel> &pool) {
  return chordgraph::to_analysis_timeline(random_truth(rng, end, pool));
}

// Splits every segment once at a random interior point.
inline chordgraph::AnalysisTimeline split_everywhere(const chordgraph::AnalysisTimeline &tl, chordgraph::Rng &rng) {
  using chordgraph::RationalTime;
  chordgraph::AnalysisTimeline out;
  for (const auto &s : tl.segments) {
    const RationalTime cut = s.onset + s.duration * RationalTime(1 + static_cast<long>(rng.below(6)), 7);
    out.segments.push_back({s.onset, cut - s.onset, s.classes});
    out.segments.push_back({cut, s.end() - cut, s.classes});
  }
  return out;
}

// Samples every grid point by linear search through both timelines.
inline double grid_walk(const chordgraph::AnalysisTimeline &pred, const chordgraph::LabelTimeline &truth,
                        const chordgraph::FieldSelector &f, chordgraph::RationalTime grid) {
  using namespace chordgraph;
  std::size_t samples = 0, hits = 0;
  for (RationalTime t = truth.start(); t < truth.end(); t += grid) {
    ++samples;
    const AnalysisSegment *p = nullptr;
    for (const auto &s : pred.segments) {
      if (s.onset <= t && t < s.end()) p = &s;
    }
    const LabelSegment *q = nullptr;
    for (const auto &s : truth.segments) {
      if (s.onset <= t && t < s.end()) q = &s;
    }
    if (p && q && f.equal(p->classes, encode_label(q->label, 0))) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(samples);
}

}  // namespace cgtest
