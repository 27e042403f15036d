#include "chordgraph/score_graph.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace chordgraph {

namespace {

constexpr std::array<std::string_view, kRelationSlots> kRelationNames = {"onset", "during", "follow", "silence",
                                                                         "during_rev"};

}  // namespace

std::string_view relation_name(Relation r) { return kRelationNames[static_cast<std::size_t>(r)]; }

std::optional<Relation> relation_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kRelationSlots; ++i) {
    if (kRelationNames[i] == name) return static_cast<Relation>(i);
  }
  return std::nullopt;
}

std::vector<Relation> ScoreGraph::relations() const {
  std::vector<Relation> out = {Relation::Onset, Relation::During, Relation::Follow, Relation::Silence};
  if (reverse_during) out.push_back(Relation::DuringRev);
  return out;
}

ScoreGraph build_graph(const Score &score, Matrix features, GraphOptions options) {
  if (features.rows != score.size()) {
    throw std::invalid_argument("feature matrix has " + std::to_string(features.rows) + " rows for " +
                                std::to_string(score.size()) + " notes");
  }
  ScoreGraph g;
  g.n_nodes = score.size();
  g.features = std::move(features);
  g.reverse_during = options.reverse_during;

  const auto &notes = score.notes();
  g.onsets.reserve(notes.size());
  for (const Note &n : notes) g.onsets.push_back(n.onset);

  // Notes are sorted by onset, so each onset group is a contiguous id range.
  std::vector<RationalTime> group_onset;
  std::vector<std::size_t> group_begin;
  for (std::size_t i = 0; i < notes.size(); ++i) {
    if (group_onset.empty() || group_onset.back() != notes[i].onset) {
      group_onset.push_back(notes[i].onset);
      group_begin.push_back(i);
    }
  }
  group_begin.push_back(notes.size());
  const auto group_range = [&](std::size_t gi) { return std::pair{group_begin[gi], group_begin[gi + 1]}; };

  auto &onset = g.edges[static_cast<std::size_t>(Relation::Onset)];
  auto &during = g.edges[static_cast<std::size_t>(Relation::During)];
  auto &follow = g.edges[static_cast<std::size_t>(Relation::Follow)];
  auto &silence = g.edges[static_cast<std::size_t>(Relation::Silence)];

  for (std::size_t gi = 0; gi + 1 < group_begin.size(); ++gi) {
    const auto [b, e] = group_range(gi);
    for (std::size_t u = b; u < e; ++u) {
      for (std::size_t v = b; v < e; ++v) {
        if (u != v) onset.push_back({u, v});
      }
    }
  }

  for (std::size_t v = 0; v < notes.size(); ++v) {
    const RationalTime start = notes[v].onset;
    const RationalTime end = notes[v].offset();

    // During: entering notes u with start < on(u) <= end.
    const auto first = std::upper_bound(group_onset.begin(), group_onset.end(), start);
    const auto last = std::upper_bound(group_onset.begin(), group_onset.end(), end);
    for (auto it = first; it != last; ++it) {
      const auto [b, e] = group_range(static_cast<std::size_t>(it - group_onset.begin()));
      for (std::size_t u = b; u < e; ++u) during.push_back({v, u});
    }

    // Follow: notes starting exactly at this note's end.
    const auto at_end = std::lower_bound(group_onset.begin(), group_onset.end(), end);
    if (at_end != group_onset.end() && *at_end == end) {
      const auto [b, e] = group_range(static_cast<std::size_t>(at_end - group_onset.begin()));
      for (std::size_t w = b; w < e; ++w) follow.push_back({v, w});
    }

    // Silence: the first onset strictly after the end, whatever is still sounding.
    if (last != group_onset.end()) {
      const auto [b, e] = group_range(static_cast<std::size_t>(last - group_onset.begin()));
      for (std::size_t w = b; w < e; ++w) silence.push_back({v, w});
    }
  }

  if (options.reverse_during) {
    auto &rev = g.edges[static_cast<std::size_t>(Relation::DuringRev)];
    rev.reserve(during.size());
    for (const Edge &edge : during) rev.push_back({edge.dst, edge.src});
  }
  for (auto &list : g.edges) std::sort(list.begin(), list.end());
  return g;
}

std::vector<std::vector<std::size_t>> onset_partition(const ScoreGraph &graph) {
  std::vector<std::size_t> order(graph.n_nodes);
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return graph.onsets[a] < graph.onsets[b]; });
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i == 0 || graph.onsets[order[i]] != graph.onsets[order[i - 1]]) groups.emplace_back();
    groups.back().push_back(order[i]);
  }
  for (auto &group : groups) std::sort(group.begin(), group.end());
  return groups;
}

std::string GraphViolation::describe() const {
  std::ostringstream os;
  os << (kind == Kind::Missing ? "missing edge " : "extra edge ") << relation_name(relation) << ' ' << edge.src
     << " -> " << edge.dst;
  return os.str();
}

std::vector<GraphViolation> validate_graph(const Score &score, const ScoreGraph &graph) {
  const auto &notes = score.notes();
  const std::size_t n = notes.size();
  std::array<std::set<Edge>, kRelationSlots> expected;

  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = 0; v < n; ++v) {
      if (u == v) continue;
      const RationalTime on_u = notes[u].onset;
      const RationalTime on_v = notes[v].onset;
      const RationalTime end_u = notes[u].offset();
      const RationalTime end_v = notes[v].offset();
      if (on_u == on_v) expected[static_cast<std::size_t>(Relation::Onset)].insert({u, v});
      if (on_u > on_v && on_u <= end_v) {
        expected[static_cast<std::size_t>(Relation::During)].insert({v, u});
        if (graph.reverse_during) expected[static_cast<std::size_t>(Relation::DuringRev)].insert({u, v});
      }
      if (end_u == on_v) expected[static_cast<std::size_t>(Relation::Follow)].insert({u, v});
      if (end_u < on_v) {
        bool blocked = false;
        for (std::size_t w = 0; w < n && !blocked; ++w) {
          blocked = notes[w].onset > end_u && notes[w].onset < on_v;
        }
        if (!blocked) expected[static_cast<std::size_t>(Relation::Silence)].insert({u, v});
      }
    }
  }

  std::vector<GraphViolation> out;
  for (std::size_t r = 0; r < kRelationSlots; ++r) {
    const auto relation = static_cast<Relation>(r);
    const std::set<Edge> actual(graph.edges[r].begin(), graph.edges[r].end());
    for (const Edge &e : expected[r]) {
      if (!actual.count(e)) out.push_back({GraphViolation::Kind::Missing, relation, e});
    }
    for (const Edge &e : actual) {
      if (!expected[r].count(e)) out.push_back({GraphViolation::Kind::Extra, relation, e});
    }
    if (actual.size() != graph.edges[r].size()) {
      // Duplicates are reported once per surplus copy.
      std::vector<Edge> sorted = graph.edges[r];
      std::sort(sorted.begin(), sorted.end());
      for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i] == sorted[i - 1]) out.push_back({GraphViolation::Kind::Extra, relation, sorted[i]});
      }
    }
  }
  return out;
}

std::string dump_edges(const ScoreGraph &graph) {
  std::vector<std::tuple<std::string_view, std::size_t, std::size_t>> lines;
  for (std::size_t r = 0; r < kRelationSlots; ++r) {
    for (const Edge &e : graph.edges[r]) lines.emplace_back(kRelationNames[r], e.src, e.dst);
  }
  std::sort(lines.begin(), lines.end());
  std::ostringstream os;
  for (const auto &[name, src, dst] : lines) os << "E " << name << ' ' << src << ' ' << dst << '\n';
  return os.str();
}

std::string dump_features_csv(const ScoreGraph &graph) {
  std::ostringstream os;
  for (std::size_t c = 0; c < graph.features.cols; ++c) os << (c ? "," : "") << 'f' << c;
  os << '\n';
  for (std::size_t r = 0; r < graph.features.rows; ++r) {
    for (std::size_t c = 0; c < graph.features.cols; ++c) os << (c ? "," : "") << graph.features(r, c);
    os << '\n';
  }
  return os.str();
}

}  // namespace chordgraph
