#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chordgraph/matrix.hpp"
#include "chordgraph/rational.hpp"
#include "chordgraph/score.hpp"

namespace chordgraph {

/// The four score relations plus `DuringRev`, an implementation relation that
/// mirrors every During edge so messages flow both ways.
enum class Relation : std::uint8_t { Onset, During, Follow, Silence, DuringRev };

inline constexpr std::size_t kScoreRelationCount = 4;
inline constexpr std::size_t kRelationSlots = 5;

std::string_view relation_name(Relation r);
std::optional<Relation> relation_from_name(std::string_view name);

struct Edge {
  std::size_t src = 0;
  std::size_t dst = 0;
  friend auto operator<=>(const Edge &, const Edge &) = default;
};

struct GraphOptions {
  bool reverse_during = true;
};

/// Typed multigraph over note indices. Edge lists are sorted by (src, dst).
struct ScoreGraph {
  std::size_t n_nodes = 0;
  std::array<std::vector<Edge>, kRelationSlots> edges;
  Matrix features;
  std::vector<RationalTime> onsets;
  bool reverse_during = true;

  const std::vector<Edge> &edges_of(Relation r) const { return edges[static_cast<std::size_t>(r)]; }
  /// Relations that take part in message passing (4, or 5 with DuringRev).
  std::vector<Relation> relations() const;
};

/// Builds all edges from exact onset/duration arithmetic:
///   Onset:   on(u) = on(v), u != v, both directions
///   During:  on(u) > on(v) and on(u) <= on(v) + dur(v), stored as (v, u)
///   Follow:  on(u) + dur(u) = on(v), stored as (u, v)
///   Silence: on(u) + dur(u) < on(v) with no onset strictly in between, (u, v)
ScoreGraph build_graph(const Score &score, Matrix features, GraphOptions options = {});

/// Groups of node indices sharing an onset, ordered by onset.
std::vector<std::vector<std::size_t>> onset_partition(const ScoreGraph &graph);

struct GraphViolation {
  enum class Kind { Missing, Extra };
  Kind kind;
  Relation relation;
  Edge edge;

  std::string describe() const;
};

/// Re-evaluates every relation predicate over all ordered pairs and reports
/// any difference from the stored edge sets. Empty iff the graph is exact.
std::vector<GraphViolation> validate_graph(const Score &score, const ScoreGraph &graph);

/// `E <relation> <src> <dst>` lines ordered by (relation name, src, dst).
std::string dump_edges(const ScoreGraph &graph);
/// Header row f0..f{d-1}, then one row per node.
std::string dump_features_csv(const ScoreGraph &graph);

}  // namespace chordgraph
