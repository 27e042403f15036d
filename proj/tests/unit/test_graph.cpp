#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "chordgraph/score_graph.hpp"
#include "oracles.hpp"
#include "random_score.hpp"

using namespace chordgraph;

namespace {

using cgtest::as_set;
using cgtest::EdgeSet;
using cgtest::enumerate_edges;

ScoreGraph graph_of(const Score &s, bool reverse = true) { return build_graph(s, extract_features(s), {reverse}); }

}  // namespace

TEST_CASE("two simultaneous notes") {
  const Score s = parse_note_table("N 0 1/4 C 0 4\nN 0 1/4 E 0 4\n");
  const ScoreGraph g = graph_of(s);
  CHECK(as_set(g.edges_of(Relation::Onset)) == EdgeSet{{0, 1}, {1, 0}});
  CHECK(g.edges_of(Relation::During).empty());
  CHECK(g.edges_of(Relation::Follow).empty());
  CHECK(g.edges_of(Relation::Silence).empty());
}

TEST_CASE("follow and silence boundaries") {
  const ScoreGraph follow = graph_of(parse_note_table("N 0 1/4 C 0 4\nN 1/4 1/4 D 0 4\n"));
  CHECK(as_set(follow.edges_of(Relation::Follow)) == EdgeSet{{0, 1}});
  CHECK(follow.edges_of(Relation::Silence).empty());
  // B starts exactly when A ends: that is also "while A sounds".
  CHECK(as_set(follow.edges_of(Relation::During)) == EdgeSet{{0, 1}});

  const ScoreGraph gap = graph_of(parse_note_table("N 0 1/4 C 0 4\nN 1/2 1/4 D 0 4\n"));
  CHECK(as_set(gap.edges_of(Relation::Silence)) == EdgeSet{{0, 1}});
  CHECK(gap.edges_of(Relation::Follow).empty());

  const ScoreGraph blocked = graph_of(parse_note_table("N 0 1/4 C 0 4\nN 3/8 1/8 D 0 4\nN 1/2 1/4 E 0 4\n"));
  CHECK(as_set(blocked.edges_of(Relation::Silence)) == EdgeSet{{0, 1}});
}

TEST_CASE("reverse during mirrors during") {
  Rng rng(3);
  const Score s = cgtest::random_score(rng, 20);
  const ScoreGraph with = graph_of(s, true);
  const ScoreGraph without = graph_of(s, false);
  CHECK(with.relations().size() == 5);
  CHECK(without.relations().size() == 4);
  CHECK(without.edges_of(Relation::DuringRev).empty());
  EdgeSet mirrored;
  for (const Edge &e : with.edges_of(Relation::During)) mirrored.insert({e.dst, e.src});
  CHECK(as_set(with.edges_of(Relation::DuringRev)) == mirrored);
}

TEST_CASE("edge sets match the pairwise enumerator") {
  Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const Score s = cgtest::random_score(rng, 1 + rng.below(14));
    const ScoreGraph g = graph_of(s);
    const auto expect = enumerate_edges(s);
    for (std::size_t r = 0; r < 4; ++r) CHECK(as_set(g.edges[r]) == expect[r]);
    for (std::size_t r = 0; r < kRelationSlots; ++r) CHECK(std::is_sorted(g.edges[r].begin(), g.edges[r].end()));
    CHECK(validate_graph(s, g).empty());
  }
}

TEST_CASE("onset partition groups by exact onset") {
  Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const Score s = cgtest::random_score(rng, 1 + rng.below(25));
    std::map<RationalTime, std::vector<std::size_t>> oracle;
    for (const Note &n : s.notes()) oracle[n.onset].push_back(n.id);
    std::vector<std::vector<std::size_t>> expect;
    for (auto &[t, ids] : oracle) expect.push_back(ids);
    CHECK(onset_partition(graph_of(s)) == expect);
  }
  const Score chord = parse_note_table("N 0 1 C 0 4\nN 0 1 E 0 4\nN 0 1 G 0 4\nN 0 1 C 0 5\n");
  CHECK(onset_partition(graph_of(chord)).size() == 1);
  CHECK(graph_of(chord).edges_of(Relation::Onset).size() == 12);
  const Score line = parse_note_table("N 0 1/4 C 0 4\nN 1/4 1/4 D 0 4\nN 1/2 1/4 E 0 4\n");
  CHECK(onset_partition(graph_of(line)).size() == 3);
}

TEST_CASE("validate_graph reports tampering") {
  const Score s = parse_note_table("N 0 1/4 C 0 4\nN 0 1/4 E 0 4\nN 1/4 1/4 G 0 4\n");
  ScoreGraph g = graph_of(s);
  REQUIRE(validate_graph(s, g).empty());
  g.edges[static_cast<std::size_t>(Relation::Follow)].pop_back();
  g.edges[static_cast<std::size_t>(Relation::Silence)].push_back({2, 0});
  const auto v = validate_graph(s, g);
  REQUIRE(v.size() == 2);
  std::set<GraphViolation::Kind> kinds;
  for (const auto &x : v) kinds.insert(x.kind);
  CHECK(kinds == std::set<GraphViolation::Kind>{GraphViolation::Kind::Missing, GraphViolation::Kind::Extra});
  CHECK_FALSE(v[0].describe().empty());
}

TEST_CASE("build_graph rejects mismatched features") {
  const Score s = parse_note_table("N 0 1/4 C 0 4\nN 0 1/4 E 0 4\n");
  CHECK_THROWS_AS(build_graph(s, Matrix(1, kFeatureDim)), std::invalid_argument);
}

TEST_CASE("edge dump") {
  const ScoreGraph g = graph_of(parse_note_table("N 0 1/4 C 0 4\nN 0 1/4 E 0 4\n"));
  CHECK(dump_edges(g) == "E onset 0 1\nE onset 1 0\n");
  const std::string csv = dump_features_csv(g);
  CHECK(csv.rfind("f0,f1,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}
