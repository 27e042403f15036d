#pragma once

#include <cstddef>
#include <vector>

#include "chordgraph/layers.hpp"
#include "chordgraph/rational.hpp"
#include "chordgraph/rng.hpp"
#include "chordgraph/score_graph.hpp"
#include "chordgraph/tensor.hpp"

namespace chordgraph {

/// Heterogeneous graphSAGE block. For every relation r a node v aggregates
/// the mean m_r of its r-neighbours (zero when it has none) and computes
/// ReLU([h_v, m_r] W_r); the block output averages these over all relations.
/// With `shared` a single W serves every relation.
class HeteroSageLayer {
 public:
  HeteroSageLayer() = default;
  HeteroSageLayer(std::size_t in, std::size_t out, std::vector<Relation> relations, bool shared, Rng &rng);
  static HeteroSageLayer zeros(std::size_t in, std::size_t out, std::vector<Relation> relations, bool shared);

  ad::Tensor forward(const ScoreGraph &graph, const ad::Tensor &h) const;

  std::size_t in_features() const { return in_; }
  std::size_t out_features() const { return out_; }
  bool shared() const { return shared_; }
  const std::vector<Relation> &relations() const { return relations_; }
  /// W_r, or the shared W.
  const ad::Tensor &weight(Relation r) const;
  ad::NamedTensors parameters() const;

 private:
  std::size_t in_ = 0;
  std::size_t out_ = 0;
  bool shared_ = false;
  std::vector<Relation> relations_;
  std::vector<ad::Tensor> weights_;  // one per relation, or one when shared
};

/// Mean of the r-neighbours of every node (sources of edges pointing at it),
/// n x d. Nodes without neighbours get a zero row.
ad::Tensor neighbour_mean(const ScoreGraph &graph, Relation r, const ad::Tensor &h);

struct ContractionResult {
  ad::Tensor pooled;                  ///< k x d, one row per distinct onset
  std::vector<RationalTime> onsets;   ///< strictly increasing
  std::vector<std::size_t> rep_map;   ///< node -> row of `pooled`
  std::vector<std::size_t> representatives;  ///< kept node per row
  ad::Tensor prefilter;               ///< n x d, h' plus summed onset neighbours
};

/// Onset edge contraction. H' = H W; every node sums its own H' row with
/// those of its onset neighbours; the smallest node id of each onset group
/// represents the group and rows come out sorted by onset.
class OnsetContraction {
 public:
  OnsetContraction() = default;
  OnsetContraction(std::size_t dim, Rng &rng);
  explicit OnsetContraction(ad::Tensor weight) : weight_(std::move(weight)) {}

  ContractionResult forward(const ScoreGraph &graph, const ad::Tensor &h) const;
  const ad::Tensor &weight() const { return weight_; }
  ad::NamedTensors parameters() const { return {{"weight", weight_}}; }

 private:
  ad::Tensor weight_;
};

struct EncoderConfig {
  std::size_t input_dim = 40;
  std::size_t hidden_size = 256;
  std::size_t sage_layers = 2;
  bool shared_weights = false;
  bool reverse_during = true;
  /// Each GRU layer runs both directions with hidden_size / 2 units apiece.
  bool bidirectional_gru = false;
  double dropout = 0.5;
};

struct EncoderOutput {
  ad::Tensor sequence;  ///< k x hidden
  std::vector<RationalTime> onsets;
};

/// SAGE stack -> onset contraction -> Linear+ReLU -> GRU -> GRU. Dropout
/// follows every SAGE layer, the MLP and both GRUs when training.
class Encoder {
 public:
  Encoder() = default;
  Encoder(const EncoderConfig &config, Rng &rng);

  EncoderOutput forward(const ScoreGraph &graph, bool training, Rng &rng) const;

  const EncoderConfig &config() const { return config_; }
  const std::vector<HeteroSageLayer> &sage() const { return sage_; }
  const OnsetContraction &contraction() const { return contraction_; }
  ad::NamedTensors parameters() const;

 private:
  EncoderConfig config_;
  std::vector<HeteroSageLayer> sage_;
  OnsetContraction contraction_;
  ad::Linear mlp_;
  ad::GruLayer gru1_;
  ad::GruLayer gru2_;
  ad::BiGruLayer bigru1_;
  ad::BiGruLayer bigru2_;
};

std::vector<Relation> message_relations(bool reverse_during);

}  // namespace chordgraph
