#include "chordgraph/gnn.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>
#include <string>

#include "chordgraph/ops.hpp"

namespace chordgraph {

using ad::Tensor;

std::vector<Relation> message_relations(bool reverse_during) {
  std::vector<Relation> rels = {Relation::Onset, Relation::During, Relation::Follow, Relation::Silence};
  if (reverse_during) rels.push_back(Relation::DuringRev);
  return rels;
}

HeteroSageLayer::HeteroSageLayer(std::size_t in, std::size_t out, std::vector<Relation> relations, bool shared,
                                 Rng &rng)
    : in_(in), out_(out), shared_(shared), relations_(std::move(relations)) {
  if (relations_.empty()) throw std::invalid_argument("HeteroSageLayer needs at least one relation");
  const std::size_t count = shared_ ? 1 : relations_.size();
  for (std::size_t i = 0; i < count; ++i) weights_.push_back(Tensor::uniform_init(2 * in, out, 2 * in, rng));
}

HeteroSageLayer HeteroSageLayer::zeros(std::size_t in, std::size_t out, std::vector<Relation> relations, bool shared) {
  HeteroSageLayer layer;
  layer.in_ = in;
  layer.out_ = out;
  layer.shared_ = shared;
  layer.relations_ = std::move(relations);
  const std::size_t count = shared ? 1 : layer.relations_.size();
  for (std::size_t i = 0; i < count; ++i) layer.weights_.emplace_back(2 * in, out, 0.0, true);
  return layer;
}

const Tensor &HeteroSageLayer::weight(Relation r) const {
  if (shared_) return weights_.front();
  for (std::size_t i = 0; i < relations_.size(); ++i) {
    if (relations_[i] == r) return weights_[i];
  }
  throw std::invalid_argument("layer has no weight for relation " + std::string(relation_name(r)));
}

ad::NamedTensors HeteroSageLayer::parameters() const {
  if (shared_) return {{"w_shared", weights_.front()}};
  ad::NamedTensors out;
  for (std::size_t i = 0; i < relations_.size(); ++i) {
    out.emplace_back("w_" + std::string(relation_name(relations_[i])), weights_[i]);
  }
  return out;
}

Tensor neighbour_mean(const ScoreGraph &graph, Relation r, const Tensor &h) {
  const auto &edges = graph.edges_of(r);
  if (edges.empty()) return Tensor(graph.n_nodes, h.cols());
  std::vector<std::size_t> src, dst;
  src.reserve(edges.size());
  dst.reserve(edges.size());
  std::vector<double> degree(graph.n_nodes, 0.0);
  for (const Edge &e : edges) {
    src.push_back(e.src);
    dst.push_back(e.dst);
    degree[e.dst] += 1.0;
  }
  for (double &d : degree) d = d > 0.0 ? 1.0 / d : 0.0;
  const Tensor summed = ad::scatter_add_rows(ad::gather_rows(h, src), dst, graph.n_nodes);
  return ad::scale_rows(summed, degree);
}

Tensor HeteroSageLayer::forward(const ScoreGraph &graph, const Tensor &h) const {
  if (h.rows() != graph.n_nodes) {
    throw std::invalid_argument("sage: feature rows " + std::to_string(h.rows()) + " != nodes " +
                                std::to_string(graph.n_nodes));
  }
  if (h.cols() != in_) {
    throw std::invalid_argument("sage: feature width " + std::to_string(h.cols()) + " != " + std::to_string(in_));
  }
  if (graph.relations() != relations_) throw std::invalid_argument("sage: graph relation set differs from the layer's");
  Tensor total;
  for (Relation r : relations_) {
    const std::array<Tensor, 2> parts = {h, neighbour_mean(graph, r, h)};
    Tensor term = ad::relu(ad::matmul(ad::concat_cols(parts), weight(r)));
    total = total.defined() ? ad::add(total, term) : term;
  }
  return ad::scale(total, 1.0 / static_cast<double>(relations_.size()));
}

OnsetContraction::OnsetContraction(std::size_t dim, Rng &rng) : weight_(Tensor::uniform_init(dim, dim, dim, rng)) {}

ContractionResult OnsetContraction::forward(const ScoreGraph &graph, const Tensor &h) const {
  if (h.rows() != graph.n_nodes || h.cols() != weight_.rows()) {
    throw std::invalid_argument("contraction: input shape does not match graph or weight");
  }
  ContractionResult out;
  const Tensor projected = ad::matmul(h, weight_);
  const auto &onset_edges = graph.edges_of(Relation::Onset);
  if (onset_edges.empty()) {
    out.prefilter = projected;
  } else {
    std::vector<std::size_t> src, dst;
    for (const Edge &e : onset_edges) {
      src.push_back(e.src);
      dst.push_back(e.dst);
    }
    out.prefilter = ad::add(projected, ad::scatter_add_rows(ad::gather_rows(projected, src), dst, graph.n_nodes));
  }
  const auto groups = onset_partition(graph);
  out.rep_map.assign(graph.n_nodes, 0);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    out.representatives.push_back(*std::min_element(groups[g].begin(), groups[g].end()));
    out.onsets.push_back(graph.onsets[groups[g].front()]);
    for (std::size_t v : groups[g]) out.rep_map[v] = g;
  }
  out.pooled = ad::gather_rows(out.prefilter, out.representatives);
  return out;
}

Encoder::Encoder(const EncoderConfig &config, Rng &rng) : config_(config) {
  if (config.sage_layers == 0) throw std::invalid_argument("encoder needs at least one SAGE layer");
  if (config.hidden_size == 0) throw std::invalid_argument("hidden size must be positive");
  const auto rels = message_relations(config.reverse_during);
  std::size_t in = config.input_dim;
  for (std::size_t l = 0; l < config.sage_layers; ++l) {
    sage_.emplace_back(in, config.hidden_size, rels, config.shared_weights, rng);
    in = config.hidden_size;
  }
  contraction_ = OnsetContraction(config.hidden_size, rng);
  mlp_ = ad::Linear(config.hidden_size, config.hidden_size, rng);
  if (config.bidirectional_gru) {
    if (config.hidden_size % 2 != 0) throw std::invalid_argument("bidirectional GRU needs an even hidden size");
    bigru1_ = ad::BiGruLayer(config.hidden_size, config.hidden_size / 2, rng);
    bigru2_ = ad::BiGruLayer(config.hidden_size, config.hidden_size / 2, rng);
  } else {
    gru1_ = ad::GruLayer(config.hidden_size, config.hidden_size, rng);
    gru2_ = ad::GruLayer(config.hidden_size, config.hidden_size, rng);
  }
}

EncoderOutput Encoder::forward(const ScoreGraph &graph, bool training, Rng &rng) const {
  if (graph.reverse_during != config_.reverse_during) {
    throw std::invalid_argument("graph reverse_during setting differs from the encoder's");
  }
  Tensor h(graph.features);
  for (const auto &layer : sage_) h = ad::dropout(layer.forward(graph, h), config_.dropout, training, rng);
  ContractionResult pooled = contraction_.forward(graph, h);
  Tensor s = ad::dropout(ad::relu(mlp_.forward(pooled.pooled)), config_.dropout, training, rng);
  if (config_.bidirectional_gru) {
    s = ad::dropout(bigru1_.forward(s), config_.dropout, training, rng);
    s = ad::dropout(bigru2_.forward(s), config_.dropout, training, rng);
  } else {
    s = ad::dropout(gru1_.forward(s), config_.dropout, training, rng);
    s = ad::dropout(gru2_.forward(s), config_.dropout, training, rng);
  }
  return {s, std::move(pooled.onsets)};
}

ad::NamedTensors Encoder::parameters() const {
  ad::NamedTensors out;
  for (std::size_t l = 0; l < sage_.size(); ++l) ad::append_prefixed(out, "sage" + std::to_string(l), sage_[l].parameters());
  ad::append_prefixed(out, "contraction", contraction_.parameters());
  ad::append_prefixed(out, "mlp", mlp_.parameters());
  if (config_.bidirectional_gru) {
    ad::append_prefixed(out, "gru1", bigru1_.parameters());
    ad::append_prefixed(out, "gru2", bigru2_.parameters());
  } else {
    ad::append_prefixed(out, "gru1", gru1_.parameters());
    ad::append_prefixed(out, "gru2", gru2_.parameters());
  }
  return out;
}

}  // namespace chordgraph
