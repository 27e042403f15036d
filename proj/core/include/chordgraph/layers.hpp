#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "chordgraph/rng.hpp"
#include "chordgraph/tensor.hpp"

namespace chordgraph::ad {

/// Parameter handles in a stable order; names are unique dotted paths.
using NamedTensors = std::vector<std::pair<std::string, Tensor>>;

void append_prefixed(NamedTensors &out, const std::string &prefix, const NamedTensors &params);

/// y = x W + b.
struct Linear {
  Tensor weight;  // in x out
  Tensor bias;    // 1 x out

  Linear() = default;
  Linear(std::size_t in, std::size_t out, Rng &rng);
  static Linear zeros(std::size_t in, std::size_t out);

  Tensor forward(const Tensor &x) const;
  NamedTensors parameters() const { return {{"weight", weight}, {"bias", bias}}; }
  std::size_t in_features() const { return weight.rows(); }
  std::size_t out_features() const { return weight.cols(); }
};

/// Single-layer unidirectional GRU with the usual reset/update/candidate
/// gates:
///   r = sigmoid(x W_ir + b_ir + h W_hr + b_hr)
///   z = sigmoid(x W_iz + b_iz + h W_hz + b_hz)
///   n = tanh(x W_in + b_in + r * (h W_hn + b_hn))
///   h' = (1 - z) * n + z * h
/// Gate blocks are packed column-wise in (r, z, n) order.
struct GruLayer {
  Tensor w_input;   // in x 3h
  Tensor w_hidden;  // h x 3h
  Tensor b_input;   // 1 x 3h
  Tensor b_hidden;  // 1 x 3h

  GruLayer() = default;
  GruLayer(std::size_t in, std::size_t hidden, Rng &rng);
  static GruLayer zeros(std::size_t in, std::size_t hidden);

  std::size_t hidden_size() const { return w_hidden.rows(); }
  /// One hidden state per step, starting from a zero state.
  std::vector<Tensor> forward_steps(std::span<const Tensor> sequence) const;
  /// Rows of `sequence` are time steps; returns steps x hidden.
  Tensor forward(const Tensor &sequence) const;
  NamedTensors parameters() const;
};

/// Forward and backward GRUs; each output step is concat(fwd_t, bwd_t).
struct BiGruLayer {
  GruLayer forward_dir;
  GruLayer backward_dir;

  BiGruLayer() = default;
  BiGruLayer(std::size_t in, std::size_t hidden, Rng &rng);

  /// Rows of `sequence` are time steps; returns steps x 2*hidden.
  Tensor forward(const Tensor &sequence) const;
  NamedTensors parameters() const;
};

/// Single-layer LSTM cell stack in (i, f, g, o) gate order.
struct LstmLayer {
  Tensor w_input;   // in x 4h
  Tensor w_hidden;  // h x 4h
  Tensor b_input;   // 1 x 4h
  Tensor b_hidden;  // 1 x 4h

  LstmLayer() = default;
  LstmLayer(std::size_t in, std::size_t hidden, Rng &rng);
  static LstmLayer zeros(std::size_t in, std::size_t hidden);

  std::size_t hidden_size() const { return w_hidden.rows(); }
  std::vector<Tensor> forward_steps(std::span<const Tensor> sequence) const;
  NamedTensors parameters() const;
};

/// Forward and backward LSTMs; each output step is concat(fwd_t, bwd_t).
struct BiLstmLayer {
  LstmLayer forward_dir;
  LstmLayer backward_dir;

  BiLstmLayer() = default;
  BiLstmLayer(std::size_t in, std::size_t hidden, Rng &rng);
  static BiLstmLayer zeros(std::size_t in, std::size_t hidden);

  std::vector<Tensor> forward_steps(std::span<const Tensor> sequence) const;
  /// Rows of `sequence` are time steps; returns steps x 2*hidden.
  Tensor forward(const Tensor &sequence) const;
  NamedTensors parameters() const;
};

/// Splits a steps x d tensor into 1 x d rows.
std::vector<Tensor> split_rows(const Tensor &sequence);

}  // namespace chordgraph::ad
