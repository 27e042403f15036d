#include "chordgraph/layers.hpp"

#include <stdexcept>

#include "chordgraph/ops.hpp"

namespace chordgraph::ad {

void append_prefixed(NamedTensors &out, const std::string &prefix, const NamedTensors &params) {
  for (const auto &[name, t] : params) out.emplace_back(prefix + "." + name, t);
}

Linear::Linear(std::size_t in, std::size_t out, Rng &rng)
    : weight(Tensor::uniform_init(in, out, in, rng)), bias(1, out, 0.0, true) {}

Linear Linear::zeros(std::size_t in, std::size_t out) {
  Linear l;
  l.weight = Tensor(in, out, 0.0, true);
  l.bias = Tensor(1, out, 0.0, true);
  return l;
}

Tensor Linear::forward(const Tensor &x) const { return add_row(matmul(x, weight), bias); }

std::vector<Tensor> split_rows(const Tensor &sequence) {
  std::vector<Tensor> rows;
  rows.reserve(sequence.rows());
  for (std::size_t i = 0; i < sequence.rows(); ++i) {
    const std::size_t idx[1] = {i};
    rows.push_back(gather_rows(sequence, idx));
  }
  return rows;
}

namespace {

void require_sequence(std::span<const Tensor> sequence, std::size_t width, const char *who) {
  if (sequence.empty()) throw std::invalid_argument(std::string(who) + ": empty sequence");
  for (const Tensor &x : sequence) {
    if (x.rows() != 1 || x.cols() != width) {
      throw std::invalid_argument(std::string(who) + ": every step must be a 1 x " + std::to_string(width) + " row");
    }
  }
}

}  // namespace

GruLayer::GruLayer(std::size_t in, std::size_t hidden, Rng &rng)
    : w_input(Tensor::uniform_init(in, 3 * hidden, in, rng)),
      w_hidden(Tensor::uniform_init(hidden, 3 * hidden, hidden, rng)),
      b_input(1, 3 * hidden, 0.0, true),
      b_hidden(1, 3 * hidden, 0.0, true) {}

GruLayer GruLayer::zeros(std::size_t in, std::size_t hidden) {
  GruLayer g;
  g.w_input = Tensor(in, 3 * hidden, 0.0, true);
  g.w_hidden = Tensor(hidden, 3 * hidden, 0.0, true);
  g.b_input = Tensor(1, 3 * hidden, 0.0, true);
  g.b_hidden = Tensor(1, 3 * hidden, 0.0, true);
  return g;
}

std::vector<Tensor> GruLayer::forward_steps(std::span<const Tensor> sequence) const {
  require_sequence(sequence, w_input.rows(), "gru");
  const std::size_t h = hidden_size();
  Tensor state(1, h, 0.0);
  std::vector<Tensor> out;
  out.reserve(sequence.size());
  for (const Tensor &x : sequence) {
    const Tensor gi = add_row(matmul(x, w_input), b_input);
    const Tensor gh = add_row(matmul(state, w_hidden), b_hidden);
    const Tensor r = sigmoid(add(slice_cols(gi, 0, h), slice_cols(gh, 0, h)));
    const Tensor z = sigmoid(add(slice_cols(gi, h, 2 * h), slice_cols(gh, h, 2 * h)));
    const Tensor n = tanh(add(slice_cols(gi, 2 * h, 3 * h), mul(r, slice_cols(gh, 2 * h, 3 * h))));
    state = add(n, mul(z, sub(state, n)));
    out.push_back(state);
  }
  return out;
}

Tensor GruLayer::forward(const Tensor &sequence) const {
  const std::vector<Tensor> steps = forward_steps(split_rows(sequence));
  return concat_rows(steps);
}

NamedTensors GruLayer::parameters() const {
  return {{"w_input", w_input}, {"w_hidden", w_hidden}, {"b_input", b_input}, {"b_hidden", b_hidden}};
}

BiGruLayer::BiGruLayer(std::size_t in, std::size_t hidden, Rng &rng)
    : forward_dir(in, hidden, rng), backward_dir(in, hidden, rng) {}

Tensor BiGruLayer::forward(const Tensor &sequence) const {
  const std::vector<Tensor> steps = split_rows(sequence);
  const std::vector<Tensor> fwd = forward_dir.forward_steps(steps);
  const std::vector<Tensor> reversed(steps.rbegin(), steps.rend());
  const std::vector<Tensor> bwd = backward_dir.forward_steps(reversed);
  std::vector<Tensor> out;
  out.reserve(steps.size());
  for (std::size_t t = 0; t < steps.size(); ++t) {
    const Tensor pair[2] = {fwd[t], bwd[steps.size() - 1 - t]};
    out.push_back(concat_cols(pair));
  }
  return concat_rows(out);
}

NamedTensors BiGruLayer::parameters() const {
  NamedTensors out;
  append_prefixed(out, "fwd", forward_dir.parameters());
  append_prefixed(out, "bwd", backward_dir.parameters());
  return out;
}

LstmLayer::LstmLayer(std::size_t in, std::size_t hidden, Rng &rng)
    : w_input(Tensor::uniform_init(in, 4 * hidden, in, rng)),
      w_hidden(Tensor::uniform_init(hidden, 4 * hidden, hidden, rng)),
      b_input(1, 4 * hidden, 0.0, true),
      b_hidden(1, 4 * hidden, 0.0, true) {}

LstmLayer LstmLayer::zeros(std::size_t in, std::size_t hidden) {
  LstmLayer l;
  l.w_input = Tensor(in, 4 * hidden, 0.0, true);
  l.w_hidden = Tensor(hidden, 4 * hidden, 0.0, true);
  l.b_input = Tensor(1, 4 * hidden, 0.0, true);
  l.b_hidden = Tensor(1, 4 * hidden, 0.0, true);
  return l;
}

std::vector<Tensor> LstmLayer::forward_steps(std::span<const Tensor> sequence) const {
  require_sequence(sequence, w_input.rows(), "lstm");
  const std::size_t h = hidden_size();
  Tensor state(1, h, 0.0);
  Tensor cell(1, h, 0.0);
  std::vector<Tensor> out;
  out.reserve(sequence.size());
  for (const Tensor &x : sequence) {
    const Tensor gates = add(add_row(matmul(x, w_input), b_input), add_row(matmul(state, w_hidden), b_hidden));
    const Tensor i = sigmoid(slice_cols(gates, 0, h));
    const Tensor f = sigmoid(slice_cols(gates, h, 2 * h));
    const Tensor g = tanh(slice_cols(gates, 2 * h, 3 * h));
    const Tensor o = sigmoid(slice_cols(gates, 3 * h, 4 * h));
    cell = add(mul(f, cell), mul(i, g));
    state = mul(o, tanh(cell));
    out.push_back(state);
  }
  return out;
}

NamedTensors LstmLayer::parameters() const {
  return {{"w_input", w_input}, {"w_hidden", w_hidden}, {"b_input", b_input}, {"b_hidden", b_hidden}};
}

BiLstmLayer::BiLstmLayer(std::size_t in, std::size_t hidden, Rng &rng)
    : forward_dir(in, hidden, rng), backward_dir(in, hidden, rng) {}

BiLstmLayer BiLstmLayer::zeros(std::size_t in, std::size_t hidden) {
  BiLstmLayer b;
  b.forward_dir = LstmLayer::zeros(in, hidden);
  b.backward_dir = LstmLayer::zeros(in, hidden);
  return b;
}

std::vector<Tensor> BiLstmLayer::forward_steps(std::span<const Tensor> sequence) const {
  const std::vector<Tensor> fwd = forward_dir.forward_steps(sequence);
  const std::vector<Tensor> reversed(sequence.rbegin(), sequence.rend());
  std::vector<Tensor> bwd = backward_dir.forward_steps(reversed);
  std::vector<Tensor> out;
  out.reserve(sequence.size());
  for (std::size_t t = 0; t < sequence.size(); ++t) {
    const Tensor pair[2] = {fwd[t], bwd[sequence.size() - 1 - t]};
    out.push_back(concat_cols(pair));
  }
  return out;
}

Tensor BiLstmLayer::forward(const Tensor &sequence) const {
  const std::vector<Tensor> steps = forward_steps(split_rows(sequence));
  return concat_rows(steps);
}

NamedTensors BiLstmLayer::parameters() const {
  NamedTensors out;
  append_prefixed(out, "fwd", forward_dir.parameters());
  append_prefixed(out, "bwd", backward_dir.parameters());
  return out;
}

}  // namespace chordgraph::ad
