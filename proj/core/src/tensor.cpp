#include "chordgraph/tensor.hpp"

#include <cmath>
#include <stdexcept>

namespace chordgraph::ad {

namespace {
thread_local Tape *g_active_tape = nullptr;
}

Tensor::Tensor(std::size_t rows, std::size_t cols, double fill, bool requires_grad)
    : node_(std::make_shared<TensorNode>()) {
  node_->rows = rows;
  node_->cols = cols;
  node_->value.assign(rows * cols, fill);
  node_->requires_grad = requires_grad;
}

Tensor::Tensor(std::size_t rows, std::size_t cols, std::vector<double> values, bool requires_grad)
    : node_(std::make_shared<TensorNode>()) {
  if (values.size() != rows * cols) {
    throw std::invalid_argument("tensor data length " + std::to_string(values.size()) + " does not match shape " +
                                std::to_string(rows) + "x" + std::to_string(cols));
  }
  node_->rows = rows;
  node_->cols = cols;
  node_->value = std::move(values);
  node_->requires_grad = requires_grad;
}

Tensor::Tensor(const Matrix &m, bool requires_grad) : Tensor(m.rows, m.cols, m.data, requires_grad) {}

Tensor Tensor::uniform_init(std::size_t rows, std::size_t cols, std::size_t fan_in, Rng &rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in == 0 ? 1 : fan_in));
  Tensor t(rows, cols, 0.0, true);
  for (double &v : t.values()) v = rng.uniform(-bound, bound);
  return t;
}

double Tensor::item() const {
  if (size() != 1) throw std::invalid_argument("item() on a tensor with " + std::to_string(size()) + " entries");
  return node_->value[0];
}

void Tensor::zero_grad() {
  if (!node_->grad.empty()) std::fill(node_->grad.begin(), node_->grad.end(), 0.0);
}

void Tensor::ensure_grad() {
  if (node_->grad.size() != node_->value.size()) node_->grad.assign(node_->value.size(), 0.0);
}

Tensor Tensor::clone() const {
  Tensor t(rows(), cols(), node_->value, node_->requires_grad);
  if (has_grad()) t.node_->grad = node_->grad;
  return t;
}

Tensor Tensor::detach() const { return Tensor(rows(), cols(), node_->value, false); }

Matrix Tensor::to_matrix() const {
  Matrix m(rows(), cols());
  m.data = node_->value;
  return m;
}

void Tape::backward(Tensor &loss) {
  if (loss.size() != 1) throw std::invalid_argument("backward needs a scalar loss");
  if (!loss.requires_grad()) throw std::invalid_argument("loss does not depend on any trainable tensor");
  loss.ensure_grad();
  loss.grad()[0] += 1.0;
  for (auto it = ops_.rbegin(); it != ops_.rend(); ++it) (*it)();
}

Tape *Tape::active() { return g_active_tape; }

TapeScope::TapeScope(Tape &tape) : previous_(g_active_tape) { g_active_tape = &tape; }
TapeScope::~TapeScope() { g_active_tape = previous_; }

NoGradScope::NoGradScope() : previous_(g_active_tape) { g_active_tape = nullptr; }
NoGradScope::~NoGradScope() { g_active_tape = previous_; }

}  // namespace chordgraph::ad
