#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "chordgraph/matrix.hpp"
#include "chordgraph/rng.hpp"

namespace chordgraph::ad {

struct TensorNode {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> value;
  std::vector<double> grad;  // empty until the node takes part in a recorded op
  bool requires_grad = false;
};

/// Handle to a dense row-major 2-D array of doubles. Copies share storage;
/// use `clone()` for an independent copy. Scalars are 1x1.
class Tensor {
 public:
  Tensor() = default;
  Tensor(std::size_t rows, std::size_t cols, double fill = 0.0, bool requires_grad = false);
  Tensor(std::size_t rows, std::size_t cols, std::vector<double> values, bool requires_grad = false);
  explicit Tensor(const Matrix &m, bool requires_grad = false);

  static Tensor scalar(double v, bool requires_grad = false) { return Tensor(1, 1, v, requires_grad); }
  /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights with requires_grad set.
  static Tensor uniform_init(std::size_t rows, std::size_t cols, std::size_t fan_in, Rng &rng);

  bool defined() const { return node_ != nullptr; }
  std::size_t rows() const { return node_->rows; }
  std::size_t cols() const { return node_->cols; }
  std::size_t size() const { return node_->value.size(); }
  std::vector<std::size_t> shape() const { return {rows(), cols()}; }

  std::span<double> values() { return node_->value; }
  std::span<const double> values() const { return node_->value; }
  double at(std::size_t r, std::size_t c) const { return node_->value[r * cols() + c]; }
  double &at(std::size_t r, std::size_t c) { return node_->value[r * cols() + c]; }
  /// Value of a 1x1 tensor.
  double item() const;

  bool requires_grad() const { return node_->requires_grad; }
  void set_requires_grad(bool on) { node_->requires_grad = on; }
  bool has_grad() const { return !node_->grad.empty(); }
  std::span<double> grad() { return node_->grad; }
  std::span<const double> grad() const { return node_->grad; }
  void zero_grad();
  /// Allocates a zero gradient buffer if none exists yet.
  void ensure_grad();

  Tensor clone() const;
  /// Same values, no gradient history, requires_grad off.
  Tensor detach() const;
  Matrix to_matrix() const;

  const std::shared_ptr<TensorNode> &node() const { return node_; }
  bool same_storage(const Tensor &other) const { return node_ == other.node_; }

 private:
  std::shared_ptr<TensorNode> node_;
};

/// Ordered record of executed differentiable ops. Ops record onto the tape
/// installed by the innermost live `TapeScope` on the current thread; with no
/// scope, nothing is recorded.
class Tape {
 public:
  using BackwardFn = std::function<void()>;

  void record(BackwardFn fn) { ops_.push_back(std::move(fn)); }
  std::size_t size() const { return ops_.size(); }
  void clear() { ops_.clear(); }

  /// Seeds d(loss)/d(loss) = 1 and runs the recorded backward rules in exact
  /// reverse order. Gradients accumulate into existing buffers.
  void backward(Tensor &loss);

  static Tape *active();

 private:
  friend class TapeScope;
  std::vector<BackwardFn> ops_;
};

class TapeScope {
 public:
  explicit TapeScope(Tape &tape);
  ~TapeScope();
  TapeScope(const TapeScope &) = delete;
  TapeScope &operator=(const TapeScope &) = delete;

 private:
  Tape *previous_;
};

/// Suspends recording on the current thread for its lifetime.
class NoGradScope {
 public:
  NoGradScope();
  ~NoGradScope();
  NoGradScope(const NoGradScope &) = delete;
  NoGradScope &operator=(const NoGradScope &) = delete;

 private:
  Tape *previous_;
};

}  // namespace chordgraph::ad
