#include "chordgraph/ops.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <stdexcept>
#include <string>

namespace chordgraph::ad {

namespace {

using NodePtr = std::shared_ptr<TensorNode>;

std::string shape_str(const Tensor &t) { return std::to_string(t.rows()) + "x" + std::to_string(t.cols()); }

void require_same_shape(const Tensor &a, const Tensor &b, const char *op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch " + shape_str(a) + " vs " + shape_str(b));
  }
}

void check_finite(const std::vector<double> &v, const char *op) {
  for (double x : v) {
    if (!std::isfinite(x)) throw std::domain_error(std::string(op) + ": non-finite value produced");
  }
}

/// Wraps a freshly computed value. Returns true when a backward rule must be
/// recorded; in that case gradient buffers of the output and of every
/// grad-requiring input are allocated.
bool wrap(Tensor &out, std::initializer_list<const Tensor *> inputs) {
  if (Tape::active() == nullptr) return false;
  bool any = false;
  for (const Tensor *t : inputs) any = any || t->requires_grad();
  if (!any) return false;
  out.set_requires_grad(true);
  out.ensure_grad();
  for (const Tensor *t : inputs) {
    if (t->requires_grad()) const_cast<Tensor *>(t)->ensure_grad();
  }
  return true;
}

bool wrap_many(Tensor &out, std::span<const Tensor> inputs) {
  if (Tape::active() == nullptr) return false;
  bool any = false;
  for (const Tensor &t : inputs) any = any || t.requires_grad();
  if (!any) return false;
  out.set_requires_grad(true);
  out.ensure_grad();
  for (const Tensor &t : inputs) {
    if (t.requires_grad()) const_cast<Tensor &>(t).ensure_grad();
  }
  return true;
}

void record(Tape::BackwardFn fn) { Tape::active()->record(std::move(fn)); }

/// Elementwise unary op with derivative expressed through input x and output y.
template <typename F, typename D>
Tensor unary(const Tensor &a, const char *name, F f, D dfdx) {
  std::vector<double> out(a.size());
  const auto av = a.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(av[i]);
  check_finite(out, name);
  Tensor y(a.rows(), a.cols(), std::move(out));
  if (wrap(y, {&a})) {
    NodePtr an = a.node(), yn = y.node();
    record([an, yn, dfdx] {
      if (!an->requires_grad) return;
      for (std::size_t i = 0; i < yn->value.size(); ++i) an->grad[i] += yn->grad[i] * dfdx(an->value[i], yn->value[i]);
    });
  }
  return y;
}

}  // namespace

Tensor matmul(const Tensor &a, const Tensor &b) {
  if (a.cols() != b.rows()) {
    throw std::invalid_argument("matmul: inner dimensions differ " + shape_str(a) + " . " + shape_str(b));
  }
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  std::vector<double> out(m * n, 0.0);
  const double *A = a.values().data();
  const double *B = b.values().data();
  for (std::size_t i = 0; i < m; ++i) {
    double *c = out.data() + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double s = A[i * k + p];
      if (s == 0.0) continue;
      const double *brow = B + p * n;
      for (std::size_t j = 0; j < n; ++j) c[j] += s * brow[j];
    }
  }
  check_finite(out, "matmul");
  Tensor y(m, n, std::move(out));
  if (wrap(y, {&a, &b})) {
    NodePtr an = a.node(), bn = b.node(), yn = y.node();
    record([an, bn, yn, m, k, n] {
      const double *G = yn->grad.data();
      if (an->requires_grad) {
        for (std::size_t i = 0; i < m; ++i) {
          for (std::size_t p = 0; p < k; ++p) {
            const double *brow = bn->value.data() + p * n;
            const double *grow = G + i * n;
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc += grow[j] * brow[j];
            an->grad[i * k + p] += acc;
          }
        }
      }
      if (bn->requires_grad) {
        for (std::size_t i = 0; i < m; ++i) {
          const double *grow = G + i * n;
          for (std::size_t p = 0; p < k; ++p) {
            const double s = an->value[i * k + p];
            if (s == 0.0) continue;
            double *dst = bn->grad.data() + p * n;
            for (std::size_t j = 0; j < n; ++j) dst[j] += s * grow[j];
          }
        }
      }
    });
  }
  return y;
}

Tensor add(const Tensor &a, const Tensor &b) {
  require_same_shape(a, b, "add");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.values()[i] + b.values()[i];
  check_finite(out, "add");
  Tensor y(a.rows(), a.cols(), std::move(out));
  if (wrap(y, {&a, &b})) {
    NodePtr an = a.node(), bn = b.node(), yn = y.node();
    record([an, bn, yn] {
      for (std::size_t i = 0; i < yn->grad.size(); ++i) {
        if (an->requires_grad) an->grad[i] += yn->grad[i];
        if (bn->requires_grad) bn->grad[i] += yn->grad[i];
      }
    });
  }
  return y;
}

Tensor sub(const Tensor &a, const Tensor &b) {
  require_same_shape(a, b, "sub");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.values()[i] - b.values()[i];
  check_finite(out, "sub");
  Tensor y(a.rows(), a.cols(), std::move(out));
  if (wrap(y, {&a, &b})) {
    NodePtr an = a.node(), bn = b.node(), yn = y.node();
    record([an, bn, yn] {
      for (std::size_t i = 0; i < yn->grad.size(); ++i) {
        if (an->requires_grad) an->grad[i] += yn->grad[i];
        if (bn->requires_grad) bn->grad[i] -= yn->grad[i];
      }
    });
  }
  return y;
}

Tensor mul(const Tensor &a, const Tensor &b) {
  require_same_shape(a, b, "mul");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.values()[i] * b.values()[i];
  check_finite(out, "mul");
  Tensor y(a.rows(), a.cols(), std::move(out));
  if (wrap(y, {&a, &b})) {
    NodePtr an = a.node(), bn = b.node(), yn = y.node();
    record([an, bn, yn] {
      for (std::size_t i = 0; i < yn->grad.size(); ++i) {
        if (an->requires_grad) an->grad[i] += yn->grad[i] * bn->value[i];
        if (bn->requires_grad) bn->grad[i] += yn->grad[i] * an->value[i];
      }
    });
  }
  return y;
}

Tensor div(const Tensor &a, const Tensor &b) {
  require_same_shape(a, b, "div");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.values()[i] / b.values()[i];
  check_finite(out, "div");
  Tensor y(a.rows(), a.cols(), std::move(out));
  if (wrap(y, {&a, &b})) {
    NodePtr an = a.node(), bn = b.node(), yn = y.node();
    record([an, bn, yn] {
      for (std::size_t i = 0; i < yn->grad.size(); ++i) {
        const double inv = 1.0 / bn->value[i];
        if (an->requires_grad) an->grad[i] += yn->grad[i] * inv;
        if (bn->requires_grad) bn->grad[i] -= yn->grad[i] * an->value[i] * inv * inv;
      }
    });
  }
  return y;
}

Tensor add_row(const Tensor &a, const Tensor &bias) {
  if (bias.rows() != 1 || bias.cols() != a.cols()) {
    throw std::invalid_argument("add_row: bias " + shape_str(bias) + " does not fit " + shape_str(a));
  }
  const std::size_t cols = a.cols();
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.values()[i] + bias.values()[i % cols];
  check_finite(out, "add_row");
  Tensor y(a.rows(), cols, std::move(out));
  if (wrap(y, {&a, &bias})) {
    NodePtr an = a.node(), bn = bias.node(), yn = y.node();
    record([an, bn, yn, cols] {
      for (std::size_t i = 0; i < yn->grad.size(); ++i) {
        if (an->requires_grad) an->grad[i] += yn->grad[i];
        if (bn->requires_grad) bn->grad[i % cols] += yn->grad[i];
      }
    });
  }
  return y;
}

Tensor scale(const Tensor &a, double factor) {
  return unary(a, "scale", [factor](double x) { return x * factor; }, [factor](double, double) { return factor; });
}

Tensor add_scalar(const Tensor &a, double value) {
  return unary(a, "add_scalar", [value](double x) { return x + value; }, [](double, double) { return 1.0; });
}

Tensor scale_rows(const Tensor &a, std::span<const double> factors) {
  if (factors.size() != a.rows()) throw std::invalid_argument("scale_rows: factor count does not match rows");
  const std::size_t cols = a.cols();
  std::vector<double> f(factors.begin(), factors.end());
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.values()[i] * f[i / cols];
  check_finite(out, "scale_rows");
  Tensor y(a.rows(), cols, std::move(out));
  if (wrap(y, {&a})) {
    NodePtr an = a.node(), yn = y.node();
    record([an, yn, f = std::move(f), cols] {
      for (std::size_t i = 0; i < yn->grad.size(); ++i) an->grad[i] += yn->grad[i] * f[i / cols];
    });
  }
  return y;
}

Tensor concat_rows(std::span<const Tensor> parts) {
  if (parts.empty()) throw std::invalid_argument("concat_rows: no inputs");
  const std::size_t cols = parts.front().cols();
  std::size_t rows = 0;
  for (const Tensor &p : parts) {
    if (p.cols() != cols) throw std::invalid_argument("concat_rows: column counts differ");
    rows += p.rows();
  }
  std::vector<double> out;
  out.reserve(rows * cols);
  for (const Tensor &p : parts) out.insert(out.end(), p.values().begin(), p.values().end());
  Tensor y(rows, cols, std::move(out));
  if (wrap_many(y, parts)) {
    std::vector<NodePtr> nodes;
    for (const Tensor &p : parts) nodes.push_back(p.node());
    NodePtr yn = y.node();
    record([nodes = std::move(nodes), yn] {
      std::size_t offset = 0;
      for (const NodePtr &n : nodes) {
        if (n->requires_grad) {
          for (std::size_t i = 0; i < n->value.size(); ++i) n->grad[i] += yn->grad[offset + i];
        }
        offset += n->value.size();
      }
    });
  }
  return y;
}

Tensor concat_cols(std::span<const Tensor> parts) {
  if (parts.empty()) throw std::invalid_argument("concat_cols: no inputs");
  const std::size_t rows = parts.front().rows();
  std::size_t cols = 0;
  for (const Tensor &p : parts) {
    if (p.rows() != rows) throw std::invalid_argument("concat_cols: row counts differ");
    cols += p.cols();
  }
  std::vector<double> out(rows * cols);
  std::size_t c0 = 0;
  for (const Tensor &p : parts) {
    for (std::size_t r = 0; r < rows; ++r) {
      std::copy_n(p.values().data() + r * p.cols(), p.cols(), out.data() + r * cols + c0);
    }
    c0 += p.cols();
  }
  Tensor y(rows, cols, std::move(out));
  if (wrap_many(y, parts)) {
    std::vector<NodePtr> nodes;
    for (const Tensor &p : parts) nodes.push_back(p.node());
    NodePtr yn = y.node();
    record([nodes = std::move(nodes), yn, rows, cols] {
      std::size_t offset = 0;
      for (const NodePtr &n : nodes) {
        if (n->requires_grad) {
          for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < n->cols; ++c) n->grad[r * n->cols + c] += yn->grad[r * cols + offset + c];
          }
        }
        offset += n->cols;
      }
    });
  }
  return y;
}

Tensor slice_cols(const Tensor &a, std::size_t begin, std::size_t end) {
  if (begin > end || end > a.cols()) throw std::invalid_argument("slice_cols: range outside " + shape_str(a));
  const std::size_t rows = a.rows(), width = end - begin, cols = a.cols();
  std::vector<double> out(rows * width);
  for (std::size_t r = 0; r < rows; ++r) std::copy_n(a.values().data() + r * cols + begin, width, out.data() + r * width);
  Tensor y(rows, width, std::move(out));
  if (wrap(y, {&a})) {
    NodePtr an = a.node(), yn = y.node();
    record([an, yn, rows, width, cols, begin] {
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < width; ++c) an->grad[r * cols + begin + c] += yn->grad[r * width + c];
      }
    });
  }
  return y;
}

Tensor mean_rows(const Tensor &a, std::span<const std::size_t> selection) {
  const std::size_t cols = a.cols();
  std::vector<std::size_t> sel(selection.begin(), selection.end());
  std::vector<double> out(cols, 0.0);
  for (std::size_t r : sel) {
    if (r >= a.rows()) throw std::invalid_argument("mean_rows: row index out of range");
    for (std::size_t c = 0; c < cols; ++c) out[c] += a.values()[r * cols + c];
  }
  const double inv = sel.empty() ? 0.0 : 1.0 / static_cast<double>(sel.size());
  for (double &v : out) v *= inv;
  Tensor y(1, cols, std::move(out));
  if (wrap(y, {&a})) {
    NodePtr an = a.node(), yn = y.node();
    record([an, yn, sel = std::move(sel), inv, cols] {
      for (std::size_t r : sel) {
        for (std::size_t c = 0; c < cols; ++c) an->grad[r * cols + c] += yn->grad[c] * inv;
      }
    });
  }
  return y;
}

Tensor gather_rows(const Tensor &a, std::span<const std::size_t> indices) {
  const std::size_t cols = a.cols();
  std::vector<std::size_t> idx(indices.begin(), indices.end());
  std::vector<double> out(idx.size() * cols);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] >= a.rows()) throw std::invalid_argument("gather_rows: index out of range");
    std::copy_n(a.values().data() + idx[i] * cols, cols, out.data() + i * cols);
  }
  Tensor y(idx.size(), cols, std::move(out));
  if (wrap(y, {&a})) {
    NodePtr an = a.node(), yn = y.node();
    record([an, yn, idx = std::move(idx), cols] {
      for (std::size_t i = 0; i < idx.size(); ++i) {
        for (std::size_t c = 0; c < cols; ++c) an->grad[idx[i] * cols + c] += yn->grad[i * cols + c];
      }
    });
  }
  return y;
}

Tensor scatter_add_rows(const Tensor &a, std::span<const std::size_t> indices, std::size_t out_rows) {
  if (indices.size() != a.rows()) throw std::invalid_argument("scatter_add_rows: one index per input row required");
  const std::size_t cols = a.cols();
  std::vector<std::size_t> idx(indices.begin(), indices.end());
  std::vector<double> out(out_rows * cols, 0.0);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] >= out_rows) throw std::invalid_argument("scatter_add_rows: index out of range");
    for (std::size_t c = 0; c < cols; ++c) out[idx[i] * cols + c] += a.values()[i * cols + c];
  }
  check_finite(out, "scatter_add_rows");
  Tensor y(out_rows, cols, std::move(out));
  if (wrap(y, {&a})) {
    NodePtr an = a.node(), yn = y.node();
    record([an, yn, idx = std::move(idx), cols] {
      for (std::size_t i = 0; i < idx.size(); ++i) {
        for (std::size_t c = 0; c < cols; ++c) an->grad[i * cols + c] += yn->grad[idx[i] * cols + c];
      }
    });
  }
  return y;
}

Tensor relu(const Tensor &a) {
  return unary(a, "relu", [](double x) { return x > 0.0 ? x : 0.0; },
               [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Tensor sigmoid(const Tensor &a) {
  return unary(
      a, "sigmoid",
      [](double x) {
        if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
        const double e = std::exp(x);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Tensor tanh(const Tensor &a) {
  return unary(a, "tanh", [](double x) { return std::tanh(x); }, [](double, double y) { return 1.0 - y * y; });
}

Tensor exp(const Tensor &a) {
  return unary(a, "exp", [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

Tensor log(const Tensor &a) {
  return unary(a, "log", [](double x) { return std::log(x); }, [](double x, double) { return 1.0 / x; });
}

Tensor softmax_rows(const Tensor &a) {
  const std::size_t rows = a.rows(), cols = a.cols();
  std::vector<double> out(a.size());
  for (std::size_t r = 0; r < rows; ++r) {
    const double *x = a.values().data() + r * cols;
    double *y = out.data() + r * cols;
    const double mx = *std::max_element(x, x + cols);
    double total = 0.0;
    for (std::size_t c = 0; c < cols; ++c) total += (y[c] = std::exp(x[c] - mx));
    for (std::size_t c = 0; c < cols; ++c) y[c] /= total;
  }
  check_finite(out, "softmax_rows");
  Tensor y(rows, cols, std::move(out));
  if (wrap(y, {&a})) {
    NodePtr an = a.node(), yn = y.node();
    record([an, yn, rows, cols] {
      for (std::size_t r = 0; r < rows; ++r) {
        const double *s = yn->value.data() + r * cols;
        const double *g = yn->grad.data() + r * cols;
        double dot = 0.0;
        for (std::size_t c = 0; c < cols; ++c) dot += g[c] * s[c];
        for (std::size_t c = 0; c < cols; ++c) an->grad[r * cols + c] += s[c] * (g[c] - dot);
      }
    });
  }
  return y;
}

Tensor log_softmax_rows(const Tensor &a) {
  const std::size_t rows = a.rows(), cols = a.cols();
  std::vector<double> out(a.size());
  for (std::size_t r = 0; r < rows; ++r) {
    const double *x = a.values().data() + r * cols;
    double *y = out.data() + r * cols;
    const double mx = *std::max_element(x, x + cols);
    double total = 0.0;
    for (std::size_t c = 0; c < cols; ++c) total += std::exp(x[c] - mx);
    const double lse = mx + std::log(total);
    for (std::size_t c = 0; c < cols; ++c) y[c] = x[c] - lse;
  }
  check_finite(out, "log_softmax_rows");
  Tensor y(rows, cols, std::move(out));
  if (wrap(y, {&a})) {
    NodePtr an = a.node(), yn = y.node();
    record([an, yn, rows, cols] {
      for (std::size_t r = 0; r < rows; ++r) {
        const double *ly = yn->value.data() + r * cols;
        const double *g = yn->grad.data() + r * cols;
        double gsum = 0.0;
        for (std::size_t c = 0; c < cols; ++c) gsum += g[c];
        for (std::size_t c = 0; c < cols; ++c) an->grad[r * cols + c] += g[c] - std::exp(ly[c]) * gsum;
      }
    });
  }
  return y;
}

Tensor dropout(const Tensor &a, double p, bool training, Rng &rng) {
  if (!(p >= 0.0 && p < 1.0)) throw std::invalid_argument("dropout: p must lie in [0, 1)");
  if (!training || p == 0.0) return a;
  const double keep_scale = 1.0 / (1.0 - p);
  std::vector<double> mask(a.size());
  for (double &m : mask) m = rng.uniform() < p ? 0.0 : keep_scale;
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.values()[i] * mask[i];
  Tensor y(a.rows(), a.cols(), std::move(out));
  if (wrap(y, {&a})) {
    NodePtr an = a.node(), yn = y.node();
    record([an, yn, mask = std::move(mask)] {
      for (std::size_t i = 0; i < mask.size(); ++i) an->grad[i] += yn->grad[i] * mask[i];
    });
  }
  return y;
}

Tensor sum(const Tensor &a) {
  double total = 0.0;
  for (double v : a.values()) total += v;
  Tensor y(1, 1, std::vector<double>{total});
  check_finite(std::vector<double>{total}, "sum");
  if (wrap(y, {&a})) {
    NodePtr an = a.node(), yn = y.node();
    record([an, yn] {
      for (double &g : an->grad) g += yn->grad[0];
    });
  }
  return y;
}

Tensor mean(const Tensor &a) {
  if (a.size() == 0) throw std::invalid_argument("mean of an empty tensor");
  return scale(sum(a), 1.0 / static_cast<double>(a.size()));
}

Tensor cross_entropy(const Tensor &logits, std::span<const std::size_t> targets) {
  const std::size_t rows = logits.rows(), cols = logits.cols();
  if (targets.size() != rows) throw std::invalid_argument("cross_entropy: one target per row required");
  if (rows == 0) throw std::invalid_argument("cross_entropy: empty batch");
  std::vector<std::size_t> tgt(targets.begin(), targets.end());
  std::vector<double> probs(logits.size());
  double loss = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    if (tgt[r] >= cols) {
      throw std::invalid_argument("cross_entropy: target " + std::to_string(tgt[r]) + " outside [0, " +
                                  std::to_string(cols) + ")");
    }
    const double *x = logits.values().data() + r * cols;
    const double mx = *std::max_element(x, x + cols);
    double total = 0.0;
    for (std::size_t c = 0; c < cols; ++c) total += (probs[r * cols + c] = std::exp(x[c] - mx));
    for (std::size_t c = 0; c < cols; ++c) probs[r * cols + c] /= total;
    loss += mx + std::log(total) - x[tgt[r]];
  }
  loss /= static_cast<double>(rows);
  check_finite(std::vector<double>{loss}, "cross_entropy");
  Tensor y(1, 1, std::vector<double>{loss});
  if (wrap(y, {&logits})) {
    NodePtr ln = logits.node(), yn = y.node();
    record([ln, yn, probs = std::move(probs), tgt = std::move(tgt), rows, cols] {
      const double g = yn->grad[0] / static_cast<double>(rows);
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
          const double onehot = c == tgt[r] ? 1.0 : 0.0;
          ln->grad[r * cols + c] += g * (probs[r * cols + c] - onehot);
        }
      }
    });
  }
  return y;
}

}  // namespace chordgraph::ad
