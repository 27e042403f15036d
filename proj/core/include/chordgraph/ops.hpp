#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "chordgraph/rng.hpp"
#include "chordgraph/tensor.hpp"

// Differentiable primitives. Every op validates shapes (std::invalid_argument),
// rejects non-finite results (std::domain_error) and, when an input requires
// grad and a tape is active, records its backward rule.
namespace chordgraph::ad {

Tensor matmul(const Tensor &a, const Tensor &b);
Tensor add(const Tensor &a, const Tensor &b);
Tensor sub(const Tensor &a, const Tensor &b);
Tensor mul(const Tensor &a, const Tensor &b);
Tensor div(const Tensor &a, const Tensor &b);
/// Adds a 1 x cols bias to every row.
Tensor add_row(const Tensor &a, const Tensor &bias);
Tensor scale(const Tensor &a, double factor);
Tensor add_scalar(const Tensor &a, double value);
/// Multiplies row i by factors[i]; the factors are constants.
Tensor scale_rows(const Tensor &a, std::span<const double> factors);

Tensor concat_rows(std::span<const Tensor> parts);
Tensor concat_cols(std::span<const Tensor> parts);
Tensor slice_cols(const Tensor &a, std::size_t begin, std::size_t end);

/// Mean of the selected rows, 1 x cols. Empty selection gives zeros.
Tensor mean_rows(const Tensor &a, std::span<const std::size_t> selection);
/// out[i] = a[indices[i]].
Tensor gather_rows(const Tensor &a, std::span<const std::size_t> indices);
/// out (out_rows x cols), out[indices[i]] += a[i].
Tensor scatter_add_rows(const Tensor &a, std::span<const std::size_t> indices, std::size_t out_rows);

Tensor relu(const Tensor &a);
Tensor sigmoid(const Tensor &a);
Tensor tanh(const Tensor &a);
Tensor exp(const Tensor &a);
Tensor log(const Tensor &a);
Tensor softmax_rows(const Tensor &a);
Tensor log_softmax_rows(const Tensor &a);

/// Inverted dropout: zeroes with probability p and scales survivors by
/// 1/(1-p) when training; identity otherwise or when p = 0.
Tensor dropout(const Tensor &a, double p, bool training, Rng &rng);

/// Sum of all entries, 1x1.
Tensor sum(const Tensor &a);
Tensor mean(const Tensor &a);

/// Mean over rows of -log softmax(logits)[target].
Tensor cross_entropy(const Tensor &logits, std::span<const std::size_t> targets);

}  // namespace chordgraph::ad
