#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "chordgraph/tensor.hpp"

namespace cgtest {

struct GradCheck {
  double max_error = 0.0;  // worst relative error
  std::size_t input = 0;
  std::size_t index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
};

// Relative error with a floor on the denominator, so gradients that are
// numerically zero are compared absolutely.
inline double relative_error(double a, double b, double floor = 1e-3) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

// Compares tape gradients of the scalar `f()` with central differences over
// every entry of every input. Inputs must have requires_grad set. An entry
// that misses at step h is retried at h / 100: a ReLU kink closer than h to
// some pre-activation corrupts the wide difference but not the narrow one.
inline GradCheck gradcheck(const std::function<chordgraph::ad::Tensor()> &f,
                           std::vector<chordgraph::ad::Tensor> inputs, double h = 1e-5) {
  using chordgraph::ad::Tape;
  using chordgraph::ad::TapeScope;
  for (auto &t : inputs) t.zero_grad();
  {
    Tape tape;
    TapeScope scope(tape);
    auto y = f();
    tape.backward(y);
  }
  GradCheck worst;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    auto &t = inputs[i];
    const std::vector<double> analytic(t.grad().begin(), t.grad().end());
    for (std::size_t j = 0; j < t.size(); ++j) {
      const double saved = t.values()[j];
      t.values()[j] = saved + h;
      const double up = f().item();
      t.values()[j] = saved - h;
      const double down = f().item();
      t.values()[j] = saved;
      double numeric = (up - down) / (2 * h);
      const double a = analytic.empty() ? 0.0 : analytic[j];
      double err = relative_error(a, numeric);
      if (err >= 1e-5) {
        const double hn = h / 100;
        t.values()[j] = saved + hn;
        const double up_n = f().item();
        t.values()[j] = saved - hn;
        const double down_n = f().item();
        t.values()[j] = saved;
        const double narrow = (up_n - down_n) / (2 * hn);
        if (relative_error(a, narrow) < err) {
          numeric = narrow;
          err = relative_error(a, narrow);
        }
      }
      if (err >= worst.max_error) worst = {err, i, j, a, numeric};
    }
  }
  return worst;
}

}  // namespace cgtest
