#pragma once

#include <cstdint>
#include <vector>

#include "chordgraph/layers.hpp"

namespace chordgraph::ad {

struct AdamWConfig {
  double lr = 0.0015;
  double weight_decay = 0.005;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// AdamW with decoupled weight decay:
///   p <- p - lr * m_hat / (sqrt(v_hat) + eps) - lr * wd * p
/// where m_hat and v_hat are the bias-corrected moments.
class AdamW {
 public:
  AdamW(NamedTensors params, AdamWConfig config = {});

  /// Applies one update from the current gradients. Throws
  /// std::logic_error naming the first parameter without a gradient buffer.
  void step();
  void zero_grad();

  std::uint64_t step_count() const { return step_; }
  const AdamWConfig &config() const { return config_; }
  const NamedTensors &parameters() const { return params_; }
  const std::vector<double> &first_moment(std::size_t i) const { return m_[i]; }
  const std::vector<double> &second_moment(std::size_t i) const { return v_[i]; }

 private:
  NamedTensors params_;
  AdamWConfig config_;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
  std::uint64_t step_ = 0;
};

}  // namespace chordgraph::ad
