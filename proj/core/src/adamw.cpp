#include "chordgraph/adamw.hpp"

#include <cmath>
#include <stdexcept>

namespace chordgraph::ad {

AdamW::AdamW(NamedTensors params, AdamWConfig config) : params_(std::move(params)), config_(config) {
  m_.reserve(params_.size());
  v_.reserve(params_.size());
  for (const auto &[name, t] : params_) {
    m_.emplace_back(t.size(), 0.0);
    v_.emplace_back(t.size(), 0.0);
  }
}

void AdamW::step() {
  for (const auto &[name, t] : params_) {
    if (!t.has_grad()) throw std::logic_error("adamw: parameter '" + name + "' has no gradient");
  }
  ++step_;
  const double t = static_cast<double>(step_);
  const double correction1 = 1.0 - std::pow(config_.beta1, t);
  const double correction2 = 1.0 - std::pow(config_.beta2, t);
  const double lr = config_.lr;
  const double decay = config_.lr * config_.weight_decay;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    Tensor &p = params_[i].second;
    auto values = p.values();
    const auto grads = p.grad();
    auto &m = m_[i];
    auto &v = v_[i];
    for (std::size_t j = 0; j < values.size(); ++j) {
      const double g = grads[j];
      m[j] = config_.beta1 * m[j] + (1.0 - config_.beta1) * g;
      v[j] = config_.beta2 * v[j] + (1.0 - config_.beta2) * g * g;
      const double m_hat = m[j] / correction1;
      const double v_hat = v[j] / correction2;
      values[j] = values[j] - lr * (m_hat / (std::sqrt(v_hat) + config_.eps)) - decay * values[j];
    }
  }
}

void AdamW::zero_grad() {
  for (auto &[name, t] : params_) t.zero_grad();
}

}  // namespace chordgraph::ad
