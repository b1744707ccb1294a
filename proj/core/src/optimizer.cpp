// Copyright 2026 The msum Authors
// SPDX-License-Identifier: Apache-2.0

#include "msum/optimizer.hpp"

#include <cmath>

namespace msum {

std::string_view to_string(OptimizerKind kind) {
  return kind == OptimizerKind::adam ? "adam" : "sgd";
}

std::optional<OptimizerKind> parse_optimizer(std::string_view text) {
  if (text == "sgd") return OptimizerKind::sgd;
  if (text == "adam") return OptimizerKind::adam;
  return std::nullopt;
}

template <typename T>
void Optimizer<T>::apply(BasicParameterStore<T>& params, const BasicGradientStore<T>& grads,
                         double learning_rate) {
  params.require_same_layout(grads);
  ++steps_;
  auto p_it = params.begin();
  auto g_it = grads.begin();

  if (config_.kind == OptimizerKind::sgd) {
    const T lr = static_cast<T>(learning_rate);
    for (; p_it != params.end(); ++p_it, ++g_it) {
      auto& p = p_it->tensor;
      const auto& g = g_it->tensor;
      for (std::size_t i = 0; i < p.size(); ++i) p[i] -= lr * g[i];
    }
    return;
  }

  if (!first_moment_) {
    first_moment_ = params.zeros_like();
    second_moment_ = params.zeros_like();
  }
  params.require_same_layout(*first_moment_);
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double t = static_cast<double>(steps_);
  const double c1 = 1.0 - std::pow(b1, t);
  const double c2 = 1.0 - std::pow(b2, t);
  auto m_it = first_moment_->begin();
  auto v_it = second_moment_->begin();
  for (; p_it != params.end(); ++p_it, ++g_it, ++m_it, ++v_it) {
    auto& p = p_it->tensor;
    const auto& g = g_it->tensor;
    auto& m = m_it->tensor;
    auto& v = v_it->tensor;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double gi = static_cast<double>(g[i]);
      const double mi = b1 * static_cast<double>(m[i]) + (1.0 - b1) * gi;
      const double vi = b2 * static_cast<double>(v[i]) + (1.0 - b2) * gi * gi;
      m[i] = static_cast<T>(mi);
      v[i] = static_cast<T>(vi);
      const double step = learning_rate * (mi / c1) / (std::sqrt(vi / c2) + config_.epsilon);
      p[i] = static_cast<T>(static_cast<double>(p[i]) - step);
    }
  }
}

template class Optimizer<float>;
template class Optimizer<double>;

}  // namespace msum
