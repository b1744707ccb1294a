// Copyright 2026 The msum Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "msum/tensor.hpp"

namespace msum {

enum class OptimizerKind { sgd, adam };

std::string_view to_string(OptimizerKind kind);
std::optional<OptimizerKind> parse_optimizer(std::string_view text);

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::sgd;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Plain SGD or bias-corrected Adam. State is created lazily on the first
/// update and must keep seeing stores with the same layout.
template <typename T>
class Optimizer {
 public:
  explicit Optimizer(OptimizerConfig config = {}) : config_(config) {}

  void apply(BasicParameterStore<T>& params, const BasicGradientStore<T>& grads, double learning_rate);

  std::uint64_t steps() const noexcept { return steps_; }
  const OptimizerConfig& config() const noexcept { return config_; }

 private:
  OptimizerConfig config_;
  std::uint64_t steps_ = 0;
  std::optional<BasicParameterStore<T>> first_moment_;
  std::optional<BasicParameterStore<T>> second_moment_;
};

/// Free-function form of one update.
template <typename T>
void apply_update(BasicParameterStore<T>& params, const BasicGradientStore<T>& grads,
                  Optimizer<T>& optimizer, double learning_rate) {
  optimizer.apply(params, grads, learning_rate);
}

}  // namespace msum
