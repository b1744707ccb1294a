// Copyright 2026 The msum Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "msum/tensor.hpp"

namespace msum {

/// Handle to a node on a Tape.
struct VarId {
  std::uint32_t id = 0;
};

/// Reverse-mode tape. Nodes are appended in evaluation order; `backward`
/// walks them in reverse. Parameter leaves reference caller-owned tensors and
/// accumulate their gradients directly into a caller-owned sink.
template <typename T>
class Tape {
 public:
  using Backward = std::function<void(Tape&, VarId self)>;

  VarId constant(BasicTensor<T> value);
  /// `grad_sink` may be null, in which case the leaf is treated as constant.
  VarId parameter(const BasicTensor<T>& value, BasicTensor<T>* grad_sink);
  /// Appends an op output. Throws a numeric error if `value` is not finite.
  VarId record(std::string_view op, BasicTensor<T> value, std::initializer_list<VarId> parents,
               Backward backward);
  VarId record(std::string_view op, BasicTensor<T> value, std::span<const VarId> parents,
               Backward backward);

  const BasicTensor<T>& value(VarId v) const;
  bool requires_grad(VarId v) const { return nodes_[v.id].requires_grad; }
  /// Gradient accumulator of `v`, zero-initialized on first access.
  BasicTensor<T>& grad(VarId v);

  /// Seeds d(root) = `seed` (root must be a single element) and propagates.
  void backward(VarId root, T seed = T(1));

  std::size_t size() const noexcept { return nodes_.size(); }

 private:
  struct Node {
    BasicTensor<T> owned;
    const BasicTensor<T>* ref = nullptr;
    BasicTensor<T> grad;
    BasicTensor<T>* sink = nullptr;
    bool requires_grad = false;
    bool has_grad = false;
    Backward backward;
  };

  std::vector<Node> nodes_;
};

namespace ag {

template <typename T> VarId matmul(Tape<T>& t, VarId a, VarId b);
/// a * b^T
template <typename T> VarId matmul_nt(Tape<T>& t, VarId a, VarId b);
template <typename T> VarId add(Tape<T>& t, VarId a, VarId b);
/// Adds a bias of `cols` entries to every row.
template <typename T> VarId add_row(Tape<T>& t, VarId a, VarId bias);
template <typename T> VarId linear(Tape<T>& t, VarId x, VarId weight, VarId bias);
template <typename T> VarId relu(Tape<T>& t, VarId a);
template <typename T> VarId sigmoid(Tape<T>& t, VarId a);
template <typename T> VarId scale(Tape<T>& t, VarId a, T factor);
/// Elementwise product with a constant tensor (dropout masks).
template <typename T> VarId mul_const(Tape<T>& t, VarId a, BasicTensor<T> mask);
template <typename T> VarId gather_rows(Tape<T>& t, VarId table, std::span<const std::int32_t> ids);
/// Valid 1-D convolution over rows: x [L, E], weight [width*E, F], bias [F]
/// -> [L-width+1, F]. Requires L >= width.
template <typename T> VarId conv1d(Tape<T>& t, VarId x, VarId weight, VarId bias, std::size_t width);
/// Column-wise maximum over rows -> [1, cols]; ties route to the first row.
template <typename T> VarId max_rows(Tape<T>& t, VarId x);
template <typename T> VarId mean_rows(Tape<T>& t, VarId x);
template <typename T> VarId concat_cols(Tape<T>& t, std::span<const VarId> parts);
template <typename T> VarId concat_rows(Tape<T>& t, std::span<const VarId> parts);
template <typename T> VarId slice_cols(Tape<T>& t, VarId x, std::size_t begin, std::size_t count);
template <typename T> VarId softmax_rows(Tape<T>& t, VarId x);
template <typename T> VarId layer_norm_rows(Tape<T>& t, VarId x, VarId gain, VarId bias, T eps);
/// Mean binary cross-entropy of probabilities [n, 1] against 0/1 labels, with
/// probabilities clamped to [1e-7, 1 - 1e-7].
template <typename T> VarId bce_mean(Tape<T>& t, VarId probs, std::span<const T> labels);
/// Softmax cross-entropy of logits [1, C] against a class index.
template <typename T> VarId softmax_xent(Tape<T>& t, VarId logits, std::size_t target);

}  // namespace ag

inline constexpr double kProbabilityClamp = 1e-7;

}  // namespace msum
