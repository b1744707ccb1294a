// Copyright 2026 The msum Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "msum/error.hpp"

namespace msum {

/// Dense row-major tensor of rank 0..2. Rank-1 tensors behave as a single row
/// when used as a matrix.
template <typename T>
class BasicTensor {
 public:
  using value_type = T;

  BasicTensor() = default;
  explicit BasicTensor(std::vector<std::size_t> shape, T fill = T(0))
      : shape_(std::move(shape)), data_(element_count(shape_), fill) {}
  BasicTensor(std::vector<std::size_t> shape, std::vector<T> data)
      : shape_(std::move(shape)), data_(std::move(data)) {
    if (data_.size() != element_count(shape_)) {
      throw Error(ErrorKind::usage, "tensor data length does not match its shape");
    }
  }

  static BasicTensor matrix(std::size_t rows, std::size_t cols, T fill = T(0)) {
    return BasicTensor({rows, cols}, fill);
  }

  const std::vector<std::size_t>& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }
  std::size_t rows() const noexcept { return shape_.size() == 2 ? shape_[0] : 1; }
  std::size_t cols() const noexcept {
    if (shape_.size() == 2) return shape_[1];
    return shape_.empty() ? 1 : shape_[0];
  }

  T* data() noexcept { return data_.data(); }
  const T* data() const noexcept { return data_.data(); }
  std::span<T> values() noexcept { return data_; }
  std::span<const T> values() const noexcept { return data_; }

  T& operator[](std::size_t i) noexcept { return data_[i]; }
  const T& operator[](std::size_t i) const noexcept { return data_[i]; }
  T& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols() + c]; }
  const T& operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols() + c]; }

  void fill(T value) { std::fill(data_.begin(), data_.end(), value); }

  bool all_finite() const noexcept {
    for (T v : data_) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }

  bool same_shape(const BasicTensor& other) const noexcept { return shape_ == other.shape_; }

  template <typename U>
  BasicTensor<U> cast() const {
    std::vector<U> out(data_.size());
    for (std::size_t i = 0; i < data_.size(); ++i) out[i] = static_cast<U>(data_[i]);
    return BasicTensor<U>(shape_, std::move(out));
  }

  friend bool operator==(const BasicTensor& a, const BasicTensor& b) {
    return a.shape_ == b.shape_ && a.data_ == b.data_;
  }

 private:
  static std::size_t element_count(const std::vector<std::size_t>& shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
  }

  std::vector<std::size_t> shape_;
  std::vector<T> data_;
};

using Tensor = BasicTensor<float>;

/// Named tensors in insertion order. Also used as the gradient store, where
/// each entry shape-matches the parameter of the same name.
template <typename T>
class BasicParameterStore {
 public:
  struct Entry {
    std::string name;
    BasicTensor<T> tensor;
  };

  void add(std::string name, BasicTensor<T> tensor) {
    if (index_.count(name) != 0) {
      throw Error(ErrorKind::usage, "duplicate parameter name '" + name + "'");
    }
    index_.emplace(name, entries_.size());
    entries_.push_back({std::move(name), std::move(tensor)});
  }

  bool contains(std::string_view name) const { return index_.find(name) != index_.end(); }

  BasicTensor<T>* find(std::string_view name) {
    auto it = index_.find(name);
    return it == index_.end() ? nullptr : &entries_[it->second].tensor;
  }
  const BasicTensor<T>* find(std::string_view name) const {
    auto it = index_.find(name);
    return it == index_.end() ? nullptr : &entries_[it->second].tensor;
  }

  BasicTensor<T>& at(std::string_view name) {
    if (auto* t = find(name)) return *t;
    throw Error(ErrorKind::usage, "unknown parameter '" + std::string(name) + "'");
  }
  const BasicTensor<T>& at(std::string_view name) const {
    if (const auto* t = find(name)) return *t;
    throw Error(ErrorKind::usage, "unknown parameter '" + std::string(name) + "'");
  }

  std::size_t size() const noexcept { return entries_.size(); }
  auto begin() noexcept { return entries_.begin(); }
  auto end() noexcept { return entries_.end(); }
  auto begin() const noexcept { return entries_.begin(); }
  auto end() const noexcept { return entries_.end(); }

  std::uint64_t seed() const noexcept { return seed_; }
  void set_seed(std::uint64_t seed) noexcept { seed_ = seed; }

  std::size_t parameter_count() const noexcept {
    std::size_t n = 0;
    for (const auto& e : entries_) n += e.tensor.size();
    return n;
  }

  BasicParameterStore zeros_like() const {
    BasicParameterStore out;
    out.seed_ = seed_;
    for (const auto& e : entries_) out.add(e.name, BasicTensor<T>(e.tensor.shape()));
    return out;
  }

  void zero() {
    for (auto& e : entries_) e.tensor.fill(T(0));
  }

  /// this += alpha * other, entry by entry.
  void axpy(T alpha, const BasicParameterStore& other) {
    require_same_layout(other);
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      auto& dst = entries_[i].tensor;
      const auto& src = other.entries_[i].tensor;
      for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += alpha * src[j];
    }
  }

  void scale(T alpha) {
    for (auto& e : entries_) {
      for (auto& v : e.tensor.values()) v *= alpha;
    }
  }

  bool same_layout(const BasicParameterStore& other) const {
    if (entries_.size() != other.entries_.size()) return false;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      if (entries_[i].name != other.entries_[i].name ||
          !entries_[i].tensor.same_shape(other.entries_[i].tensor)) {
        return false;
      }
    }
    return true;
  }

  void require_same_layout(const BasicParameterStore& other) const {
    if (!same_layout(other)) throw Error(ErrorKind::usage, "parameter stores have different layouts");
  }

  template <typename U>
  BasicParameterStore<U> cast() const {
    BasicParameterStore<U> out;
    out.set_seed(seed_);
    for (const auto& e : entries_) out.add(e.name, e.tensor.template cast<U>());
    return out;
  }

  friend bool operator==(const BasicParameterStore& a, const BasicParameterStore& b) {
    if (a.seed_ != b.seed_ || a.entries_.size() != b.entries_.size()) return false;
    for (std::size_t i = 0; i < a.entries_.size(); ++i) {
      if (a.entries_[i].name != b.entries_[i].name || !(a.entries_[i].tensor == b.entries_[i].tensor)) {
        return false;
      }
    }
    return true;
  }

 private:
  std::vector<Entry> entries_;
  std::map<std::string, std::size_t, std::less<>> index_;
  std::uint64_t seed_ = 0;
};

using ParameterStore = BasicParameterStore<float>;
template <typename T>
using BasicGradientStore = BasicParameterStore<T>;
using GradientStore = BasicGradientStore<float>;

/// Throws a numeric error naming the first parameter whose gradient is not finite.
template <typename T>
void require_finite_gradients(const BasicGradientStore<T>& grads) {
  for (const auto& e : grads) {
    if (!e.tensor.all_finite()) {
      throw Error(ErrorKind::numeric, "non-finite gradient for parameter '" + e.name + "'");
    }
  }
}

}  // namespace msum
