// Copyright 2026 The msum Authors
// SPDX-License-Identifier: Apache-2.0

#include "msum/autograd.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace msum {

template <typename T>
VarId Tape<T>::constant(BasicTensor<T> value) {
  Node n;
  n.owned = std::move(value);
  nodes_.push_back(std::move(n));
  return {static_cast<std::uint32_t>(nodes_.size() - 1)};
}

template <typename T>
VarId Tape<T>::parameter(const BasicTensor<T>& value, BasicTensor<T>* grad_sink) {
  if (grad_sink != nullptr && !grad_sink->same_shape(value)) {
    throw Error(ErrorKind::usage, "gradient sink shape does not match its parameter");
  }
  Node n;
  n.ref = &value;
  n.sink = grad_sink;
  n.requires_grad = grad_sink != nullptr;
  nodes_.push_back(std::move(n));
  return {static_cast<std::uint32_t>(nodes_.size() - 1)};
}

template <typename T>
VarId Tape<T>::record(std::string_view op, BasicTensor<T> value,
                      std::initializer_list<VarId> parents, Backward backward) {
  return record(op, std::move(value), std::span<const VarId>(parents.begin(), parents.size()),
                std::move(backward));
}

template <typename T>
VarId Tape<T>::record(std::string_view op, BasicTensor<T> value, std::span<const VarId> parents,
                      Backward backward) {
  if (!value.all_finite()) {
    throw Error(ErrorKind::numeric, "non-finite value produced by " + std::string(op));
  }
  Node n;
  n.owned = std::move(value);
  n.requires_grad = std::any_of(parents.begin(), parents.end(),
                                [&](VarId p) { return nodes_[p.id].requires_grad; });
  if (n.requires_grad) n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return {static_cast<std::uint32_t>(nodes_.size() - 1)};
}

template <typename T>
const BasicTensor<T>& Tape<T>::value(VarId v) const {
  const Node& n = nodes_[v.id];
  return n.ref != nullptr ? *n.ref : n.owned;
}

template <typename T>
BasicTensor<T>& Tape<T>::grad(VarId v) {
  Node& n = nodes_[v.id];
  if (n.sink != nullptr) return *n.sink;
  if (!n.has_grad) {
    n.grad = BasicTensor<T>(value(v).shape());
    n.has_grad = true;
  }
  return n.grad;
}

template <typename T>
void Tape<T>::backward(VarId root, T seed) {
  if (value(root).size() != 1) throw Error(ErrorKind::usage, "backward root must be a scalar");
  if (!nodes_[root.id].requires_grad) return;
  grad(root)[0] += seed;
  for (std::size_t i = root.id + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (n.backward && n.has_grad) n.backward(*this, VarId{static_cast<std::uint32_t>(i)});
  }
}

template class Tape<float>;
template class Tape<double>;

namespace ag {
namespace {

template <typename T>
void require(bool ok, const char* op, const char* what) {
  if (!ok) throw Error(ErrorKind::usage, std::string(op) + ": " + what);
}

}  // namespace

template <typename T>
VarId matmul(Tape<T>& t, VarId a, VarId b) {
  const auto& A = t.value(a);
  const auto& B = t.value(b);
  const std::size_t m = A.rows(), k = A.cols(), n = B.cols();
  require<T>(B.rows() == k, "matmul", "inner dimensions differ");
  auto C = BasicTensor<T>::matrix(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    T* c = C.data() + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const T av = A[i * k + p];
      const T* brow = B.data() + p * n;
      for (std::size_t j = 0; j < n; ++j) c[j] += av * brow[j];
    }
  }
  return t.record("matmul", std::move(C), {a, b}, [a, b, m, k, n](Tape<T>& tp, VarId self) {
    const auto& dC = tp.grad(self);
    const auto& A = tp.value(a);
    const auto& B = tp.value(b);
    if (tp.requires_grad(a)) {
      auto& dA = tp.grad(a);
      for (std::size_t i = 0; i < m; ++i) {
        const T* dc = dC.data() + i * n;
        for (std::size_t p = 0; p < k; ++p) {
          const T* brow = B.data() + p * n;
          T acc = 0;
          for (std::size_t j = 0; j < n; ++j) acc += dc[j] * brow[j];
          dA[i * k + p] += acc;
        }
      }
    }
    if (tp.requires_grad(b)) {
      auto& dB = tp.grad(b);
      for (std::size_t i = 0; i < m; ++i) {
        const T* dc = dC.data() + i * n;
        for (std::size_t p = 0; p < k; ++p) {
          const T av = A[i * k + p];
          T* db = dB.data() + p * n;
          for (std::size_t j = 0; j < n; ++j) db[j] += av * dc[j];
        }
      }
    }
  });
}

template <typename T>
VarId matmul_nt(Tape<T>& t, VarId a, VarId b) {
  const auto& A = t.value(a);
  const auto& B = t.value(b);
  const std::size_t m = A.rows(), k = A.cols(), n = B.rows();
  require<T>(B.cols() == k, "matmul_nt", "inner dimensions differ");
  auto C = BasicTensor<T>::matrix(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      T acc = 0;
      for (std::size_t p = 0; p < k; ++p) acc += A[i * k + p] * B[j * k + p];
      C[i * n + j] = acc;
    }
  }
  return t.record("matmul_nt", std::move(C), {a, b}, [a, b, m, k, n](Tape<T>& tp, VarId self) {
    const auto& dC = tp.grad(self);
    const auto& A = tp.value(a);
    const auto& B = tp.value(b);
    if (tp.requires_grad(a)) {
      auto& dA = tp.grad(a);
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          const T g = dC[i * n + j];
          for (std::size_t p = 0; p < k; ++p) dA[i * k + p] += g * B[j * k + p];
        }
      }
    }
    if (tp.requires_grad(b)) {
      auto& dB = tp.grad(b);
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          const T g = dC[i * n + j];
          for (std::size_t p = 0; p < k; ++p) dB[j * k + p] += g * A[i * k + p];
        }
      }
    }
  });
}

template <typename T>
VarId add(Tape<T>& t, VarId a, VarId b) {
  const auto& A = t.value(a);
  const auto& B = t.value(b);
  require<T>(A.size() == B.size() && A.rows() == B.rows(), "add", "shape mismatch");
  auto C = A;
  for (std::size_t i = 0; i < C.size(); ++i) C[i] += B[i];
  return t.record("add", std::move(C), {a, b}, [a, b](Tape<T>& tp, VarId self) {
    const auto& d = tp.grad(self);
    for (VarId p : {a, b}) {
      if (!tp.requires_grad(p)) continue;
      auto& g = tp.grad(p);
      for (std::size_t i = 0; i < d.size(); ++i) g[i] += d[i];
    }
  });
}

template <typename T>
VarId add_row(Tape<T>& t, VarId a, VarId bias) {
  const auto& A = t.value(a);
  const auto& b = t.value(bias);
  const std::size_t m = A.rows(), n = A.cols();
  require<T>(b.size() == n, "add_row", "bias length differs from column count");
  auto C = A;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) C[i * n + j] += b[j];
  }
  return t.record("add_row", std::move(C), {a, bias}, [a, bias, m, n](Tape<T>& tp, VarId self) {
    const auto& d = tp.grad(self);
    if (tp.requires_grad(a)) {
      auto& g = tp.grad(a);
      for (std::size_t i = 0; i < d.size(); ++i) g[i] += d[i];
    }
    if (tp.requires_grad(bias)) {
      auto& g = tp.grad(bias);
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) g[j] += d[i * n + j];
      }
    }
  });
}

template <typename T>
VarId linear(Tape<T>& t, VarId x, VarId weight, VarId bias) {
  return add_row(t, matmul(t, x, weight), bias);
}

template <typename T>
VarId relu(Tape<T>& t, VarId a) {
  auto Y = t.value(a);
  for (auto& v : Y.values()) v = v > T(0) ? v : T(0);
  return t.record("relu", std::move(Y), {a}, [a](Tape<T>& tp, VarId self) {
    const auto& d = tp.grad(self);
    const auto& X = tp.value(a);
    auto& g = tp.grad(a);
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (X[i] > T(0)) g[i] += d[i];
    }
  });
}

template <typename T>
VarId sigmoid(Tape<T>& t, VarId a) {
  auto Y = t.value(a);
  for (auto& v : Y.values()) {
    if (v >= T(0)) {
      v = T(1) / (T(1) + std::exp(-v));
    } else {
      const T e = std::exp(v);
      v = e / (T(1) + e);
    }
  }
  return t.record("sigmoid", std::move(Y), {a}, [a](Tape<T>& tp, VarId self) {
    const auto& d = tp.grad(self);
    const auto& Y = tp.value(self);
    auto& g = tp.grad(a);
    for (std::size_t i = 0; i < d.size(); ++i) g[i] += d[i] * Y[i] * (T(1) - Y[i]);
  });
}

template <typename T>
VarId scale(Tape<T>& t, VarId a, T factor) {
  auto Y = t.value(a);
  for (auto& v : Y.values()) v *= factor;
  return t.record("scale", std::move(Y), {a}, [a, factor](Tape<T>& tp, VarId self) {
    const auto& d = tp.grad(self);
    auto& g = tp.grad(a);
    for (std::size_t i = 0; i < d.size(); ++i) g[i] += d[i] * factor;
  });
}

template <typename T>
VarId mul_const(Tape<T>& t, VarId a, BasicTensor<T> mask) {
  auto Y = t.value(a);
  require<T>(mask.size() == Y.size(), "mul_const", "mask size mismatch");
  for (std::size_t i = 0; i < Y.size(); ++i) Y[i] *= mask[i];
  return t.record("mul_const", std::move(Y), {a},
                  [a, mask = std::move(mask)](Tape<T>& tp, VarId self) {
                    const auto& d = tp.grad(self);
                    auto& g = tp.grad(a);
                    for (std::size_t i = 0; i < d.size(); ++i) g[i] += d[i] * mask[i];
                  });
}

template <typename T>
VarId gather_rows(Tape<T>& t, VarId table, std::span<const std::int32_t> ids) {
  const auto& W = t.value(table);
  const std::size_t rows = W.rows(), e = W.cols();
  auto Y = BasicTensor<T>::matrix(ids.size(), e);
  for (std::size_t r = 0; r < ids.size(); ++r) {
    require<T>(ids[r] >= 0 && static_cast<std::size_t>(ids[r]) < rows, "gather_rows",
               "index out of range");
    std::copy_n(W.data() + static_cast<std::size_t>(ids[r]) * e, e, Y.data() + r * e);
  }
  std::vector<std::int32_t> idx(ids.begin(), ids.end());
  return t.record("gather_rows", std::move(Y), {table},
                  [table, e, idx = std::move(idx)](Tape<T>& tp, VarId self) {
                    const auto& d = tp.grad(self);
                    auto& g = tp.grad(table);
                    for (std::size_t r = 0; r < idx.size(); ++r) {
                      T* dst = g.data() + static_cast<std::size_t>(idx[r]) * e;
                      const T* src = d.data() + r * e;
                      for (std::size_t j = 0; j < e; ++j) dst[j] += src[j];
                    }
                  });
}

template <typename T>
VarId conv1d(Tape<T>& t, VarId x, VarId weight, VarId bias, std::size_t width) {
  const auto& X = t.value(x);
  const auto& W = t.value(weight);
  const auto& b = t.value(bias);
  const std::size_t len = X.rows(), e = X.cols(), f = W.cols();
  require<T>(width >= 1 && len >= width, "conv1d", "input shorter than filter width");
  require<T>(W.rows() == width * e, "conv1d", "weight rows must equal width * embed_dim");
  require<T>(b.size() == f, "conv1d", "bias length mismatch");
  const std::size_t out_len = len - width + 1, q_len = width * e;
  auto Y = BasicTensor<T>::matrix(out_len, f);
  for (std::size_t s = 0; s < out_len; ++s) {
    T* y = Y.data() + s * f;
    for (std::size_t j = 0; j < f; ++j) y[j] = b[j];
    const T* window = X.data() + s * e;
    for (std::size_t q = 0; q < q_len; ++q) {
      const T xv = window[q];
      const T* wrow = W.data() + q * f;
      for (std::size_t j = 0; j < f; ++j) y[j] += xv * wrow[j];
    }
  }
  return t.record("conv1d", std::move(Y), {x, weight, bias},
                  [x, weight, bias, e, f, out_len, q_len](Tape<T>& tp, VarId self) {
                    const auto& d = tp.grad(self);
                    const auto& X = tp.value(x);
                    const auto& W = tp.value(weight);
                    if (tp.requires_grad(weight)) {
                      auto& dW = tp.grad(weight);
                      for (std::size_t s = 0; s < out_len; ++s) {
                        const T* window = X.data() + s * e;
                        const T* dy = d.data() + s * f;
                        for (std::size_t q = 0; q < q_len; ++q) {
                          const T xv = window[q];
                          T* dw = dW.data() + q * f;
                          for (std::size_t j = 0; j < f; ++j) dw[j] += xv * dy[j];
                        }
                      }
                    }
                    if (tp.requires_grad(bias)) {
                      auto& db = tp.grad(bias);
                      for (std::size_t s = 0; s < out_len; ++s) {
                        for (std::size_t j = 0; j < f; ++j) db[j] += d[s * f + j];
                      }
                    }
                    if (tp.requires_grad(x)) {
                      auto& dX = tp.grad(x);
                      for (std::size_t s = 0; s < out_len; ++s) {
                        const T* dy = d.data() + s * f;
                        T* dwin = dX.data() + s * e;
                        for (std::size_t q = 0; q < q_len; ++q) {
                          const T* wrow = W.data() + q * f;
                          T acc = 0;
                          for (std::size_t j = 0; j < f; ++j) acc += wrow[j] * dy[j];
                          dwin[q] += acc;
                        }
                      }
                    }
                  });
}

template <typename T>
VarId max_rows(Tape<T>& t, VarId x) {
  const auto& X = t.value(x);
  const std::size_t m = X.rows(), n = X.cols();
  auto Y = BasicTensor<T>::matrix(1, n);
  std::vector<std::size_t> arg(n, 0);
  for (std::size_t j = 0; j < n; ++j) {
    T best = X[j];
    for (std::size_t i = 1; i < m; ++i) {
      if (X[i * n + j] > best) {
        best = X[i * n + j];
        arg[j] = i;
      }
    }
    Y[j] = best;
  }
  return t.record("max_rows", std::move(Y), {x}, [x, n, arg = std::move(arg)](Tape<T>& tp, VarId self) {
    const auto& d = tp.grad(self);
    auto& g = tp.grad(x);
    for (std::size_t j = 0; j < n; ++j) g[arg[j] * n + j] += d[j];
  });
}

template <typename T>
VarId mean_rows(Tape<T>& t, VarId x) {
  const auto& X = t.value(x);
  const std::size_t m = X.rows(), n = X.cols();
  require<T>(m > 0, "mean_rows", "empty input");
  auto Y = BasicTensor<T>::matrix(1, n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) Y[j] += X[i * n + j];
  }
  const T inv = T(1) / static_cast<T>(m);
  for (auto& v : Y.values()) v *= inv;
  return t.record("mean_rows", std::move(Y), {x}, [x, m, n, inv](Tape<T>& tp, VarId self) {
    const auto& d = tp.grad(self);
    auto& g = tp.grad(x);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) g[i * n + j] += d[j] * inv;
    }
  });
}

template <typename T>
VarId concat_cols(Tape<T>& t, std::span<const VarId> parts) {
  require<T>(!parts.empty(), "concat_cols", "no inputs");
  const std::size_t m = t.value(parts[0]).rows();
  std::vector<std::size_t> widths;
  std::size_t total = 0;
  for (VarId p : parts) {
    require<T>(t.value(p).rows() == m, "concat_cols", "row count mismatch");
    widths.push_back(t.value(p).cols());
    total += widths.back();
  }
  auto Y = BasicTensor<T>::matrix(m, total);
  std::size_t offset = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const auto& P = t.value(parts[k]);
    for (std::size_t i = 0; i < m; ++i) {
      std::copy_n(P.data() + i * widths[k], widths[k], Y.data() + i * total + offset);
    }
    offset += widths[k];
  }
  std::vector<VarId> ids(parts.begin(), parts.end());
  return t.record("concat_cols", std::move(Y), parts,
                  [ids, widths, m, total](Tape<T>& tp, VarId self) {
                    const auto& d = tp.grad(self);
                    std::size_t offset = 0;
                    for (std::size_t k = 0; k < ids.size(); ++k) {
                      if (tp.requires_grad(ids[k])) {
                        auto& g = tp.grad(ids[k]);
                        for (std::size_t i = 0; i < m; ++i) {
                          for (std::size_t j = 0; j < widths[k]; ++j) {
                            g[i * widths[k] + j] += d[i * total + offset + j];
                          }
                        }
                      }
                      offset += widths[k];
                    }
                  });
}

template <typename T>
VarId concat_rows(Tape<T>& t, std::span<const VarId> parts) {
  require<T>(!parts.empty(), "concat_rows", "no inputs");
  const std::size_t n = t.value(parts[0]).cols();
  std::vector<std::size_t> sizes;
  std::size_t rows = 0;
  for (VarId p : parts) {
    require<T>(t.value(p).cols() == n, "concat_rows", "column count mismatch");
    sizes.push_back(t.value(p).size());
    rows += t.value(p).rows();
  }
  auto Y = BasicTensor<T>::matrix(rows, n);
  std::size_t offset = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    std::copy_n(t.value(parts[k]).data(), sizes[k], Y.data() + offset);
    offset += sizes[k];
  }
  std::vector<VarId> ids(parts.begin(), parts.end());
  return t.record("concat_rows", std::move(Y), parts, [ids, sizes](Tape<T>& tp, VarId self) {
    const auto& d = tp.grad(self);
    std::size_t offset = 0;
    for (std::size_t k = 0; k < ids.size(); ++k) {
      if (tp.requires_grad(ids[k])) {
        auto& g = tp.grad(ids[k]);
        for (std::size_t i = 0; i < sizes[k]; ++i) g[i] += d[offset + i];
      }
      offset += sizes[k];
    }
  });
}

template <typename T>
VarId slice_cols(Tape<T>& t, VarId x, std::size_t begin, std::size_t count) {
  const auto& X = t.value(x);
  const std::size_t m = X.rows(), n = X.cols();
  require<T>(begin + count <= n, "slice_cols", "slice out of range");
  auto Y = BasicTensor<T>::matrix(m, count);
  for (std::size_t i = 0; i < m; ++i) std::copy_n(X.data() + i * n + begin, count, Y.data() + i * count);
  return t.record("slice_cols", std::move(Y), {x}, [x, m, n, begin, count](Tape<T>& tp, VarId self) {
    const auto& d = tp.grad(self);
    auto& g = tp.grad(x);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < count; ++j) g[i * n + begin + j] += d[i * count + j];
    }
  });
}

template <typename T>
VarId softmax_rows(Tape<T>& t, VarId x) {
  auto Y = t.value(x);
  const std::size_t m = Y.rows(), n = Y.cols();
  for (std::size_t i = 0; i < m; ++i) {
    T* row = Y.data() + i * n;
    const T mx = *std::max_element(row, row + n);
    T sum = 0;
    for (std::size_t j = 0; j < n; ++j) {
      row[j] = std::exp(row[j] - mx);
      sum += row[j];
    }
    for (std::size_t j = 0; j < n; ++j) row[j] /= sum;
  }
  return t.record("softmax_rows", std::move(Y), {x}, [x, m, n](Tape<T>& tp, VarId self) {
    const auto& d = tp.grad(self);
    const auto& Y = tp.value(self);
    auto& g = tp.grad(x);
    for (std::size_t i = 0; i < m; ++i) {
      T dot = 0;
      for (std::size_t j = 0; j < n; ++j) dot += Y[i * n + j] * d[i * n + j];
      for (std::size_t j = 0; j < n; ++j) g[i * n + j] += Y[i * n + j] * (d[i * n + j] - dot);
    }
  });
}

template <typename T>
VarId layer_norm_rows(Tape<T>& t, VarId x, VarId gain, VarId bias, T eps) {
  const auto& X = t.value(x);
  const auto& G = t.value(gain);
  const auto& B = t.value(bias);
  const std::size_t m = X.rows(), n = X.cols();
  require<T>(G.size() == n && B.size() == n, "layer_norm_rows", "gain/bias length mismatch");
  auto Y = BasicTensor<T>::matrix(m, n);
  std::vector<T> xhat(m * n);
  std::vector<T> inv_std(m);
  for (std::size_t i = 0; i < m; ++i) {
    const T* row = X.data() + i * n;
    T mean = 0;
    for (std::size_t j = 0; j < n; ++j) mean += row[j];
    mean /= static_cast<T>(n);
    T var = 0;
    for (std::size_t j = 0; j < n; ++j) var += (row[j] - mean) * (row[j] - mean);
    var /= static_cast<T>(n);
    inv_std[i] = T(1) / std::sqrt(var + eps);
    for (std::size_t j = 0; j < n; ++j) {
      xhat[i * n + j] = (row[j] - mean) * inv_std[i];
      Y[i * n + j] = G[j] * xhat[i * n + j] + B[j];
    }
  }
  return t.record("layer_norm_rows", std::move(Y), {x, gain, bias},
                  [x, gain, bias, m, n, xhat = std::move(xhat), inv_std = std::move(inv_std)](
                      Tape<T>& tp, VarId self) {
                    const auto& d = tp.grad(self);
                    const auto& G = tp.value(gain);
                    if (tp.requires_grad(gain)) {
                      auto& dg = tp.grad(gain);
                      for (std::size_t i = 0; i < m * n; ++i) dg[i % n] += d[i] * xhat[i];
                    }
                    if (tp.requires_grad(bias)) {
                      auto& db = tp.grad(bias);
                      for (std::size_t i = 0; i < m * n; ++i) db[i % n] += d[i];
                    }
                    if (tp.requires_grad(x)) {
                      auto& dx = tp.grad(x);
                      const T nn = static_cast<T>(n);
                      for (std::size_t i = 0; i < m; ++i) {
                        T sum_dh = 0;
                        T sum_dh_xh = 0;
                        for (std::size_t j = 0; j < n; ++j) {
                          const T dh = d[i * n + j] * G[j];
                          sum_dh += dh;
                          sum_dh_xh += dh * xhat[i * n + j];
                        }
                        for (std::size_t j = 0; j < n; ++j) {
                          const T dh = d[i * n + j] * G[j];
                          dx[i * n + j] +=
                              inv_std[i] / nn * (nn * dh - sum_dh - xhat[i * n + j] * sum_dh_xh);
                        }
                      }
                    }
                  });
}

template <typename T>
VarId bce_mean(Tape<T>& t, VarId probs, std::span<const T> labels) {
  const auto& P = t.value(probs);
  if (P.size() != labels.size()) {
    throw Error(ErrorKind::usage, "bce_mean: " + std::to_string(P.size()) + " probabilities for " +
                                      std::to_string(labels.size()) + " labels");
  }
  require<T>(!labels.empty(), "bce_mean", "empty input");
  const T lo = static_cast<T>(kProbabilityClamp);
  const T hi = T(1) - lo;
  const T inv_n = T(1) / static_cast<T>(labels.size());
  T loss = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const T p = std::clamp(P[i], lo, hi);
    loss -= labels[i] * std::log(p) + (T(1) - labels[i]) * std::log(T(1) - p);
  }
  auto Y = BasicTensor<T>::matrix(1, 1, loss * inv_n);
  std::vector<T> y(labels.begin(), labels.end());
  return t.record("bce_mean", std::move(Y), {probs},
                  [probs, lo, hi, inv_n, y = std::move(y)](Tape<T>& tp, VarId self) {
                    const T d = tp.grad(self)[0];
                    const auto& P = tp.value(probs);
                    auto& g = tp.grad(probs);
                    for (std::size_t i = 0; i < y.size(); ++i) {
                      const T p = P[i];
                      if (p <= lo || p >= hi) continue;
                      g[i] += -d * inv_n * (y[i] / p - (T(1) - y[i]) / (T(1) - p));
                    }
                  });
}

template <typename T>
VarId softmax_xent(Tape<T>& t, VarId logits, std::size_t target) {
  const auto& Z = t.value(logits);
  require<T>(target < Z.size(), "softmax_xent", "target out of range");
  const T mx = *std::max_element(Z.data(), Z.data() + Z.size());
  T sum = 0;
  for (std::size_t j = 0; j < Z.size(); ++j) sum += std::exp(Z[j] - mx);
  const T lse = mx + std::log(sum);
  auto Y = BasicTensor<T>::matrix(1, 1, lse - Z[target]);
  return t.record("softmax_xent", std::move(Y), {logits}, [logits, target, lse](Tape<T>& tp, VarId self) {
    const T d = tp.grad(self)[0];
    const auto& Z = tp.value(logits);
    auto& g = tp.grad(logits);
    for (std::size_t j = 0; j < Z.size(); ++j) {
      g[j] += d * (std::exp(Z[j] - lse) - (j == target ? T(1) : T(0)));
    }
  });
}

#define MSUM_INSTANTIATE_OPS(T)                                                              \
  template VarId matmul<T>(Tape<T>&, VarId, VarId);                                          \
  template VarId matmul_nt<T>(Tape<T>&, VarId, VarId);                                       \
  template VarId add<T>(Tape<T>&, VarId, VarId);                                             \
  template VarId add_row<T>(Tape<T>&, VarId, VarId);                                         \
  template VarId linear<T>(Tape<T>&, VarId, VarId, VarId);                                   \
  template VarId relu<T>(Tape<T>&, VarId);                                                   \
  template VarId sigmoid<T>(Tape<T>&, VarId);                                                \
  template VarId scale<T>(Tape<T>&, VarId, T);                                               \
  template VarId mul_const<T>(Tape<T>&, VarId, BasicTensor<T>);                              \
  template VarId gather_rows<T>(Tape<T>&, VarId, std::span<const std::int32_t>);             \
  template VarId conv1d<T>(Tape<T>&, VarId, VarId, VarId, std::size_t);                      \
  template VarId max_rows<T>(Tape<T>&, VarId);                                               \
  template VarId mean_rows<T>(Tape<T>&, VarId);                                              \
  template VarId concat_cols<T>(Tape<T>&, std::span<const VarId>);                           \
  template VarId concat_rows<T>(Tape<T>&, std::span<const VarId>);                           \
  template VarId slice_cols<T>(Tape<T>&, VarId, std::size_t, std::size_t);                   \
  template VarId softmax_rows<T>(Tape<T>&, VarId);                                           \
  template VarId layer_norm_rows<T>(Tape<T>&, VarId, VarId, VarId, T);                       \
  template VarId bce_mean<T>(Tape<T>&, VarId, std::span<const T>);                           \
  template VarId softmax_xent<T>(Tape<T>&, VarId, std::size_t);

MSUM_INSTANTIATE_OPS(float)
MSUM_INSTANTIATE_OPS(double)

#undef MSUM_INSTANTIATE_OPS

}  // namespace ag
}  // namespace msum
