// Copyright 2026 The roadapt Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "roadapt/nn/ops.h"

#include <cmath>
#include <string>

#include "roadapt/nn/kernels.h"

namespace roadapt::nn {

namespace {

template <typename T>
void CheckMatrix(const char* op, const Tensor<T>& t) {
  CheckRank(op, t, 2);
}

template <typename T>
void CheckSameShape(const char* op, const Tensor<T>& a, const Tensor<T>& b) {
  CheckDim(op, "rank", a.rank(), b.rank());
  static const char* kAxes[] = {"rows", "channels", "axis2", "axis3"};
  for (std::size_t i = 0; i < a.rank(); ++i) {
    CheckDim(op, kAxes[i < 4 ? i : 3], a.dim(i), b.dim(i));
  }
}

}  // namespace

template <typename T>
Var Linear(Tape<T>& tape, Var x, Var w, Var b) {
  const Tensor<T>& xv = tape.value(x);
  const Tensor<T>& wv = tape.value(w);
  CheckMatrix("Linear", xv);
  CheckMatrix("Linear", wv);
  CheckDim("Linear", "in_features", wv.rows(), xv.cols());
  const std::size_t rows = xv.rows(), in = xv.cols(), out = wv.cols();
  const T* bias = nullptr;
  if (b.valid()) {
    CheckRank("Linear", tape.value(b), 1);
    CheckDim("Linear", "out_features", out, tape.value(b).size());
    bias = tape.value(b).data();
  }
  Tensor<T> y({rows, out});
  kernels::LinearForward(xv.data(), wv.data(), bias, y.data(), rows, in, out);
  std::vector<Var> inputs{x, w};
  if (b.valid()) inputs.push_back(b);
  return tape.Record(std::move(y), inputs, [x, w, b, rows, in, out](Tape<T>& tp, std::size_t self) {
    const Tensor<T>& dy = tp.grad(Var{self});
    T* dx = tp.requires_grad(x) ? tp.grad(x).data() : nullptr;
    T* dw = tp.requires_grad(w) ? tp.grad(w).data() : nullptr;
    T* db = b.valid() && tp.requires_grad(b) ? tp.grad(b).data() : nullptr;
    kernels::LinearBackward(tp.value(x).data(), tp.value(w).data(), dy.data(), dx, dw,
                            db, rows, in, out);
  });
}

template <typename T>
Var DepthwiseConv1d(Tape<T>& tape, Var x, Var kernel, Var bias) {
  const Tensor<T>& xv = tape.value(x);
  const Tensor<T>& kv = tape.value(kernel);
  CheckMatrix("DepthwiseConv1d", xv);
  CheckMatrix("DepthwiseConv1d", kv);
  CheckDim("DepthwiseConv1d", "channels", xv.cols(), kv.rows());
  const T* bias_data = nullptr;
  if (bias.valid()) {
    const Tensor<T>& bv = tape.value(bias);
    CheckRank("DepthwiseConv1d", bv, 1);
    CheckDim("DepthwiseConv1d", "bias", xv.cols(), bv.size());
    bias_data = bv.data();
  }
  if (kv.cols() % 2 == 0) {
    throw DimensionError("DepthwiseConv1d", "kernel (must be odd)", kv.cols() + 1,
                         kv.cols());
  }
  if (xv.rows() == 0) throw DimensionError("DepthwiseConv1d", "rows (T >= 1)", 1, 0);
  const std::size_t rows = xv.rows(), ch = xv.cols(), taps = kv.cols();
  Tensor<T> y({rows, ch});
  kernels::DepthwiseConvForward(xv.data(), kv.data(), bias_data, y.data(), rows, ch, taps);
  std::vector<Var> inputs{x, kernel};
  if (bias.valid()) inputs.push_back(bias);
  return tape.Record(std::move(y), inputs,
                     [x, kernel, bias, rows, ch, taps](Tape<T>& tp, std::size_t self) {
                       const Tensor<T>& dy = tp.grad(Var{self});
                       T* dx = tp.requires_grad(x) ? tp.grad(x).data() : nullptr;
                       T* dk = tp.requires_grad(kernel) ? tp.grad(kernel).data() : nullptr;
                       T* db = bias.valid() && tp.requires_grad(bias) ? tp.grad(bias).data()
                                                                      : nullptr;
                       kernels::DepthwiseConvBackward(tp.value(x).data(),
                                                      tp.value(kernel).data(), dy.data(),
                                                      dx, dk, db, rows, ch, taps);
                     });
}

template <typename T>
Var LayerNorm(Tape<T>& tape, Var x, Var gain, Var shift, T eps) {
  const Tensor<T>& xv = tape.value(x);
  CheckMatrix("LayerNorm", xv);
  const std::size_t rows = xv.rows(), ch = xv.cols();
  if (ch == 0) throw DimensionError("LayerNorm", "channels (C >= 1)", 1, 0);
  CheckDim("LayerNorm", "gain", ch, tape.value(gain).size());
  CheckDim("LayerNorm", "shift", ch, tape.value(shift).size());
  Tensor<T> y({rows, ch});
  std::vector<T> mean(rows), rstd(rows);
  kernels::LayerNormForward(xv.data(), tape.value(gain).data(), tape.value(shift).data(),
                            y.data(), mean.data(), rstd.data(), rows, ch, eps);
  return tape.Record(
      std::move(y), {x, gain, shift},
      [x, gain, shift, rows, ch, mean = std::move(mean), rstd = std::move(rstd)](
          Tape<T>& tp, std::size_t self) {
        const Tensor<T>& dy = tp.grad(Var{self});
        T* dx = tp.requires_grad(x) ? tp.grad(x).data() : nullptr;
        T* dg = tp.requires_grad(gain) ? tp.grad(gain).data() : nullptr;
        T* ds = tp.requires_grad(shift) ? tp.grad(shift).data() : nullptr;
        kernels::LayerNormBackward(tp.value(x).data(), tp.value(gain).data(), mean.data(),
                                   rstd.data(), dy.data(), dx, dg, ds, rows, ch);
      });
}

template <typename T>
Var Gelu(Tape<T>& tape, Var x) {
  const Tensor<T>& xv = tape.value(x);
  Tensor<T> y(xv.shape());
  kernels::GeluForward(xv.data(), y.data(), xv.size());
  return tape.Record(std::move(y), {x}, [x](Tape<T>& tp, std::size_t self) {
    const Tensor<T>& in = tp.value(x);
    kernels::GeluBackward(in.data(), tp.grad(Var{self}).data(), tp.grad(x).data(),
                          in.size());
  });
}

template <typename T>
Var Add(Tape<T>& tape, Var a, Var b) {
  const Tensor<T>& av = tape.value(a);
  const Tensor<T>& bv = tape.value(b);
  CheckSameShape("Add", av, bv);
  Tensor<T> y(av.shape());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = av[i] + bv[i];
  return tape.Record(std::move(y), {a, b}, [a, b](Tape<T>& tp, std::size_t self) {
    const Tensor<T>& dy = tp.grad(Var{self});
    for (Var in : {a, b}) {
      if (!tp.requires_grad(in)) continue;
      Tensor<T>& g = tp.grad(in);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += dy[i];
    }
  });
}

template <typename T>
Var Mul(Tape<T>& tape, Var a, Var b) {
  const Tensor<T>& av = tape.value(a);
  const Tensor<T>& bv = tape.value(b);
  CheckSameShape("Mul", av, bv);
  Tensor<T> y(av.shape());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = av[i] * bv[i];
  return tape.Record(std::move(y), {a, b}, [a, b](Tape<T>& tp, std::size_t self) {
    const Tensor<T>& dy = tp.grad(Var{self});
    const Tensor<T>& av = tp.value(a);
    const Tensor<T>& bv = tp.value(b);
    if (tp.requires_grad(a)) {
      Tensor<T>& g = tp.grad(a);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += dy[i] * bv[i];
    }
    if (tp.requires_grad(b)) {
      Tensor<T>& g = tp.grad(b);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += dy[i] * av[i];
    }
  });
}

template <typename T>
Var MulRowMask(Tape<T>& tape, Var x, std::span<const T> mask) {
  const Tensor<T>& xv = tape.value(x);
  CheckMatrix("MulRowMask", xv);
  CheckDim("MulRowMask", "rows", xv.rows(), mask.size());
  const std::size_t rows = xv.rows(), ch = xv.cols();
  Tensor<T> y({rows, ch});
  for (std::size_t t = 0; t < rows; ++t) {
    for (std::size_t c = 0; c < ch; ++c) y.at(t, c) = xv.at(t, c) * mask[t];
  }
  std::vector<T> m(mask.begin(), mask.end());
  return tape.Record(std::move(y), {x}, [x, m = std::move(m), ch](Tape<T>& tp, std::size_t self) {
    const Tensor<T>& dy = tp.grad(Var{self});
    Tensor<T>& g = tp.grad(x);
    for (std::size_t t = 0; t < m.size(); ++t) {
      for (std::size_t c = 0; c < ch; ++c) g.at(t, c) += dy.at(t, c) * m[t];
    }
  });
}

template <typename T>
Var Embedding(Tape<T>& tape, std::span<const std::int32_t> ids, Var table) {
  const Tensor<T>& tv = tape.value(table);
  CheckMatrix("Embedding", tv);
  for (std::size_t r = 0; r < ids.size(); ++r) {
    if (ids[r] < 0 || static_cast<std::size_t>(ids[r]) >= tv.rows()) {
      throw ValidationError("Embedding: id " + std::to_string(ids[r]) + " at position " +
                            std::to_string(r) + " is outside vocabulary of size " +
                            std::to_string(tv.rows()));
    }
  }
  const std::size_t rows = ids.size(), dim = tv.cols();
  Tensor<T> y({rows, dim});
  kernels::EmbeddingForward(ids.data(), tv.data(), y.data(), rows, dim);
  std::vector<std::int32_t> saved(ids.begin(), ids.end());
  return tape.Record(std::move(y), {table},
                     [table, saved = std::move(saved), dim](Tape<T>& tp, std::size_t self) {
                       kernels::EmbeddingBackward(saved.data(), tp.grad(Var{self}).data(),
                                                  tp.grad(table).data(), saved.size(), dim);
                     });
}

template <typename T>
Var ConcatColumns(Tape<T>& tape, const std::vector<Var>& parts) {
  if (parts.empty()) throw DimensionError("ConcatColumns", "parts", 1, 0);
  const std::size_t rows = tape.value(parts[0]).rows();
  std::size_t total = 0;
  std::vector<std::size_t> widths;
  for (Var p : parts) {
    const Tensor<T>& v = tape.value(p);
    CheckMatrix("ConcatColumns", v);
    CheckDim("ConcatColumns", "rows", rows, v.rows());
    widths.push_back(v.cols());
    total += v.cols();
  }
  Tensor<T> y({rows, total});
  std::size_t offset = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const Tensor<T>& v = tape.value(parts[k]);
    for (std::size_t t = 0; t < rows; ++t) {
      for (std::size_t c = 0; c < widths[k]; ++c) y.at(t, offset + c) = v.at(t, c);
    }
    offset += widths[k];
  }
  return tape.Record(std::move(y), parts,
                     [parts, widths, rows](Tape<T>& tp, std::size_t self) {
                       const Tensor<T>& dy = tp.grad(Var{self});
                       std::size_t off = 0;
                       for (std::size_t k = 0; k < parts.size(); ++k) {
                         if (tp.requires_grad(parts[k])) {
                           Tensor<T>& g = tp.grad(parts[k]);
                           for (std::size_t t = 0; t < rows; ++t) {
                             for (std::size_t c = 0; c < widths[k]; ++c) {
                               g.at(t, c) += dy.at(t, off + c);
                             }
                           }
                         }
                         off += widths[k];
                       }
                     });
}

template <typename T>
Var Sum(Tape<T>& tape, Var x) {
  const Tensor<T>& xv = tape.value(x);
  T acc = 0;
  for (std::size_t i = 0; i < xv.size(); ++i) acc += xv[i];
  return tape.Record(Tensor<T>::Scalar(acc), {x}, [x](Tape<T>& tp, std::size_t self) {
    const T dy = tp.grad(Var{self})[0];
    Tensor<T>& g = tp.grad(x);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += dy;
  });
}

template <typename T>
Var Mse(Tape<T>& tape, Var a, Var b) {
  const Tensor<T>& av = tape.value(a);
  const Tensor<T>& bv = tape.value(b);
  CheckSameShape("Mse", av, bv);
  if (av.size() == 0) throw DimensionError("Mse", "elements", 1, 0);
  T acc = 0;
  for (std::size_t i = 0; i < av.size(); ++i) {
    const T d = av[i] - bv[i];
    acc += d * d;
  }
  const T n = static_cast<T>(av.size());
  return tape.Record(Tensor<T>::Scalar(acc / n), {a, b}, [a, b, n](Tape<T>& tp, std::size_t self) {
    const T scale = T(2) * tp.grad(Var{self})[0] / n;
    const Tensor<T>& av = tp.value(a);
    const Tensor<T>& bv = tp.value(b);
    if (tp.requires_grad(a)) {
      Tensor<T>& g = tp.grad(a);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += scale * (av[i] - bv[i]);
    }
    if (tp.requires_grad(b)) {
      Tensor<T>& g = tp.grad(b);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] -= scale * (av[i] - bv[i]);
    }
  });
}

template <typename T>
Var WeightedSum(Tape<T>& tape, const std::vector<Var>& scalars, std::span<const T> weights) {
  CheckDim("WeightedSum", "weights", scalars.size(), weights.size());
  T acc = 0;
  for (std::size_t i = 0; i < scalars.size(); ++i) {
    CheckDim("WeightedSum", "elements", 1, tape.value(scalars[i]).size());
    acc += weights[i] * tape.value(scalars[i])[0];
  }
  std::vector<T> w(weights.begin(), weights.end());
  return tape.Record(Tensor<T>::Scalar(acc), scalars,
                     [scalars, w = std::move(w)](Tape<T>& tp, std::size_t self) {
                       const T dy = tp.grad(Var{self})[0];
                       for (std::size_t i = 0; i < scalars.size(); ++i) {
                         if (tp.requires_grad(scalars[i])) tp.grad(scalars[i])[0] += w[i] * dy;
                       }
                     });
}

#define ROADAPT_INSTANTIATE_OPS(T)                                              \
  template Var Linear<T>(Tape<T>&, Var, Var, Var);                              \
  template Var DepthwiseConv1d<T>(Tape<T>&, Var, Var, Var);                     \
  template Var LayerNorm<T>(Tape<T>&, Var, Var, Var, T);                        \
  template Var Gelu<T>(Tape<T>&, Var);                                          \
  template Var Add<T>(Tape<T>&, Var, Var);                                      \
  template Var Mul<T>(Tape<T>&, Var, Var);                                      \
  template Var MulRowMask<T>(Tape<T>&, Var, std::span<const T>);                \
  template Var Embedding<T>(Tape<T>&, std::span<const std::int32_t>, Var);      \
  template Var ConcatColumns<T>(Tape<T>&, const std::vector<Var>&);             \
  template Var Sum<T>(Tape<T>&, Var);                                           \
  template Var Mse<T>(Tape<T>&, Var, Var);                                      \
  template Var WeightedSum<T>(Tape<T>&, const std::vector<Var>&, std::span<const T>);

ROADAPT_INSTANTIATE_OPS(float)
ROADAPT_INSTANTIATE_OPS(double)
#undef ROADAPT_INSTANTIATE_OPS

}  // namespace roadapt::nn
