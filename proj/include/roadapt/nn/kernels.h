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

// Numerical kernels behind the differentiable primitives.
//
// Every kernel exists twice: `serial` is the plain reference loop nest and
// `parallel` distributes independent outputs over OpenMP threads. Each output
// element is reduced in the same order by both, so the two agree bitwise and
// results never depend on the thread count. The unqualified entry points in
// `kernels` dispatch on the configured thread count.
//
// Layouts are row-major. Backward kernels accumulate (+=) into gradient
// buffers; a null gradient pointer skips that output.

#ifndef ROADAPT_NN_KERNELS_H_
#define ROADAPT_NN_KERNELS_H_

#include <cstddef>
#include <cstdint>

namespace roadapt::nn::kernels {

// Thread count used by the dispatching entry points. 1 selects the serial
// reference kernels.
void SetNumThreads(int n);
int NumThreads();

#define ROADAPT_KERNEL_DECLS                                                   \
  /* y[r,o] = b[o] + sum_i x[r,i] w[i,o]; b may be null. */                    \
  template <typename T>                                                        \
  void LinearForward(const T* x, const T* w, const T* b, T* y,                 \
                     std::size_t rows, std::size_t in, std::size_t out);       \
  template <typename T>                                                        \
  void LinearBackward(const T* x, const T* w, const T* dy, T* dx, T* dw,       \
                      T* db, std::size_t rows, std::size_t in,                 \
                      std::size_t out);                                        \
  /* Same-padded depthwise convolution, kernel laid out [channel][tap]. */     \
  template <typename T>                                                        \
  void DepthwiseConvForward(const T* x, const T* k, const T* b, T* y,          \
                            std::size_t rows, std::size_t ch,                  \
                            std::size_t taps);                                 \
  template <typename T>                                                        \
  void DepthwiseConvBackward(const T* x, const T* k, const T* dy, T* dx,       \
                             T* dk, T* db, std::size_t rows, std::size_t ch,   \
                             std::size_t taps);                                \
  /* Normalizes each row over channels; writes per-row mean and 1/stddev. */   \
  template <typename T>                                                        \
  void LayerNormForward(const T* x, const T* gain, const T* shift, T* y,       \
                        T* mean, T* rstd, std::size_t rows, std::size_t ch,    \
                        T eps);                                                \
  template <typename T>                                                        \
  void LayerNormBackward(const T* x, const T* gain, const T* mean,             \
                         const T* rstd, const T* dy, T* dx, T* dgain,          \
                         T* dshift, std::size_t rows, std::size_t ch);         \
  template <typename T>                                                        \
  void GeluForward(const T* x, T* y, std::size_t n);                           \
  template <typename T>                                                        \
  void GeluBackward(const T* x, const T* dy, T* dx, std::size_t n);            \
  template <typename T>                                                        \
  void EmbeddingForward(const std::int32_t* ids, const T* table, T* y,         \
                        std::size_t rows, std::size_t dim);                    \
  /* Scatter-add of dy rows into the table gradient. */                        \
  template <typename T>                                                        \
  void EmbeddingBackward(const std::int32_t* ids, const T* dy, T* dtable,      \
                         std::size_t rows, std::size_t dim);

namespace serial {
ROADAPT_KERNEL_DECLS
}  // namespace serial

namespace parallel {
ROADAPT_KERNEL_DECLS
}  // namespace parallel

ROADAPT_KERNEL_DECLS

#undef ROADAPT_KERNEL_DECLS

}  // namespace roadapt::nn::kernels

#endif  // ROADAPT_NN_KERNELS_H_
