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

#ifndef ROADAPT_SRC_NN_KERNEL_MATH_H_
#define ROADAPT_SRC_NN_KERNEL_MATH_H_

#include <cmath>
#include <cstddef>
#include <cstdint>

namespace roadapt::nn::kernels::internal {

// tanh approximation of GELU.
template <typename T>
inline T Gelu(T x) {
  const T c = static_cast<T>(0.7978845608028654);  // sqrt(2/pi)
  const T a = static_cast<T>(0.044715);
  return static_cast<T>(0.5) * x * (static_cast<T>(1) + std::tanh(c * (x + a * x * x * x)));
}

template <typename T>
inline T GeluGrad(T x) {
  const T c = static_cast<T>(0.7978845608028654);
  const T a = static_cast<T>(0.044715);
  const T th = std::tanh(c * (x + a * x * x * x));
  const T half = static_cast<T>(0.5);
  return half * (static_cast<T>(1) + th) +
         half * x * (static_cast<T>(1) - th * th) * c *
             (static_cast<T>(1) + static_cast<T>(3) * a * x * x);
}

}  // namespace roadapt::nn::kernels::internal

// Explicit instantiation list shared by the serial and parallel kernel units.
#define ROADAPT_INSTANTIATE_KERNELS(T)                                                 \
  template void LinearForward<T>(const T*, const T*, const T*, T*,             \
                                 std::size_t, std::size_t, std::size_t);       \
  template void LinearBackward<T>(const T*, const T*, const T*, T*, T*, T*,    \
                                  std::size_t, std::size_t, std::size_t);      \
  template void DepthwiseConvForward<T>(const T*, const T*, const T*, T*,      \
                                        std::size_t, std::size_t,              \
                                        std::size_t);                          \
  template void DepthwiseConvBackward<T>(const T*, const T*, const T*, T*,     \
                                         T*, T*, std::size_t, std::size_t,     \
                                         std::size_t);                         \
  template void LayerNormForward<T>(const T*, const T*, const T*, T*, T*, T*,  \
                                    std::size_t, std::size_t, T);              \
  template void LayerNormBackward<T>(const T*, const T*, const T*, const T*,   \
                                     const T*, T*, T*, T*, std::size_t,        \
                                     std::size_t);                             \
  template void GeluForward<T>(const T*, T*, std::size_t);                     \
  template void GeluBackward<T>(const T*, const T*, T*, std::size_t);          \
  template void EmbeddingForward<T>(const std::int32_t*, const T*, T*,         \
                                    std::size_t, std::size_t);                 \
  template void EmbeddingBackward<T>(const std::int32_t*, const T*, T*,        \
                                     std::size_t, std::size_t);

#endif  // ROADAPT_SRC_NN_KERNEL_MATH_H_
