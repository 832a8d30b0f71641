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

// OpenMP kernels. Work is split over independent outputs only (rows or
// channels); every reduction runs in the same order as the serial kernel.

#include <omp.h>

#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>

#include "roadapt/nn/kernels.h"
#include "kernel_math.h"

namespace roadapt::nn::kernels {

namespace {
std::atomic<int> g_num_threads{0};

// Below this many multiply-adds a team costs more than it saves.
constexpr std::size_t kMinParallelWork = 4096;
}  // namespace

void SetNumThreads(int n) { g_num_threads.store(n < 1 ? 1 : n); }

int NumThreads() {
  const int n = g_num_threads.load();
  return n > 0 ? n : omp_get_max_threads();
}

namespace parallel {

template <typename T>
void LinearForward(const T* x, const T* w, const T* b, T* y, std::size_t rows,
                   std::size_t in, std::size_t out) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(rows);
#pragma omp parallel for schedule(static) num_threads(NumThreads()) \
    if (rows * in * out >= kMinParallelWork)
  for (std::ptrdiff_t r = 0; r < n; ++r) {
    T* yr = y + r * out;
    for (std::size_t o = 0; o < out; ++o) yr[o] = b ? b[o] : T(0);
    for (std::size_t i = 0; i < in; ++i) {
      const T xi = x[r * in + i];
      const T* wi = w + i * out;
      for (std::size_t o = 0; o < out; ++o) yr[o] += xi * wi[o];
    }
  }
}

template <typename T>
void LinearBackward(const T* x, const T* w, const T* dy, T* dx, T* dw, T* db,
                    std::size_t rows, std::size_t in, std::size_t out) {
  const bool big = rows * in * out >= kMinParallelWork;
  const int threads = NumThreads();
  if (dx) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(rows);
#pragma omp parallel for schedule(static) num_threads(threads) if (big)
    for (std::ptrdiff_t r = 0; r < n; ++r) {
      for (std::size_t i = 0; i < in; ++i) {
        T acc = 0;
        for (std::size_t o = 0; o < out; ++o) acc += dy[r * out + o] * w[i * out + o];
        dx[r * in + i] += acc;
      }
    }
  }
  if (dw) {
    const std::ptrdiff_t n_in = static_cast<std::ptrdiff_t>(in);
#pragma omp parallel for schedule(static) num_threads(threads) if (big)
    for (std::ptrdiff_t i = 0; i < n_in; ++i) {
      for (std::size_t r = 0; r < rows; ++r) {
        const T xi = x[r * in + i];
        for (std::size_t o = 0; o < out; ++o) dw[i * out + o] += xi * dy[r * out + o];
      }
    }
  }
  if (db) {
    const std::ptrdiff_t n_out = static_cast<std::ptrdiff_t>(out);
#pragma omp parallel for schedule(static) num_threads(threads) if (big)
    for (std::ptrdiff_t o = 0; o < n_out; ++o) {
      T acc = 0;
      for (std::size_t r = 0; r < rows; ++r) acc += dy[r * out + o];
      db[o] += acc;
    }
  }
}

template <typename T>
void DepthwiseConvForward(const T* x, const T* k, const T* b, T* y,
                          std::size_t rows, std::size_t ch, std::size_t taps) {
  const std::ptrdiff_t pad = static_cast<std::ptrdiff_t>(taps - 1) / 2;
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(rows);
#pragma omp parallel for schedule(static) num_threads(NumThreads()) \
    if (rows * ch * taps >= kMinParallelWork)
  for (std::ptrdiff_t t = 0; t < n; ++t) {
    for (std::size_t c = 0; c < ch; ++c) {
      T acc = b ? b[c] : T(0);
      for (std::size_t j = 0; j < taps; ++j) {
        const std::ptrdiff_t s = t + static_cast<std::ptrdiff_t>(j) - pad;
        if (s < 0 || s >= n) continue;
        acc += x[s * ch + c] * k[c * taps + j];
      }
      y[t * ch + c] = acc;
    }
  }
}

template <typename T>
void DepthwiseConvBackward(const T* x, const T* k, const T* dy, T* dx, T* dk,
                           T* db, std::size_t rows, std::size_t ch,
                           std::size_t taps) {
  const std::ptrdiff_t pad = static_cast<std::ptrdiff_t>(taps - 1) / 2;
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(rows);
  const bool big = rows * ch * taps >= kMinParallelWork;
  const int threads = NumThreads();
  if (dx) {
#pragma omp parallel for schedule(static) num_threads(threads) if (big)
    for (std::ptrdiff_t s = 0; s < n; ++s) {
      for (std::size_t c = 0; c < ch; ++c) {
        T acc = 0;
        for (std::size_t j = 0; j < taps; ++j) {
          const std::ptrdiff_t t = s - static_cast<std::ptrdiff_t>(j) + pad;
          if (t < 0 || t >= n) continue;
          acc += dy[t * ch + c] * k[c * taps + j];
        }
        dx[s * ch + c] += acc;
      }
    }
  }
  if (dk || db) {
    const std::ptrdiff_t n_ch = static_cast<std::ptrdiff_t>(ch);
#pragma omp parallel for schedule(static) num_threads(threads) if (big)
    for (std::ptrdiff_t c = 0; c < n_ch; ++c) {
      if (dk) {
        for (std::size_t j = 0; j < taps; ++j) {
          T acc = 0;
          for (std::ptrdiff_t t = 0; t < n; ++t) {
            const std::ptrdiff_t s = t + static_cast<std::ptrdiff_t>(j) - pad;
            if (s < 0 || s >= n) continue;
            acc += dy[t * ch + c] * x[s * ch + c];
          }
          dk[c * taps + j] += acc;
        }
      }
      if (db) {
        T acc = 0;
        for (std::ptrdiff_t t = 0; t < n; ++t) acc += dy[t * ch + c];
        db[c] += acc;
      }
    }
  }
}

template <typename T>
void LayerNormForward(const T* x, const T* gain, const T* shift, T* y, T* mean,
                      T* rstd, std::size_t rows, std::size_t ch, T eps) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(rows);
#pragma omp parallel for schedule(static) num_threads(NumThreads()) \
    if (rows * ch >= kMinParallelWork)
  for (std::ptrdiff_t r = 0; r < n; ++r) {
    const T* xr = x + r * ch;
    T mu = 0;
    for (std::size_t c = 0; c < ch; ++c) mu += xr[c];
    mu /= static_cast<T>(ch);
    T var = 0;
    for (std::size_t c = 0; c < ch; ++c) var += (xr[c] - mu) * (xr[c] - mu);
    var /= static_cast<T>(ch);
    const T inv = T(1) / std::sqrt(var + eps);
    mean[r] = mu;
    rstd[r] = inv;
    for (std::size_t c = 0; c < ch; ++c) {
      y[r * ch + c] = gain[c] * ((xr[c] - mu) * inv) + shift[c];
    }
  }
}

template <typename T>
void LayerNormBackward(const T* x, const T* gain, const T* mean, const T* rstd,
                       const T* dy, T* dx, T* dgain, T* dshift,
                       std::size_t rows, std::size_t ch) {
  const bool big = rows * ch >= kMinParallelWork;
  const int threads = NumThreads();
  if (dx) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(rows);
#pragma omp parallel for schedule(static) num_threads(threads) if (big)
    for (std::ptrdiff_t r = 0; r < n; ++r) {
      const T* xr = x + r * ch;
      const T* dyr = dy + r * ch;
      T mean_g = 0;
      T mean_gx = 0;
      for (std::size_t c = 0; c < ch; ++c) {
        const T xhat = (xr[c] - mean[r]) * rstd[r];
        const T g = dyr[c] * gain[c];
        mean_g += g;
        mean_gx += g * xhat;
      }
      mean_g /= static_cast<T>(ch);
      mean_gx /= static_cast<T>(ch);
      for (std::size_t c = 0; c < ch; ++c) {
        const T xhat = (xr[c] - mean[r]) * rstd[r];
        dx[r * ch + c] += rstd[r] * (dyr[c] * gain[c] - mean_g - xhat * mean_gx);
      }
    }
  }
  const std::ptrdiff_t n_ch = static_cast<std::ptrdiff_t>(ch);
#pragma omp parallel for schedule(static) num_threads(threads) if (big)
  for (std::ptrdiff_t c = 0; c < n_ch; ++c) {
    T acc_g = 0;
    T acc_s = 0;
    for (std::size_t r = 0; r < rows; ++r) {
      const T xhat = (x[r * ch + c] - mean[r]) * rstd[r];
      acc_g += dy[r * ch + c] * xhat;
      acc_s += dy[r * ch + c];
    }
    if (dgain) dgain[c] += acc_g;
    if (dshift) dshift[c] += acc_s;
  }
}

template <typename T>
void GeluForward(const T* x, T* y, std::size_t n) {
  const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static) num_threads(NumThreads()) \
    if (n >= kMinParallelWork)
  for (std::ptrdiff_t i = 0; i < m; ++i) y[i] = internal::Gelu(x[i]);
}

template <typename T>
void GeluBackward(const T* x, const T* dy, T* dx, std::size_t n) {
  const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static) num_threads(NumThreads()) \
    if (n >= kMinParallelWork)
  for (std::ptrdiff_t i = 0; i < m; ++i) dx[i] += dy[i] * internal::GeluGrad(x[i]);
}

template <typename T>
void EmbeddingForward(const std::int32_t* ids, const T* table, T* y,
                      std::size_t rows, std::size_t dim) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(rows);
#pragma omp parallel for schedule(static) num_threads(NumThreads()) \
    if (rows * dim >= kMinParallelWork)
  for (std::ptrdiff_t r = 0; r < n; ++r) {
    const T* src = table + static_cast<std::size_t>(ids[r]) * dim;
    for (std::size_t c = 0; c < dim; ++c) y[r * dim + c] = src[c];
  }
}

template <typename T>
void EmbeddingBackward(const std::int32_t* ids, const T* dy, T* dtable,
                       std::size_t rows, std::size_t dim) {
  // Split over embedding columns: repeated ids never race.
  const std::ptrdiff_t n_dim = static_cast<std::ptrdiff_t>(dim);
#pragma omp parallel for schedule(static) num_threads(NumThreads()) \
    if (rows * dim >= kMinParallelWork)
  for (std::ptrdiff_t c = 0; c < n_dim; ++c) {
    for (std::size_t r = 0; r < rows; ++r) {
      dtable[static_cast<std::size_t>(ids[r]) * dim + c] += dy[r * dim + c];
    }
  }
}

ROADAPT_INSTANTIATE_KERNELS(float)
ROADAPT_INSTANTIATE_KERNELS(double)

}  // namespace parallel

// Dispatch.

template <typename T>
void LinearForward(const T* x, const T* w, const T* b, T* y, std::size_t rows,
                   std::size_t in, std::size_t out) {
  if (NumThreads() == 1) return serial::LinearForward(x, w, b, y, rows, in, out);
  parallel::LinearForward(x, w, b, y, rows, in, out);
}

template <typename T>
void LinearBackward(const T* x, const T* w, const T* dy, T* dx, T* dw, T* db,
                    std::size_t rows, std::size_t in, std::size_t out) {
  if (NumThreads() == 1) {
    return serial::LinearBackward(x, w, dy, dx, dw, db, rows, in, out);
  }
  parallel::LinearBackward(x, w, dy, dx, dw, db, rows, in, out);
}

template <typename T>
void DepthwiseConvForward(const T* x, const T* k, const T* b, T* y,
                          std::size_t rows, std::size_t ch, std::size_t taps) {
  if (NumThreads() == 1) {
    return serial::DepthwiseConvForward(x, k, b, y, rows, ch, taps);
  }
  parallel::DepthwiseConvForward(x, k, b, y, rows, ch, taps);
}

template <typename T>
void DepthwiseConvBackward(const T* x, const T* k, const T* dy, T* dx, T* dk,
                           T* db, std::size_t rows, std::size_t ch,
                           std::size_t taps) {
  if (NumThreads() == 1) {
    return serial::DepthwiseConvBackward(x, k, dy, dx, dk, db, rows, ch, taps);
  }
  parallel::DepthwiseConvBackward(x, k, dy, dx, dk, db, rows, ch, taps);
}

template <typename T>
void LayerNormForward(const T* x, const T* gain, const T* shift, T* y, T* mean,
                      T* rstd, std::size_t rows, std::size_t ch, T eps) {
  if (NumThreads() == 1) {
    return serial::LayerNormForward(x, gain, shift, y, mean, rstd, rows, ch, eps);
  }
  parallel::LayerNormForward(x, gain, shift, y, mean, rstd, rows, ch, eps);
}

template <typename T>
void LayerNormBackward(const T* x, const T* gain, const T* mean, const T* rstd,
                       const T* dy, T* dx, T* dgain, T* dshift,
                       std::size_t rows, std::size_t ch) {
  if (NumThreads() == 1) {
    return serial::LayerNormBackward(x, gain, mean, rstd, dy, dx, dgain, dshift,
                                     rows, ch);
  }
  parallel::LayerNormBackward(x, gain, mean, rstd, dy, dx, dgain, dshift, rows, ch);
}

template <typename T>
void GeluForward(const T* x, T* y, std::size_t n) {
  if (NumThreads() == 1) return serial::GeluForward(x, y, n);
  parallel::GeluForward(x, y, n);
}

template <typename T>
void GeluBackward(const T* x, const T* dy, T* dx, std::size_t n) {
  if (NumThreads() == 1) return serial::GeluBackward(x, dy, dx, n);
  parallel::GeluBackward(x, dy, dx, n);
}

template <typename T>
void EmbeddingForward(const std::int32_t* ids, const T* table, T* y,
                      std::size_t rows, std::size_t dim) {
  if (NumThreads() == 1) return serial::EmbeddingForward(ids, table, y, rows, dim);
  parallel::EmbeddingForward(ids, table, y, rows, dim);
}

template <typename T>
void EmbeddingBackward(const std::int32_t* ids, const T* dy, T* dtable,
                       std::size_t rows, std::size_t dim) {
  if (NumThreads() == 1) return serial::EmbeddingBackward(ids, dy, dtable, rows, dim);
  parallel::EmbeddingBackward(ids, dy, dtable, rows, dim);
}

ROADAPT_INSTANTIATE_KERNELS(float)
ROADAPT_INSTANTIATE_KERNELS(double)

}  // namespace roadapt::nn::kernels
