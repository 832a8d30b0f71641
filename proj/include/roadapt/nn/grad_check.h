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

// Finite-difference verification of tape gradients.

#ifndef ROADAPT_NN_GRAD_CHECK_H_
#define ROADAPT_NN_GRAD_CHECK_H_

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>

#include "roadapt/nn/tape.h"
#include "roadapt/nn/tensor.h"

namespace roadapt::nn {

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
  // Set when the analytic or numeric gradient (or a probed loss) was not
  // finite; the check then fails regardless of max_rel_error.
  std::optional<std::size_t> nonfinite_index;

  bool Passed(double tolerance) const {
    return !nonfinite_index && max_rel_error < tolerance;
  }
  std::string Describe() const {
    if (nonfinite_index) {
      return "non-finite value at coordinate " + std::to_string(*nonfinite_index);
    }
    return "max relative error " + std::to_string(max_rel_error) + " at coordinate " +
           std::to_string(worst_index);
  }
};

// max_i |analytic_i - numeric_i| / (|numeric_i| + 1e-8)
template <typename T>
GradCheckResult CompareGradients(std::span<const T> analytic, std::span<const T> numeric) {
  GradCheckResult r;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    const double a = static_cast<double>(analytic[i]);
    const double n = static_cast<double>(numeric[i]);
    if (!std::isfinite(a) || !std::isfinite(n)) {
      r.nonfinite_index = i;
      return r;
    }
    const double err = std::abs(a - n) / (std::abs(n) + 1e-8);
    if (err > r.max_rel_error) {
      r.max_rel_error = err;
      r.worst_index = i;
    }
  }
  return r;
}

// Central differences of a scalar function. Coordinates whose probe yields a
// non-finite value are reported as NaN.
template <typename T>
Tensor<T> NumericGradient(const std::function<T(const Tensor<T>&)>& fn,
                          const Tensor<T>& point, T step) {
  Tensor<T> grad(point.shape());
  Tensor<T> probe = point;
  for (std::size_t i = 0; i < point.size(); ++i) {
    const T orig = probe[i];
    probe[i] = orig + step;
    const T up = fn(probe);
    probe[i] = orig - step;
    const T down = fn(probe);
    probe[i] = orig;
    grad[i] = (up - down) / (T(2) * step);
  }
  return grad;
}

// Checks d fn(x) / dx at `point`, where fn builds a scalar on the tape from
// the leaf it is given.
template <typename T>
GradCheckResult GradCheck(const std::function<Var(Tape<T>&, Var)>& fn,
                          const Tensor<T>& point, T step) {
  Tape<T> tape;
  Var x = tape.Input(point);
  Var y = fn(tape, x);
  tape.Backward(y);
  const Tensor<T> analytic = tape.grad(x);
  const Tensor<T> numeric = NumericGradient<T>(
      [&fn](const Tensor<T>& p) {
        Tape<T> t;
        return t.value(fn(t, t.Constant(p)))[0];
      },
      point, step);
  return CompareGradients<T>(analytic.values(), numeric.values());
}

}  // namespace roadapt::nn

#endif  // ROADAPT_NN_GRAD_CHECK_H_
