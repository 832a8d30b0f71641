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

#ifndef ROADAPT_NN_PARAMETER_H_
#define ROADAPT_NN_PARAMETER_H_

#include <string>
#include <utility>

#include "roadapt/nn/tensor.h"

namespace roadapt::nn {

// A named tensor owned by a model. Frozen parameters (trainable() == false)
// are never handed to an optimizer.
template <typename T>
class Parameter {
 public:
  Parameter() = default;
  Parameter(std::string name, Tensor<T> value, bool trainable)
      : name_(std::move(name)),
        value_(std::move(value)),
        grad_(value_.shape()),
        trainable_(trainable) {}

  const std::string& name() const { return name_; }
  const Tensor<T>& value() const { return value_; }
  Tensor<T>& mutable_value() { return value_; }
  const Tensor<T>& grad() const { return grad_; }
  Tensor<T>& mutable_grad() { return grad_; }
  bool trainable() const { return trainable_; }

  void ZeroGrad() { grad_.Fill(T(0)); }

 private:
  std::string name_;
  Tensor<T> value_;
  Tensor<T> grad_;
  bool trainable_ = false;
};

}  // namespace roadapt::nn

#endif  // ROADAPT_NN_PARAMETER_H_
