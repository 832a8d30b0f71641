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

#ifndef ROADAPT_TRAIN_OPTIMIZER_H_
#define ROADAPT_TRAIN_OPTIMIZER_H_

#include <cmath>
#include <cstddef>
#include <vector>

#include "roadapt/error.h"
#include "roadapt/nn/parameter.h"

namespace roadapt::train {

struct AdamWOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;
};

// Adaptive moments with decoupled weight decay. Holds the parameters it
// updates; constructing it over a frozen parameter is an error, and Step()
// re-checks the flag before every write.
template <typename T>
class AdamW {
 public:
  AdamW(std::vector<nn::Parameter<T>*> params, AdamWOptions options)
      : params_(std::move(params)), options_(options) {
    for (auto* p : params_) {
      if (!p->trainable()) {
        throw Error("AdamW: parameter '" + p->name() + "' is frozen");
      }
      m_.emplace_back(p->value().size(), 0.0);
      v_.emplace_back(p->value().size(), 0.0);
    }
  }

  void Step(double lr) {
    ++step_;
    const double c1 = 1.0 - std::pow(options_.beta1, static_cast<double>(step_));
    const double c2 = 1.0 - std::pow(options_.beta2, static_cast<double>(step_));
    for (std::size_t k = 0; k < params_.size(); ++k) {
      nn::Parameter<T>& p = *params_[k];
      if (!p.trainable()) throw Error("AdamW: refusing to update frozen '" + p.name() + "'");
      auto w = p.mutable_value().values();
      const auto g = p.grad().values();
      for (std::size_t i = 0; i < w.size(); ++i) {
        const double gi = static_cast<double>(g[i]);
        m_[k][i] = options_.beta1 * m_[k][i] + (1.0 - options_.beta1) * gi;
        v_[k][i] = options_.beta2 * v_[k][i] + (1.0 - options_.beta2) * gi * gi;
        const double update = (m_[k][i] / c1) / (std::sqrt(v_[k][i] / c2) + options_.eps);
        double wi = static_cast<double>(w[i]);
        wi -= lr * (update + options_.weight_decay * wi);
        w[i] = static_cast<T>(wi);
      }
    }
  }

  void ZeroGrad() {
    for (auto* p : params_) p->ZeroGrad();
  }

  std::size_t steps() const { return step_; }

 private:
  std::vector<nn::Parameter<T>*> params_;
  AdamWOptions options_;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
  std::size_t step_ = 0;
};

}  // namespace roadapt::train

#endif  // ROADAPT_TRAIN_OPTIMIZER_H_
