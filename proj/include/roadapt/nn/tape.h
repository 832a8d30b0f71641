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

#ifndef ROADAPT_NN_TAPE_H_
#define ROADAPT_NN_TAPE_H_

#include <cstddef>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "roadapt/error.h"
#include "roadapt/nn/parameter.h"
#include "roadapt/nn/tensor.h"

namespace roadapt::nn {

// Handle to a value recorded on a Tape.
struct Var {
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::size_t id = kNone;
  bool valid() const { return id != kNone; }
};

// Records primitives in execution order. Because a node can only consume
// earlier nodes, reverse recording order is a reverse topological order and
// Backward() visits every node once.
//
// A tape is single-threaded. Separate tapes share nothing mutable, so several
// can run concurrently over the same (const) model parameters.
template <typename T>
class Tape {
 public:
  // Propagates this node's gradient into its inputs' gradients.
  using BackwardFn = std::function<void(Tape&, std::size_t self)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Leaf that never receives a gradient.
  Var Constant(Tensor<T> value) { return Push(std::move(value), nullptr, false, {}); }

  // Leaf that receives a gradient (used for checks and probes).
  Var Input(Tensor<T> value) { return Push(std::move(value), nullptr, true, {}); }

  // Leaf aliasing a parameter's storage. The parameter must outlive the tape.
  // Trainable parameters collect gradients; frozen ones pass gradients
  // through to whatever consumes them but keep none themselves.
  Var Param(const Parameter<T>& p) {
    Var v = Push(Tensor<T>(), &p.value(), p.trainable(), {});
    if (p.trainable()) bound_.push_back({v, &p});
    return v;
  }

  // Records a computed node. requires_grad is inherited from the inputs.
  Var Record(Tensor<T> value, const std::vector<Var>& inputs, BackwardFn fn) {
    bool needs = false;
    for (Var in : inputs) needs = needs || nodes_.at(in.id).requires_grad;
    return Push(std::move(value), nullptr, needs, needs ? std::move(fn) : BackwardFn{});
  }

  const Tensor<T>& value(Var v) const {
    const Node& n = nodes_.at(v.id);
    return n.ref ? *n.ref : n.value;
  }

  bool requires_grad(Var v) const { return nodes_.at(v.id).requires_grad; }

  // Gradient buffer of `v`, zero-filled on first access.
  Tensor<T>& grad(Var v) {
    Node& n = nodes_.at(v.id);
    if (!n.has_grad) {
      n.grad = Tensor<T>(value(v).shape());
      n.has_grad = true;
    }
    return n.grad;
  }

  bool has_grad(Var v) const { return nodes_.at(v.id).has_grad; }

  void Backward(Var loss) {
    if (value(loss).size() != 1) {
      throw DimensionError("Backward", "elements", 1, value(loss).size());
    }
    grad(loss)[0] += T(1);
    for (std::size_t i = loss.id + 1; i-- > 0;) {
      Node& n = nodes_[i];
      if (n.requires_grad && n.has_grad && n.backward) n.backward(*this, i);
    }
  }

  struct Binding {
    Var var;
    const Parameter<T>* param;
  };
  // Trainable parameters referenced by this tape, in binding order.
  const std::vector<Binding>& bindings() const { return bound_; }

  // Adds this tape's parameter gradients into `grads`, looked up by the
  // parameter address. Parameters absent from the tape are skipped.
  template <typename GradLookup>
  void AccumulateParamGrads(GradLookup&& grad_for) {
    for (const Binding& b : bound_) {
      if (!has_grad(b.var)) continue;
      Tensor<T>& dst = grad_for(*b.param);
      const Tensor<T>& src = nodes_[b.var.id].grad;
      for (std::size_t i = 0; i < src.size(); ++i) dst[i] += src[i];
    }
  }

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor<T> value;
    const Tensor<T>* ref = nullptr;
    Tensor<T> grad;
    bool has_grad = false;
    bool requires_grad = false;
    BackwardFn backward;
  };

  Var Push(Tensor<T> value, const Tensor<T>* ref, bool requires_grad, BackwardFn fn) {
    Node n;
    n.value = std::move(value);
    n.ref = ref;
    n.requires_grad = requires_grad;
    n.backward = std::move(fn);
    nodes_.push_back(std::move(n));
    return Var{nodes_.size() - 1};
  }

  std::vector<Node> nodes_;
  std::vector<Binding> bound_;
};

// Adds the tape's gradients into the grad buffers of `params`. Every
// trainable parameter bound on the tape must appear in `params`.
template <typename T>
void AccumulateIntoParams(Tape<T>& tape, const std::vector<Parameter<T>*>& params) {
  tape.AccumulateParamGrads([&](const Parameter<T>& p) -> Tensor<T>& {
    for (Parameter<T>* q : params) {
      if (q == &p) return q->mutable_grad();
    }
    throw Error("AccumulateIntoParams: parameter '" + p.name() +
                "' is bound on the tape but was not supplied");
  });
}

}  // namespace roadapt::nn

#endif  // ROADAPT_NN_TAPE_H_
