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

#include "roadapt/model/backbone.h"

#include <openssl/evp.h>

#include <cmath>
#include <cstring>
#include <memory>

#include "roadapt/error.h"
#include "roadapt/nn/ops.h"

namespace roadapt::model {

void BackboneConfig::Validate() const {
  if (vocab_size == 0) throw ConfigError("backbone: vocab_size must be positive");
  if (text_dim == 0 || mel_dim == 0 || model_dim == 0) {
    throw ConfigError("backbone: dimensions must be positive");
  }
  if (time_dim % 2 != 0) throw ConfigError("backbone: time_dim must be even");
  if (kernel_size % 2 == 0) throw ConfigError("backbone: kernel_size must be odd");
  if (expansion == 0) throw ConfigError("backbone: expansion must be positive");
}

nlohmann::json BackboneConfig::ToJson() const {
  return {{"vocab_size", vocab_size}, {"text_dim", text_dim},
          {"mel_dim", mel_dim},       {"time_dim", time_dim},
          {"model_dim", model_dim},   {"n_blocks", n_blocks},
          {"kernel_size", kernel_size}, {"expansion", expansion},
          {"seed", seed},             {"embedding_std", embedding_std},
          {"skip_gain", skip_gain}};
}

BackboneConfig BackboneConfig::FromJson(const nlohmann::json& j) {
  BackboneConfig c;
  c.vocab_size = j.value("vocab_size", c.vocab_size);
  c.text_dim = j.value("text_dim", c.text_dim);
  c.mel_dim = j.value("mel_dim", c.mel_dim);
  c.time_dim = j.value("time_dim", c.time_dim);
  c.model_dim = j.value("model_dim", c.model_dim);
  c.n_blocks = j.value("n_blocks", c.n_blocks);
  c.kernel_size = j.value("kernel_size", c.kernel_size);
  c.expansion = j.value("expansion", c.expansion);
  c.seed = j.value("seed", c.seed);
  c.embedding_std = j.value("embedding_std", c.embedding_std);
  c.skip_gain = j.value("skip_gain", c.skip_gain);
  return c;
}

template <typename T>
std::vector<T> TimeFeatures(T t, std::size_t dim) {
  std::vector<T> out(dim);
  const std::size_t half = dim / 2;
  for (std::size_t i = 0; i < half; ++i) {
    const double freq = std::exp(-std::log(10000.0) * static_cast<double>(i) /
                                 static_cast<double>(half));
    const double arg = 1000.0 * static_cast<double>(t) * freq;
    out[i] = static_cast<T>(std::sin(arg));
    out[half + i] = static_cast<T>(std::cos(arg));
  }
  return out;
}

template <typename T>
FrozenBackbone<T>::FrozenBackbone(const BackboneConfig& config) : config_(config) {
  config_.Validate();
  Rng rng(config_.seed);
  const std::size_t in_dim = config_.mel_dim + config_.text_dim + config_.time_dim;
  const std::size_t m = config_.model_dim;
  text_embedding_ = nn::Parameter<T>(
      "text_embedding",
      NormalTensor<T>({config_.vocab_size, config_.text_dim}, config_.embedding_std, rng), false);
  in_proj_w_ = nn::Parameter<T>(
      "input_proj.weight", NormalTensor<T>({in_dim, m}, 1.0 / std::sqrt(double(in_dim)), rng),
      false);
  in_proj_b_ = nn::Parameter<T>("input_proj.bias", nn::Tensor<T>({m}), false);
  BlockInit init{1.0 / std::sqrt(double(config_.kernel_size)), 1.0 / std::sqrt(double(m)),
                 1.0 / std::sqrt(double(m * config_.expansion))};
  for (std::size_t b = 0; b < config_.n_blocks; ++b) {
    blocks_.push_back(ConvNeXtBlock<T>::Create("mixer." + std::to_string(b) + ".", m,
                                               config_.kernel_size, config_.expansion, false,
                                               init, rng));
  }
  head_w_ = nn::Parameter<T>(
      "head.weight", NormalTensor<T>({m, config_.mel_dim}, 1.0 / std::sqrt(double(m)), rng),
      false);
  head_b_ = nn::Parameter<T>("head.bias", nn::Tensor<T>({config_.mel_dim}), false);
  skip_ = nn::Parameter<T>(
      "skip", nn::Tensor<T>::Full({config_.mel_dim}, static_cast<T>(config_.skip_gain)), false);
}

template <typename T>
nn::Var FrozenBackbone<T>::EmbedFrozen(nn::Tape<T>& tape, const text::TextSequence& seq,
                                       const text::LanguageMask& mask) const {
  if (mask.size() != seq.size()) {
    throw DimensionError("EmbedFrozen", "mask length", seq.size(), mask.size());
  }
  nn::Var rows =
      nn::Embedding(tape, std::span<const std::int32_t>(seq.ids), tape.Param(text_embedding_));
  const std::vector<T> keep = mask.template Weights<T>(text::Language::kEnglish);
  return nn::MulRowMask(tape, rows, std::span<const T>(keep));
}

template <typename T>
nn::Tensor<T> FrozenBackbone<T>::EmbedFrozen(const text::TextSequence& seq,
                                             const text::LanguageMask& mask) const {
  nn::Tape<T> tape;
  return tape.value(EmbedFrozen(tape, seq, mask));
}

template <typename T>
nn::Var FrozenBackbone<T>::PredictVelocity(nn::Tape<T>& tape, nn::Var xt, T t,
                                           nn::Var h_text) const {
  if (!(t >= T(0) && t <= T(1))) {
    throw ValidationError("PredictVelocity: t = " + std::to_string(double(t)) +
                          " is outside [0, 1]");
  }
  const nn::Tensor<T>& x = tape.value(xt);
  const nn::Tensor<T>& h = tape.value(h_text);
  nn::CheckRank("PredictVelocity", x, 2);
  nn::CheckRank("PredictVelocity", h, 2);
  nn::CheckDim("PredictVelocity", "mel channels", config_.mel_dim, x.cols());
  nn::CheckDim("PredictVelocity", "text channels", config_.text_dim, h.cols());
  nn::CheckDim("PredictVelocity", "frames", x.rows(), h.rows());
  const std::size_t frames = x.rows();

  const std::vector<T> feats = TimeFeatures(t, config_.time_dim);
  nn::Tensor<T> time_rows({frames, config_.time_dim});
  nn::Tensor<T> skip_rows({frames, config_.mel_dim});
  for (std::size_t r = 0; r < frames; ++r) {
    std::copy(feats.begin(), feats.end(), time_rows.row(r).begin());
    std::copy(skip_.value().values().begin(), skip_.value().values().end(),
              skip_rows.row(r).begin());
  }
  nn::Var in = nn::ConcatColumns(tape, {xt, h_text, tape.Constant(std::move(time_rows))});
  nn::Var z = nn::Linear(tape, in, tape.Param(in_proj_w_), tape.Param(in_proj_b_));
  for (const auto& block : blocks_) z = block.Apply(tape, z);
  nn::Var v = nn::Linear(tape, z, tape.Param(head_w_), tape.Param(head_b_));
  return nn::Add(tape, v, nn::Mul(tape, xt, tape.Constant(std::move(skip_rows))));
}

template <typename T>
nn::Tensor<T> FrozenBackbone<T>::PredictVelocity(const nn::Tensor<T>& xt, T t,
                                                 const nn::Tensor<T>& h_text) const {
  nn::Tape<T> tape;
  return tape.value(PredictVelocity(tape, tape.Constant(xt), t, tape.Constant(h_text)));
}

template <typename T>
nn::Tensor<T> FrozenBackbone<T>::Sample(const nn::Tensor<T>& h_text, std::size_t n_frames,
                                        std::size_t n_steps, std::uint64_t seed) const {
  if (n_steps == 0) throw ValidationError("Sample: n_steps must be at least 1");
  nn::CheckRank("Sample", h_text, 2);
  nn::CheckDim("Sample", "frames", n_frames, h_text.rows());
  Rng rng(seed);
  nn::Tensor<T> x = NormalTensor<T>({n_frames, config_.mel_dim}, 1.0, rng);
  const T dt = T(1) / static_cast<T>(n_steps);
  for (std::size_t k = 0; k < n_steps; ++k) {
    const T t = static_cast<T>(k) * dt;
    const nn::Tensor<T> v = PredictVelocity(x, t, h_text);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += dt * v[i];
  }
  return x;
}

template <typename T>
std::vector<const nn::Parameter<T>*> FrozenBackbone<T>::parameters() const {
  std::vector<const nn::Parameter<T>*> out{&text_embedding_, &in_proj_w_, &in_proj_b_};
  for (const auto& b : blocks_) {
    for (const auto* p : b.parameters()) out.push_back(p);
  }
  out.push_back(&head_w_);
  out.push_back(&head_b_);
  out.push_back(&skip_);
  return out;
}

template <typename T>
std::vector<nn::Parameter<T>*> FrozenBackbone<T>::mutable_parameters() {
  std::vector<nn::Parameter<T>*> out{&text_embedding_, &in_proj_w_, &in_proj_b_};
  for (auto& b : blocks_) {
    for (auto* p : b.parameters()) out.push_back(p);
  }
  out.push_back(&head_w_);
  out.push_back(&head_b_);
  out.push_back(&skip_);
  return out;
}

template <typename T>
std::size_t FrozenBackbone<T>::NumParameters() const {
  std::size_t n = 0;
  for (const auto* p : parameters()) n += p->value().size();
  return n;
}

template <typename T>
std::string FrozenBackbone<T>::ContentHash() const {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                               &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw Error("ContentHash: cannot initialise SHA-256");
  }
  for (const auto* p : parameters()) {
    EVP_DigestUpdate(ctx.get(), p->name().data(), p->name().size());
    for (std::size_t d : p->value().shape()) {
      const std::uint64_t dim = d;
      EVP_DigestUpdate(ctx.get(), &dim, sizeof(dim));
    }
    EVP_DigestUpdate(ctx.get(), p->value().data(), p->value().size() * sizeof(T));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  static const char* kHex = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex.push_back(kHex[digest[i] >> 4]);
    hex.push_back(kHex[digest[i] & 0xF]);
  }
  return hex;
}

template <typename T>
void FrozenBackbone<T>::LoadValues(
    const std::vector<std::pair<std::string, nn::Tensor<T>>>& values) {
  auto params = mutable_parameters();
  if (values.size() != params.size()) {
    throw DimensionError("FrozenBackbone::LoadValues", "parameter count", params.size(),
                         values.size());
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (values[i].first != params[i]->name()) {
      throw ValidationError("backbone parameter " + std::to_string(i) + " is '" +
                            values[i].first + "', expected '" + params[i]->name() + "'");
    }
    if (values[i].second.shape() != params[i]->value().shape()) {
      throw ValidationError("backbone parameter '" + params[i]->name() + "' has shape " +
                            nn::ShapeToString(values[i].second.shape()) + ", expected " +
                            nn::ShapeToString(params[i]->value().shape()));
    }
    params[i]->mutable_value() = values[i].second;
  }
}

template <typename T>
nn::Tensor<T> FlowState<T>::Interpolate() const {
  nn::Tensor<T> xt(x1.shape());
  for (std::size_t i = 0; i < xt.size(); ++i) xt[i] = (T(1) - t) * x0[i] + t * x1[i];
  return xt;
}

template <typename T>
nn::Tensor<T> FlowState<T>::TargetVelocity() const {
  nn::Tensor<T> u(x1.shape());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = x1[i] - x0[i];
  return u;
}

template <typename T>
FlowState<T> DrawFlowState(const nn::Tensor<T>& x1, Rng& rng) {
  FlowState<T> s;
  s.x0 = NormalTensor<T>(x1.shape(), 1.0, rng);
  s.x1 = x1;
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  s.t = static_cast<T>(uniform(rng));
  return s;
}

template <typename T>
nn::Var CfmLoss(nn::Tape<T>& tape, std::span<const FlowState<T>> states,
                std::span<const nn::Var> h_text, const VelocityFn<T>& velocity) {
  if (states.empty()) throw ValidationError("CfmLoss: empty batch");
  nn::CheckDim("CfmLoss", "batch", states.size(), h_text.size());
  std::size_t total = 0;
  for (const auto& s : states) total += s.x1.size();
  std::vector<nn::Var> terms;
  std::vector<T> weights;
  for (std::size_t i = 0; i < states.size(); ++i) {
    nn::Var xt = tape.Constant(states[i].Interpolate());
    nn::Var v = velocity(tape, xt, states[i].t, h_text[i]);
    terms.push_back(nn::Mse(tape, v, tape.Constant(states[i].TargetVelocity())));
    weights.push_back(static_cast<T>(states[i].x1.size()) / static_cast<T>(total));
  }
  return nn::WeightedSum(tape, terms, std::span<const T>(weights));
}

template <typename T>
nn::Var CfmLoss(nn::Tape<T>& tape, std::span<const FlowState<T>> states,
                std::span<const nn::Var> h_text, const FrozenBackbone<T>& backbone) {
  return CfmLoss<T>(tape, states, h_text,
                    [&backbone](nn::Tape<T>& tp, nn::Var xt, T t, nn::Var h) {
                      return backbone.PredictVelocity(tp, xt, t, h);
                    });
}

#define ROADAPT_INSTANTIATE_BACKBONE(T)                                          \
  template class FrozenBackbone<T>;                                              \
  template struct FlowState<T>;                                                  \
  template std::vector<T> TimeFeatures<T>(T, std::size_t);                       \
  template FlowState<T> DrawFlowState<T>(const nn::Tensor<T>&, Rng&);            \
  template nn::Var CfmLoss<T>(nn::Tape<T>&, std::span<const FlowState<T>>,       \
                              std::span<const nn::Var>, const VelocityFn<T>&);   \
  template nn::Var CfmLoss<T>(nn::Tape<T>&, std::span<const FlowState<T>>,       \
                              std::span<const nn::Var>, const FrozenBackbone<T>&);

ROADAPT_INSTANTIATE_BACKBONE(float)
ROADAPT_INSTANTIATE_BACKBONE(double)
#undef ROADAPT_INSTANTIATE_BACKBONE

}  // namespace roadapt::model
