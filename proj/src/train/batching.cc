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

#include "roadapt/train/batching.h"

#include <algorithm>
#include <numeric>
#include <random>
#include <string>

#include "roadapt/error.h"

namespace roadapt::train {

std::vector<Batch> BatchByFrames(const std::vector<std::size_t>& frame_counts,
                                 std::size_t frame_budget, std::size_t max_samples,
                                 std::uint64_t seed) {
  if (max_samples == 0) throw ValidationError("max_samples must be at least 1");
  for (std::size_t i = 0; i < frame_counts.size(); ++i) {
    if (frame_counts[i] > frame_budget) {
      throw ValidationError("sample " + std::to_string(i) + " has " +
                            std::to_string(frame_counts[i]) +
                            " frames, more than the batch budget of " +
                            std::to_string(frame_budget));
    }
  }
  std::vector<std::size_t> order(frame_counts.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<Batch> batches;
  Batch current;
  for (std::size_t idx : order) {
    const bool full = current.indices.size() == max_samples ||
                      current.frames + frame_counts[idx] > frame_budget;
    if (full && !current.indices.empty()) {
      batches.push_back(std::move(current));
      current = Batch{};
    }
    current.indices.push_back(idx);
    current.frames += frame_counts[idx];
  }
  if (!current.indices.empty()) batches.push_back(std::move(current));
  return batches;
}

}  // namespace roadapt::train
