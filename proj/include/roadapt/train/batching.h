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

#ifndef ROADAPT_TRAIN_BATCHING_H_
#define ROADAPT_TRAIN_BATCHING_H_

#include <cstddef>
#include <cstdint>
#include <vector>

namespace roadapt::train {

struct Batch {
  std::vector<std::size_t> indices;  // into the manifest
  std::size_t frames = 0;
};

// One epoch of batches: a seeded shuffle of all samples, packed greedily so
// that each batch holds at most `max_samples` samples and at most
// `frame_budget` frames in total. Every sample appears exactly once. Throws
// ValidationError naming the first sample that exceeds the budget alone.
std::vector<Batch> BatchByFrames(const std::vector<std::size_t>& frame_counts,
                                 std::size_t frame_budget, std::size_t max_samples,
                                 std::uint64_t seed);

}  // namespace roadapt::train

#endif  // ROADAPT_TRAIN_BATCHING_H_
