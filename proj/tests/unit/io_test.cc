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

#include <cstring>
#include <filesystem>
#include <fstream>

#include "gtest/gtest.h"
#include "roadapt/error.h"
#include "roadapt/io.h"
#include "test_util.h"

namespace roadapt::io {
namespace {

using roadapt::testing::RandomTensor;
using roadapt::testing::TempDir;

bool SameBits(const nn::Tensor<float>& a, const nn::Tensor<float>& b) {
  return a.shape() == b.shape() &&
         std::memcmp(a.values().data(), b.values().data(), a.size() * sizeof(float)) == 0;
}

TEST(MelIoTest, RoundTripIsBitwise) {
  TempDir dir;
  const auto mel = RandomTensor<float>({7, 5}, 1);
  WriteMel(dir / "x.mel", mel);
  EXPECT_TRUE(SameBits(ReadMel(dir / "x.mel"), mel));
  EXPECT_EQ(std::filesystem::file_size(dir / "x.mel"), 7u * 5u * 4u);
  const auto meta = ReadJson(MelSidecarPath(dir / "x.mel"));
  EXPECT_EQ(meta.at("frames"), 7);
  EXPECT_EQ(meta.at("channels"), 5);
}

TEST(MelIoTest, SidecarMismatchIsAnIoError) {
  TempDir dir;
  WriteMel(dir / "x.mel", RandomTensor<float>({3, 2}, 1));
  WriteJson(MelSidecarPath(dir / "x.mel"), {{"frames", 4}, {"channels", 2}});
  EXPECT_THROW(ReadMel(dir / "x.mel"), IoError);
  std::filesystem::remove(MelSidecarPath(dir / "x.mel"));
  EXPECT_THROW(ReadMel(dir / "x.mel"), IoError);
}

TEST(MelIoTest, RejectsNonMatrix) {
  TempDir dir;
  EXPECT_THROW(WriteMel(dir / "x.mel", RandomTensor<float>({3}, 1)), DimensionError);
}

TEST(TensorDumpTest, RoundTripKeepsShape) {
  TempDir dir;
  for (const nn::Shape& shape : {nn::Shape{4}, nn::Shape{2, 3}, nn::Shape{2, 1, 3}}) {
    const auto t = RandomTensor<float>(shape, 2);
    WriteTensorDump(dir / "t.bin", t);
    EXPECT_TRUE(SameBits(ReadTensorDump(dir / "t.bin"), t));
  }
}

TEST(TensorDumpTest, TruncationIsDetected) {
  TempDir dir;
  WriteTensorDump(dir / "t.bin", RandomTensor<float>({4, 4}, 3));
  std::filesystem::resize_file(dir / "t.bin", std::filesystem::file_size(dir / "t.bin") - 2);
  EXPECT_THROW(ReadTensorDump(dir / "t.bin"), IoError);
}

TEST(BlobsTest, RoundTripPreservesOrderAndNames) {
  TempDir dir;
  const std::vector<NamedTensor> blobs = {{"b.weight", RandomTensor<float>({3, 2}, 4)},
                                          {"a", RandomTensor<float>({5}, 5)},
                                          {"", RandomTensor<float>({1, 1}, 6)}};
  WriteBlobs(dir / "m.bin", blobs);
  const auto back = ReadBlobs(dir / "m.bin");
  ASSERT_EQ(back.size(), blobs.size());
  for (std::size_t i = 0; i < blobs.size(); ++i) {
    EXPECT_EQ(back[i].first, blobs[i].first);
    EXPECT_TRUE(SameBits(back[i].second, blobs[i].second));
  }
  WriteBlobs(dir / "empty.bin", {});
  EXPECT_TRUE(ReadBlobs(dir / "empty.bin").empty());
}

TEST(BlobsTest, TruncationIsDetected) {
  TempDir dir;
  WriteBlobs(dir / "m.bin", {{"w", RandomTensor<float>({8}, 1)}});
  std::filesystem::resize_file(dir / "m.bin", 10);
  EXPECT_THROW(ReadBlobs(dir / "m.bin"), IoError);
}

TEST(JsonIoTest, ErrorsAreTyped) {
  TempDir dir;
  EXPECT_THROW(ReadJson(dir / "missing.json"), IoError);
  std::ofstream(dir / "bad.json") << "{not json";
  EXPECT_THROW(ReadJson(dir / "bad.json"), ValidationError);
  EXPECT_THROW(ReadText(dir / "missing.txt"), IoError);
}

}  // namespace
}  // namespace roadapt::io
