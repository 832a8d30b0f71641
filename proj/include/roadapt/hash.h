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

#ifndef ROADAPT_HASH_H_
#define ROADAPT_HASH_H_

#include <cstdint>
#include <string>
#include <string_view>

namespace roadapt {

// Lower-case hex SHA-256 of `bytes`.
std::string Sha256Hex(std::string_view bytes);

// First eight digest bytes of SHA-256(bytes), little-endian.
std::uint64_t Sha256Seed(std::string_view bytes);

}  // namespace roadapt

#endif  // ROADAPT_HASH_H_
