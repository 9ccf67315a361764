// Copyright 2026 The avlab Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <map>
#include <string>
#include <vector>

#include "avlab/model/arch.hpp"
#include "avlab/model/params.hpp"

namespace avlab::model {

// AVCK container: magic, u32 version, key=value header block, named f32
// tensors, trailing CRC32 over everything before it.
inline constexpr uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  ArchConfig arch;
  std::map<std::string, std::string> meta;  // training metadata, stored next to arch.* keys
  ParamStore params;
};

std::vector<unsigned char> encode_checkpoint(const Checkpoint& ckpt);
Checkpoint decode_checkpoint(const std::vector<unsigned char>& bytes, const std::string& what);

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace avlab::model
