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

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace avlab {

// Hex SHA-256 digest.
std::string sha256_hex(std::string_view data);
// First 16 hex characters of the SHA-256; used as cache and config keys.
std::string short_hash(std::string_view data);
std::string file_short_hash(const std::string& path);

uint32_t crc32(std::span<const unsigned char> bytes);

}  // namespace avlab
