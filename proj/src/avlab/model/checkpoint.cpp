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

#include "avlab/model/checkpoint.hpp"

#include "avlab/common/binary_io.hpp"
#include "avlab/common/error.hpp"
#include "avlab/common/hashing.hpp"

namespace avlab::model {

std::vector<unsigned char> encode_checkpoint(const Checkpoint& ckpt) {
  ByteWriter w;
  w.magic("AVCK");
  w.u32(kCheckpointVersion);

  std::string block;
  for (const auto& [k, v] : ckpt.arch.to_kv()) block += k + "=" + v + "\n";
  for (const auto& [k, v] : ckpt.meta) {
    if (k.rfind("arch.", 0) == 0 || k.find_first_of("=\n") != std::string::npos ||
        v.find('\n') != std::string::npos)
      fail(ErrorKind::Format, "invalid checkpoint metadata key " + k);
    block += k + "=" + v + "\n";
  }
  w.str(block);

  w.u32(static_cast<uint32_t>(ckpt.params.size()));
  for (const auto& [name, t] : ckpt.params) {
    w.str(name);
    if (t.rows() == 1) {
      w.u32(1);
      w.u32(static_cast<uint32_t>(t.cols()));
    } else {
      w.u32(2);
      w.u32(static_cast<uint32_t>(t.rows()));
      w.u32(static_cast<uint32_t>(t.cols()));
    }
    for (Eigen::Index i = 0; i < t.size(); ++i) w.f32(static_cast<float>(t.data()[i]));
  }
  uint32_t crc = crc32(w.data());
  w.u32(crc);
  return w.data();
}

Checkpoint decode_checkpoint(const std::vector<unsigned char>& bytes, const std::string& what) {
  if (bytes.size() < 12) fail(ErrorKind::Format, what + ": truncated checkpoint");
  const size_t body = bytes.size() - 4;
  uint32_t stored;
  std::memcpy(&stored, bytes.data() + body, 4);
  if (crc32(std::span<const unsigned char>(bytes.data(), body)) != stored)
    fail(ErrorKind::Checksum, what + ": checkpoint CRC32 mismatch");

  ByteReader r(bytes.data(), body, what);
  r.expect_magic("AVCK");
  uint32_t version = r.u32();
  if (version != kCheckpointVersion)
    fail(ErrorKind::Format, what + ": unsupported checkpoint version " + std::to_string(version));

  Checkpoint ck;
  std::map<std::string, std::string> arch_kv;
  std::string block = r.str();
  size_t pos = 0;
  while (pos < block.size()) {
    size_t nl = block.find('\n', pos);
    if (nl == std::string::npos) fail(ErrorKind::Format, what + ": unterminated header line");
    std::string line = block.substr(pos, nl - pos);
    pos = nl + 1;
    size_t eq = line.find('=');
    if (eq == std::string::npos) fail(ErrorKind::Format, what + ": malformed header line");
    std::string k = line.substr(0, eq), v = line.substr(eq + 1);
    if (k.rfind("arch.", 0) == 0)
      arch_kv[k] = v;
    else
      ck.meta[k] = v;
  }
  ck.arch = ArchConfig::from_kv(arch_kv);

  uint32_t count = r.u32();
  for (uint32_t i = 0; i < count; ++i) {
    std::string name = r.str();
    uint32_t rank = r.u32();
    Eigen::Index rows = 1, cols = 1;
    if (rank == 1) {
      cols = r.u32();
    } else if (rank == 2) {
      rows = r.u32();
      cols = r.u32();
    } else {
      fail(ErrorKind::Format, what + ": tensor " + name + " has unsupported rank");
    }
    if (static_cast<size_t>(rows * cols) * 4 > r.remaining())
      fail(ErrorKind::Format, what + ": tensor " + name + " truncated");
    Mat& t = ck.params.add(name, rows, cols);
    for (Eigen::Index j = 0; j < t.size(); ++j) t.data()[j] = r.f32();
  }
  if (r.remaining() != 0) fail(ErrorKind::Format, what + ": trailing bytes before checksum");
  return ck;
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  write_file_bytes(path, encode_checkpoint(ckpt));
}

Checkpoint load_checkpoint(const std::string& path) {
  return decode_checkpoint(read_file_bytes(path), path);
}

}  // namespace avlab::model
