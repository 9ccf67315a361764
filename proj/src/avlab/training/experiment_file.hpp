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
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace avlab::training {

// Line-oriented `key = value` file with `[section]` headers. '#' and ';'
// start comments. Section names may contain dots (`[finetune.low]`).
class ExperimentFile {
 public:
  static ExperimentFile parse(const std::string& text, const std::string& origin);
  static ExperimentFile load(const std::string& path);

  const std::string& origin() const { return origin_; }
  // Directory of the file; relative paths in values resolve against it.
  const std::string& base_dir() const { return base_dir_; }

  bool has_section(const std::string& s) const { return values_.count(s) != 0; }
  std::vector<std::string> sections() const { return order_; }
  std::vector<std::string> sections_with_prefix(const std::string& prefix) const;
  const std::map<std::string, std::string>& section(const std::string& s) const;

  std::optional<std::string> get(const std::string& s, const std::string& key) const;
  std::string get_string(const std::string& s, const std::string& key, const std::string& def) const;
  int get_int(const std::string& s, const std::string& key, int def) const;
  uint64_t get_u64(const std::string& s, const std::string& key, uint64_t def) const;
  double get_double(const std::string& s, const std::string& key, double def) const;
  bool get_bool(const std::string& s, const std::string& key, bool def) const;
  std::vector<std::string> get_list(const std::string& s, const std::string& key,
                                    const std::vector<std::string>& def) const;

  // Fails with Config on keys outside `allowed`.
  void check_keys(const std::string& s, const std::set<std::string>& allowed) const;
  // Fails with Config on sections whose name (or prefix before '.') is not listed.
  void check_sections(const std::set<std::string>& allowed) const;

  void set(const std::string& s, const std::string& key, const std::string& value);
  std::string resolve_path(const std::string& p) const;

  // Canonical text of the named sections (sorted keys), for hashing.
  std::string canonical(const std::vector<std::string>& sections) const;

 private:
  std::string origin_;
  std::string base_dir_ = ".";
  std::vector<std::string> order_;
  std::map<std::string, std::map<std::string, std::string>> values_;
};

}  // namespace avlab::training
