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

#include "avlab/training/experiment_file.hpp"

#include <filesystem>

#include "avlab/common/binary_io.hpp"
#include "avlab/common/error.hpp"
#include "avlab/common/text.hpp"

namespace fs = std::filesystem;

namespace avlab::training {

ExperimentFile ExperimentFile::parse(const std::string& text, const std::string& origin) {
  ExperimentFile f;
  f.origin_ = origin;
  std::string current;
  int lineno = 0;
  for (const auto& raw : split(text, '\n')) {
    ++lineno;
    std::string line = raw;
    size_t hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(lineno);
    if (line.front() == '[') {
      if (line.back() != ']') fail(ErrorKind::Config, where + ": unterminated section header");
      current = trim(line.substr(1, line.size() - 2));
      if (current.empty()) fail(ErrorKind::Config, where + ": empty section name");
      if (f.values_.count(current)) fail(ErrorKind::Config, where + ": duplicate section " + current);
      f.values_[current];
      f.order_.push_back(current);
      continue;
    }
    size_t eq = line.find('=');
    if (eq == std::string::npos) fail(ErrorKind::Config, where + ": expected key = value");
    if (current.empty()) fail(ErrorKind::Config, where + ": key outside any section");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(ErrorKind::Config, where + ": empty key");
    if (!f.values_[current].emplace(key, value).second)
      fail(ErrorKind::Config, where + ": duplicate key " + key);
  }
  return f;
}

ExperimentFile ExperimentFile::load(const std::string& path) {
  if (!fs::exists(path)) fail(ErrorKind::Config, "config file not found: " + path);
  ExperimentFile f = parse(read_text_file(path), path);
  fs::path parent = fs::path(path).parent_path();
  f.base_dir_ = parent.empty() ? "." : parent.string();
  return f;
}

std::vector<std::string> ExperimentFile::sections_with_prefix(const std::string& prefix) const {
  std::vector<std::string> out;
  for (const auto& s : order_)
    if (s.rfind(prefix, 0) == 0) out.push_back(s);
  return out;
}

const std::map<std::string, std::string>& ExperimentFile::section(const std::string& s) const {
  static const std::map<std::string, std::string> empty;
  auto it = values_.find(s);
  return it == values_.end() ? empty : it->second;
}

std::optional<std::string> ExperimentFile::get(const std::string& s, const std::string& key) const {
  auto it = values_.find(s);
  if (it == values_.end()) return std::nullopt;
  auto kt = it->second.find(key);
  if (kt == it->second.end()) return std::nullopt;
  return kt->second;
}

std::string ExperimentFile::get_string(const std::string& s, const std::string& key,
                                       const std::string& def) const {
  return get(s, key).value_or(def);
}

namespace {

[[noreturn]] void bad_value(const std::string& s, const std::string& key, const std::string& v,
                            const char* what) {
  fail(ErrorKind::Config, "[" + s + "] " + key + " = '" + v + "' is not " + what);
}

}  // namespace

int ExperimentFile::get_int(const std::string& s, const std::string& key, int def) const {
  auto v = get(s, key);
  if (!v) return def;
  try {
    size_t used = 0;
    int x = std::stoi(*v, &used);
    if (used != v->size()) bad_value(s, key, *v, "an integer");
    return x;
  } catch (const std::logic_error&) {
    bad_value(s, key, *v, "an integer");
  }
}

uint64_t ExperimentFile::get_u64(const std::string& s, const std::string& key, uint64_t def) const {
  auto v = get(s, key);
  if (!v) return def;
  try {
    size_t used = 0;
    if (!v->empty() && v->front() == '-') bad_value(s, key, *v, "an unsigned integer");
    uint64_t x = std::stoull(*v, &used);
    if (used != v->size()) bad_value(s, key, *v, "an unsigned integer");
    return x;
  } catch (const std::logic_error&) {
    bad_value(s, key, *v, "an unsigned integer");
  }
}

double ExperimentFile::get_double(const std::string& s, const std::string& key, double def) const {
  auto v = get(s, key);
  if (!v) return def;
  try {
    size_t used = 0;
    double x = std::stod(*v, &used);
    if (used != v->size()) bad_value(s, key, *v, "a number");
    return x;
  } catch (const std::logic_error&) {
    bad_value(s, key, *v, "a number");
  }
}

bool ExperimentFile::get_bool(const std::string& s, const std::string& key, bool def) const {
  auto v = get(s, key);
  if (!v) return def;
  if (*v == "true" || *v == "1" || *v == "yes") return true;
  if (*v == "false" || *v == "0" || *v == "no") return false;
  bad_value(s, key, *v, "a boolean");
}

std::vector<std::string> ExperimentFile::get_list(const std::string& s, const std::string& key,
                                                  const std::vector<std::string>& def) const {
  auto v = get(s, key);
  if (!v) return def;
  std::vector<std::string> out;
  for (const auto& part : split(*v, ',')) {
    std::string t = trim(part);
    if (t.empty()) bad_value(s, key, *v, "a comma-separated list");
    out.push_back(t);
  }
  return out;
}

void ExperimentFile::check_keys(const std::string& s, const std::set<std::string>& allowed) const {
  for (const auto& [k, v] : section(s))
    if (!allowed.count(k)) fail(ErrorKind::Config, origin_ + ": unknown key [" + s + "] " + k);
}

void ExperimentFile::check_sections(const std::set<std::string>& allowed) const {
  for (const auto& s : order_) {
    std::string head = s.substr(0, s.find('.'));
    if (!allowed.count(s) && !allowed.count(head))
      fail(ErrorKind::Config, origin_ + ": unknown section [" + s + "]");
  }
}

void ExperimentFile::set(const std::string& s, const std::string& key, const std::string& value) {
  if (!values_.count(s)) order_.push_back(s);
  values_[s][key] = value;
}

std::string ExperimentFile::resolve_path(const std::string& p) const {
  fs::path path(p);
  if (path.is_absolute()) return path.string();
  return (fs::path(base_dir_) / path).lexically_normal().string();
}

std::string ExperimentFile::canonical(const std::vector<std::string>& sections) const {
  std::string out;
  for (const auto& s : sections) {
    out += "[" + s + "]\n";
    for (const auto& [k, v] : section(s)) out += k + "=" + v + "\n";
  }
  return out;
}

}  // namespace avlab::training
