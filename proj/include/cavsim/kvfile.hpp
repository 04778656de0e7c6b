// Copyright 2026 cavsim contributors
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

#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace cavsim
{

struct ConfigError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

/// Line-oriented `key = value` file. `#` starts a comment; blank lines are
/// ignored. Duplicate keys are an error. Consumers pull typed values by key;
/// any key never pulled is reported by unknown_keys(), so loaders can fail
/// fast on typos.
class KvFile
{
public:
  static KvFile parse_file(const std::string & path)
  {
    std::ifstream in(path);
    if (!in) throw ConfigError{"cannot open file: " + path};
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str(), path);
  }

  static KvFile parse_string(const std::string & text, const std::string & origin = "<string>")
  {
    KvFile kv;
    kv.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const std::string trimmed = trim(line);
      if (trimmed.empty()) continue;
      const auto eq = trimmed.find('=');
      if (eq == std::string::npos) {
        throw ConfigError{origin + ":" + std::to_string(lineno) + ": expected 'key = value'"};
      }
      const std::string key = trim(trimmed.substr(0, eq));
      const std::string value = trim(trimmed.substr(eq + 1));
      if (key.empty()) {
        throw ConfigError{origin + ":" + std::to_string(lineno) + ": empty key"};
      }
      if (!kv.values_.emplace(key, value).second) {
        throw ConfigError{origin + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'"};
      }
    }
    return kv;
  }

  bool has(const std::string & key) const { return values_.count(key) > 0; }

  std::string get_string(const std::string & key, const std::string & fallback)
  {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    used_.insert(key);
    return it->second;
  }

  double get_double(const std::string & key, double fallback)
  {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    used_.insert(key);
    return parse_double(it->second, key);
  }

  std::int64_t get_int(const std::string & key, std::int64_t fallback)
  {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    used_.insert(key);
    std::int64_t v{};
    const auto & s = it->second;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
      throw ConfigError{origin_ + ": key '" + key + "': not an integer: '" + s + "'"};
    }
    return v;
  }

  bool get_bool(const std::string & key, bool fallback)
  {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    used_.insert(key);
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    throw ConfigError{origin_ + ": key '" + key + "': expected true/false, got '" + it->second + "'"};
  }

  std::vector<double> get_double_list(const std::string & key, std::vector<double> fallback)
  {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    used_.insert(key);
    std::vector<double> out;
    for (const std::string & item : split_csv(it->second)) {
      out.push_back(parse_double(item, key));
    }
    return out;
  }

  std::vector<std::uint64_t> get_uint_list(
    const std::string & key, std::vector<std::uint64_t> fallback)
  {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    used_.insert(key);
    std::vector<std::uint64_t> out;
    for (const std::string & item : split_csv(it->second)) {
      std::uint64_t v{};
      const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
      if (res.ec != std::errc{} || res.ptr != item.data() + item.size()) {
        throw ConfigError{origin_ + ": key '" + key + "': not an unsigned integer: '" + item + "'"};
      }
      out.push_back(v);
    }
    return out;
  }

  /// Keys present in the file but never read by any getter.
  std::vector<std::string> unknown_keys() const
  {
    std::vector<std::string> out;
    for (const auto & [k, v] : values_) {
      if (!used_.count(k)) out.push_back(k);
    }
    return out;
  }

  /// Throws listing every unused key. Call after all getters.
  void reject_unknown_keys() const
  {
    const auto unknown = unknown_keys();
    if (unknown.empty()) return;
    std::string msg = origin_ + ": unknown key(s):";
    for (const auto & k : unknown) msg += " '" + k + "'";
    throw ConfigError{msg};
  }

private:
  static std::string trim(const std::string & s)
  {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
  }

  static std::vector<std::string> split_csv(const std::string & s)
  {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
      const std::string t = trim(item);
      if (!t.empty()) out.push_back(t);
    }
    return out;
  }

  double parse_double(const std::string & s, const std::string & key) const
  {
    double v{};
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
      throw ConfigError{origin_ + ": key '" + key + "': not a number: '" + s + "'"};
    }
    return v;
  }

  std::string origin_;
  std::map<std::string, std::string> values_;
  std::set<std::string> used_;
};

}  // namespace cavsim
