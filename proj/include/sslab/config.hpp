// Copyright 2026 The sslab Authors
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

#pragma once

// key=value experiment configuration with a fixed schema. Lines are
// "key = value"; '#' starts a comment. Unknown keys are errors.

#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sslab {

struct ConfigKey {
  std::string name;
  std::string default_value;
  std::string help;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Config {
 public:
  explicit Config(std::vector<ConfigKey> schema) : schema_(std::move(schema)) {
    for (const auto& k : schema_) values_[k.name] = k.default_value;
  }

  const std::vector<ConfigKey>& schema() const { return schema_; }

  bool Has(const std::string& key) const { return values_.count(key) != 0; }

  void Set(const std::string& key, const std::string& value) {
    if (!Has(key)) throw ConfigError("unknown config key '" + key + "'");
    values_[key] = value;
  }

  void Parse(std::istream& in, const std::string& origin = "<config>") {
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      line = Trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected key=value");
      }
      const std::string key = Trim(line.substr(0, eq));
      const std::string value = Trim(line.substr(eq + 1));
      if (!Has(key)) {
        throw ConfigError(origin + ":" + std::to_string(line_no) + ": unknown config key '" +
                          key + "'");
      }
      values_[key] = value;
    }
  }

  void ParseFile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    Parse(in, path);
  }

  void ParseString(const std::string& text) {
    std::istringstream in(text);
    Parse(in);
  }

  const std::string& GetString(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
    return it->second;
  }

  bool IsSet(const std::string& key) const { return !GetString(key).empty(); }

  double GetReal(const std::string& key) const {
    const std::string& v = GetString(key);
    try {
      std::size_t used = 0;
      const double d = std::stod(v, &used);
      if (used == v.size()) return d;
    } catch (const std::exception&) {
    }
    throw ConfigError("config key '" + key + "' expects a number, got '" + v + "'");
  }

  std::int64_t GetInt(const std::string& key) const {
    const std::string& v = GetString(key);
    try {
      std::size_t used = 0;
      const long long d = std::stoll(v, &used);
      if (used == v.size()) return d;
    } catch (const std::exception&) {
    }
    throw ConfigError("config key '" + key + "' expects an integer, got '" + v + "'");
  }

  std::size_t GetCount(const std::string& key) const {
    const auto v = GetInt(key);
    if (v < 0) throw ConfigError("config key '" + key + "' must be >= 0");
    return static_cast<std::size_t>(v);
  }

  std::uint64_t GetU64(const std::string& key) const {
    const std::string& v = GetString(key);
    try {
      std::size_t used = 0;
      const unsigned long long d = std::stoull(v, &used);
      if (used == v.size() && (v.empty() || v[0] != '-')) return d;
    } catch (const std::exception&) {
    }
    throw ConfigError("config key '" + key + "' expects an unsigned integer, got '" + v + "'");
  }

  bool GetBool(const std::string& key) const {
    const std::string& v = GetString(key);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("config key '" + key + "' expects a boolean, got '" + v + "'");
  }

  // Every key in schema order, for output headers.
  std::vector<std::pair<std::string, std::string>> Resolved() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& k : schema_) out.emplace_back(k.name, values_.at(k.name));
    return out;
  }

 private:
  static std::string Trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
  }

  std::vector<ConfigKey> schema_;
  std::map<std::string, std::string> values_;
};

}  // namespace sslab
