// include/medleysep/common/json_config.h

// Copyright 2026 The medleysep Authors

// See the top-level LICENSE file for the full license text.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef MEDLEYSEP_COMMON_JSON_CONFIG_H_
#define MEDLEYSEP_COMMON_JSON_CONFIG_H_

#include <set>
#include <string>

#include <json.hpp>

#include "medleysep/common/error.h"

namespace medleysep {

// Reads optional fields of one JSON object into defaults and rejects keys
// nobody asked for. Errors name the dotted field path.
class ConfigReader {
 public:
  ConfigReader(const nlohmann::json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(label() + ": expected a JSON object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(field(key) + ": " + e.what());
    }
  }

  // Parses with a converter that may throw std::invalid_argument.
  template <typename T, typename Fn>
  void get_as(const char* key, T& out, Fn&& convert) {
    std::string s;
    get(key, s);
    if (!j_.contains(key)) return;
    try {
      out = convert(s);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(field(key) + ": " + e.what());
    }
  }

  // Accepts the key without reading it (e.g. an explicit null).
  void allow(const char* key) { seen_.insert(key); }

  bool has(const char* key) const { return j_.contains(key) && !j_.at(key).is_null(); }
  const nlohmann::json& raw(const char* key) {
    seen_.insert(key);
    return j_.at(key);
  }

  std::string field(const std::string& key) const { return where_.empty() ? key : where_ + "." + key; }

  void finish() const {
    for (const auto& item : j_.items())
      if (!seen_.count(item.key())) throw ConfigError("unknown config field " + field(item.key()));
  }

 private:
  std::string label() const { return where_.empty() ? "config" : where_; }

  const nlohmann::json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

}  // namespace medleysep

#endif  // MEDLEYSEP_COMMON_JSON_CONFIG_H_
