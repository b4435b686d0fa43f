// Copyright 2026 The pnorm Authors
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

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace pnorm {

// Flat "key = value" text: one pair per line, '#' starts a comment, blank
// lines ignored, insertion order preserved. Used for calibration
// artifacts, experiment configs and run manifests.
class KeyValueFile {
 public:
  static KeyValueFile parse(std::istream& in);
  static KeyValueFile read(const std::string& path);
  void write(std::ostream& out) const;

  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);
  void set(const std::string& key, std::int64_t value);
  void set(const std::string& key, const std::vector<double>& values);
  void comment(const std::string& text);

  bool has(const std::string& key) const;
  std::optional<std::string> find(const std::string& key) const;
  // The getters throw ConfigError when the key is missing or malformed.
  std::string get(const std::string& key) const;
  double get_double(const std::string& key) const;
  std::int64_t get_int(const std::string& key) const;
  std::vector<double> get_doubles(const std::string& key) const;

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

 private:
  // Comments are kept as entries with an empty key.
  std::vector<std::pair<std::string, std::string>> entries_;
};

// Shortest decimal that round-trips to the same double ("inf"/"-inf"/"nan").
std::string format_double(double x);
double parse_double(const std::string& text);
std::vector<double> parse_double_list(const std::string& text);  // comma or space separated

}  // namespace pnorm
