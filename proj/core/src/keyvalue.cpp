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

#include "pnorm/keyvalue.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "pnorm/errors.hpp"

namespace pnorm {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

double parse_double(const std::string& text) {
  const std::string t = trim(text);
  if (t == "inf") return INFINITY;
  if (t == "-inf") return -INFINITY;
  if (t == "nan") return NAN;
  double v = 0.0;
  auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    throw ConfigError("not a number: '" + text + "'");
  }
  return v;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::string token;
  for (char c : text + ",") {
    if (c == ',' || c == ' ' || c == '\t') {
      if (!trim(token).empty()) out.push_back(parse_double(token));
      token.clear();
    } else {
      token.push_back(c);
    }
  }
  return out;
}

KeyValueFile KeyValueFile::parse(std::istream& in) {
  KeyValueFile kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(t.substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    kv.set(key, trim(t.substr(eq + 1)));
  }
  return kv;
}

KeyValueFile KeyValueFile::read(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  return parse(in);
}

void KeyValueFile::write(std::ostream& out) const {
  for (const auto& [k, v] : entries_) {
    if (k.empty()) {
      out << "# " << v << '\n';
    } else {
      out << k << " = " << v << '\n';
    }
  }
}

void KeyValueFile::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = value;
      return;
    }
  }
  entries_.emplace_back(key, value);
}

void KeyValueFile::set(const std::string& key, double value) { set(key, format_double(value)); }
void KeyValueFile::set(const std::string& key, std::int64_t value) { set(key, std::to_string(value)); }

void KeyValueFile::set(const std::string& key, const std::vector<double>& values) {
  std::string s;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) s += ' ';
    s += format_double(values[i]);
  }
  set(key, s);
}

void KeyValueFile::comment(const std::string& text) { entries_.emplace_back("", text); }

bool KeyValueFile::has(const std::string& key) const { return find(key).has_value(); }

std::optional<std::string> KeyValueFile::find(const std::string& key) const {
  for (const auto& [k, v] : entries_) {
    if (!k.empty() && k == key) return v;
  }
  return std::nullopt;
}

std::string KeyValueFile::get(const std::string& key) const {
  auto v = find(key);
  if (!v) throw ConfigError("missing key '" + key + "'");
  return *v;
}

double KeyValueFile::get_double(const std::string& key) const { return parse_double(get(key)); }

std::int64_t KeyValueFile::get_int(const std::string& key) const {
  const std::string v = get(key);
  std::int64_t out = 0;
  auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw ConfigError("key '" + key + "' is not an integer: '" + v + "'");
  }
  return out;
}

std::vector<double> KeyValueFile::get_doubles(const std::string& key) const {
  return parse_double_list(get(key));
}

}  // namespace pnorm
