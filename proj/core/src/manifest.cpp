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

#include "pnorm/manifest.hpp"

#include <cstdio>
#include <fstream>
#include <iterator>

#include "pnorm/errors.hpp"

namespace pnorm {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string file_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

RunManifest::RunManifest(const std::string& command) {
  kv_.set("format", std::string("pnorm-manifest/1"));
  kv_.set("command", command);
}

void RunManifest::input(const std::string& key, const std::string& value) { kv_.set("input." + key, value); }

void RunManifest::output(const std::string& path) {
  kv_.set("output." + std::to_string(outputs_++), path + " fnv1a64:" + file_hash(path));
}

void RunManifest::write(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  kv_.write(out);
}

}  // namespace pnorm
