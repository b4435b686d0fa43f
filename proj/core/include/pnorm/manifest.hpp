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
#include <string>
#include <string_view>

#include "pnorm/keyvalue.hpp"

namespace pnorm {

// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);
// Hash of a file's bytes as 16 lowercase hex digits.
std::string file_hash(const std::string& path);

// Record of one run: every input that determines the outputs (seeds
// included) plus a hash of each output file.
//
//   format = pnorm-manifest/1
//   command = power
//   input.<key> = <value>
//   output.<n> = <path> fnv1a64:<hex>    (n counts from 0)
class RunManifest {
 public:
  explicit RunManifest(const std::string& command);

  void input(const std::string& key, const std::string& value);
  void output(const std::string& path);
  void write(const std::string& path) const;
  const KeyValueFile& data() const { return kv_; }

 private:
  KeyValueFile kv_;
  int outputs_ = 0;
};

}  // namespace pnorm
