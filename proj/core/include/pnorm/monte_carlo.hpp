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
#include <functional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "pnorm/rng.hpp"

namespace pnorm {

// Draws one error coordinate. Must be symmetric about zero; only the
// standard normal default carries verified theory.
using ErrorSampler = std::function<double(Xoshiro256pp&)>;

// Replication budget and seeding for one simulation.
//
// Replications are split into chunks of `chunk_size`; chunk c draws from
// Xoshiro256pp::stream(seed, c) and replication r of the plan is always the
// (r mod chunk_size)-th draw sequence of chunk r / chunk_size. Results are
// therefore independent of `workers`.
struct MonteCarloPlan {
  std::int64_t replications = 1000;
  std::uint64_t seed = 1;
  std::int64_t chunk_size = 250;
  int workers = 1;  // 0 = hardware concurrency
  ErrorSampler sampler;  // empty = standard normal

  // Throws ConfigError on non-positive replications/chunk_size/workers.
  void validate() const;

  std::int64_t chunk_count() const { return (replications + chunk_size - 1) / chunk_size; }
  bool standard_normal_errors() const { return !static_cast<bool>(sampler); }
  std::string sampler_label() const { return sampler ? "custom-symmetric" : "standard-normal"; }

  MonteCarloPlan with_replications(std::int64_t r) const {
    MonteCarloPlan p = *this;
    p.replications = r;
    return p;
  }
  MonteCarloPlan with_seed(std::uint64_t s) const {
    MonteCarloPlan p = *this;
    p.seed = s;
    return p;
  }
};

// Fills `out` with i.i.d. errors according to the plan's sampler.
void draw_errors(const MonteCarloPlan& plan, Xoshiro256pp& rng, std::span<double> out);

struct ChunkRange {
  std::int64_t index;  // chunk id
  std::int64_t first;  // first replication in the chunk
  std::int64_t count;
};

// Runs body(chunk, rng, worker) for every chunk. Chunks are statically
// dealt round-robin to workers; `rng` is the chunk's own stream. The body
// must only write to state owned by its chunk (or its worker slot).
void for_each_chunk(const MonteCarloPlan& plan,
                    const std::function<void(const ChunkRange&, Xoshiro256pp&, int)>& body);

int resolved_workers(const MonteCarloPlan& plan);

}  // namespace pnorm
