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

#include "pnorm/monte_carlo.hpp"

#include <algorithm>
#include <exception>
#include <mutex>

#include "pnorm/errors.hpp"

namespace pnorm {

void MonteCarloPlan::validate() const {
  if (replications < 1) throw ConfigError("Monte-Carlo plan: replications must be >= 1");
  if (chunk_size < 1) throw ConfigError("Monte-Carlo plan: chunk_size must be >= 1");
  if (workers < 0) throw ConfigError("Monte-Carlo plan: workers must be >= 0");
}

void draw_errors(const MonteCarloPlan& plan, Xoshiro256pp& rng, std::span<double> out) {
  if (plan.sampler) {
    for (double& e : out) e = plan.sampler(rng);
  } else {
    for (double& e : out) e = standard_normal(rng);
  }
}

int resolved_workers(const MonteCarloPlan& plan) {
  int w = plan.workers;
  if (w == 0) w = static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
  return static_cast<int>(std::min<std::int64_t>(w, plan.chunk_count()));
}

void for_each_chunk(const MonteCarloPlan& plan,
                    const std::function<void(const ChunkRange&, Xoshiro256pp&, int)>& body) {
  plan.validate();
  const std::int64_t chunks = plan.chunk_count();
  const int workers = resolved_workers(plan);

  auto run_worker = [&](int worker) {
    for (std::int64_t c = worker; c < chunks; c += workers) {
      const std::int64_t first = c * plan.chunk_size;
      const ChunkRange range{c, first, std::min(plan.chunk_size, plan.replications - first)};
      Xoshiro256pp rng = Xoshiro256pp::stream(plan.seed, static_cast<std::uint64_t>(c));
      body(range, rng, worker);
    }
  };

  if (workers <= 1) {
    run_worker(0);
    return;
  }
  std::vector<std::thread> threads;
  std::exception_ptr failure;
  std::mutex failure_mu;
  threads.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        run_worker(w);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace pnorm
