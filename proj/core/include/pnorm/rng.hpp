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

// Deterministic random streams for the Monte-Carlo kernels.
//
// Engine: xoshiro256++ (Blackman & Vigna). Streams for (seed, stream id)
// pairs are derived by splitmix64 hashing, so any chunk of a simulation can
// be regenerated in isolation. Gaussian variates come from a 128-layer
// Marsaglia-Tsang ziggurat whose tables are built once at startup. Both the
// engine and the sampler are fixed algorithms: a given (seed, stream) yields
// the same variates on every platform with IEEE doubles.

#include <array>
#include <cstdint>
#include <limits>

namespace pnorm {

std::uint64_t splitmix64(std::uint64_t& state);

class Xoshiro256pp {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256pp(std::uint64_t seed);
  // Independent stream keyed on (seed, stream).
  static Xoshiro256pp stream(std::uint64_t seed, std::uint64_t stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform() { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::array<std::uint64_t, 4> s_;
};

// Standard normal variate via the ziggurat method.
double standard_normal(Xoshiro256pp& rng);

}  // namespace pnorm
