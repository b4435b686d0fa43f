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

#include "pnorm/rng.hpp"

#include <cmath>
#include <cstdlib>

namespace pnorm {
namespace {

// Marsaglia & Tsang (2000), "The Ziggurat Method for Generating Random
// Variables", 128 layers. r is the start of the tail, v the common area.
constexpr double kTailStart = 3.442619855899;
constexpr double kLayerArea = 9.91256303526217e-3;
constexpr double kScale = 2147483648.0;  // 2^31

struct ZigguratTables {
  std::array<std::uint32_t, 128> kn{};
  std::array<double, 128> wn{};
  std::array<double, 128> fn{};

  ZigguratTables() {
    double dn = kTailStart;
    double tn = dn;
    const double q = kLayerArea / std::exp(-0.5 * dn * dn);
    kn[0] = static_cast<std::uint32_t>((dn / q) * kScale);
    kn[1] = 0;
    wn[0] = q / kScale;
    wn[127] = dn / kScale;
    fn[0] = 1.0;
    fn[127] = std::exp(-0.5 * dn * dn);
    for (int i = 126; i >= 1; --i) {
      dn = std::sqrt(-2.0 * std::log(kLayerArea / dn + std::exp(-0.5 * dn * dn)));
      kn[i + 1] = static_cast<std::uint32_t>((dn / tn) * kScale);
      tn = dn;
      fn[i] = std::exp(-0.5 * dn * dn);
      wn[i] = dn / kScale;
    }
  }
};

const ZigguratTables& tables() {
  static const ZigguratTables t;
  return t;
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Xoshiro256pp::Xoshiro256pp(std::uint64_t seed) {
  std::uint64_t sm = seed;
  for (auto& word : s_) word = splitmix64(sm);
}

Xoshiro256pp Xoshiro256pp::stream(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t a = seed;
  std::uint64_t b = stream ^ 0x6a09e667f3bcc909ULL;
  const std::uint64_t ha = splitmix64(a);
  const std::uint64_t hb = splitmix64(b);
  std::uint64_t mixed = ha ^ (hb + 0x9e3779b97f4a7c15ULL + (ha << 6) + (ha >> 2));
  return Xoshiro256pp(splitmix64(mixed));
}

double standard_normal(Xoshiro256pp& rng) {
  const ZigguratTables& t = tables();
  for (;;) {
    const std::uint64_t bits = rng();
    // Layer index and signed magnitude come from disjoint bits.
    const int iz = static_cast<int>(bits & 127U);
    const auto hz = static_cast<std::int32_t>(static_cast<std::uint32_t>(bits >> 32));
    const std::int64_t mag = std::llabs(static_cast<std::int64_t>(hz));
    const double x = static_cast<double>(hz) * t.wn[iz];
    if (mag < static_cast<std::int64_t>(t.kn[iz])) return x;

    if (iz == 0) {
      // Tail beyond r, Marsaglia's exponential rejection.
      double tx;
      double ty;
      do {
        tx = -std::log(rng.uniform()) / kTailStart;
        ty = -std::log(rng.uniform());
      } while (ty + ty < tx * tx);
      return hz > 0 ? kTailStart + tx : -kTailStart - tx;
    }
    if (t.fn[iz] + rng.uniform() * (t.fn[iz - 1] - t.fn[iz]) < std::exp(-0.5 * x * x)) return x;
  }
}

}  // namespace pnorm
