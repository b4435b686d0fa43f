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

// Plain-text calibration artifacts.
//
//   format = pnorm-calibration/1
//   kind = single | combined | minimax | enhanced
//   d = <dimension>
//
// single:    exponent, alpha, kappa, schedule
// combined:  exponents, alphas, budget (geometric|custom), delta0, gamma,
//            target_alpha, kappas, c_d, calibration_size
// minimax:   r_d, p_d, kappas
// enhanced:  base_kind plus the keys of that base kind, coordinate
//            (0-based), a_d, nu_threshold
//
// Monte-Carlo calibrated artifacts also carry seed, replications,
// chunk_size and sampler. Reals are written as shortest round-trip
// decimals, so reading an artifact restores the test bit-exactly.

#include <string>

#include "pnorm/hypothesis_tests.hpp"
#include "pnorm/keyvalue.hpp"

namespace pnorm {

KeyValueFile to_artifact(const AnyTest& test);
AnyTest from_artifact(const KeyValueFile& file);

void save_artifact(const AnyTest& test, const std::string& path);
AnyTest load_artifact(const std::string& path);

}  // namespace pnorm
