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

#include <span>
#include <vector>

#include "pnorm/math.hpp"

namespace pnorm {

// Evaluates several p-norms of the same vector in one sweep.
//
// Every finite norm is computed in max-factored form
//   m * (sum_i (|y_i|/m)^p)^{1/p},  m = max_i |y_i|,
// so no intermediate exceeds d for any p. Integer exponents up to 16 use
// repeated multiplication; other exponents use exp(p log r). The summation
// order is fixed (index order), so a NormBank with one exponent and a bank
// with many produce bit-identical values for that exponent.
class NormBank {
 public:
  explicit NormBank(std::vector<Exponent> exponents);

  const std::vector<Exponent>& exponents() const { return exponents_; }
  std::size_t size() const { return exponents_.size(); }

  // Scratch buffers reused across calls; one per thread.
  struct Workspace {
    std::vector<double> ratio;
    std::vector<double> log_ratio;
  };

  // out[k] = ||y||_{exponents[k]}. Throws DomainError if y is empty or
  // out has the wrong size.
  void evaluate(std::span<const double> y, std::span<double> out, Workspace& ws) const;
  void evaluate(std::span<const double> y, std::span<double> out) const;

 private:
  std::vector<Exponent> exponents_;
  std::vector<int> integer_power_;  // 0 when the exponent is not a small integer
  bool needs_log_ = false;
};

// ||y||_p (max |y_i| for the supremum norm). Throws DomainError on empty y.
double p_norm_stat(std::span<const double> y, Exponent p);

}  // namespace pnorm
