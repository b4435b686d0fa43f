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

#include "pnorm/norms.hpp"

#include <cmath>

#include "pnorm/errors.hpp"

namespace pnorm {
namespace {

constexpr int kMaxChainPower = 16;

double int_pow(double r, int k) {
  double acc = r;
  for (int i = 1; i < k; ++i) acc *= r;
  return acc;
}

}  // namespace

NormBank::NormBank(std::vector<Exponent> exponents) : exponents_(std::move(exponents)) {
  integer_power_.reserve(exponents_.size());
  for (const Exponent& e : exponents_) {
    int k = 0;
    if (e.is_finite()) {
      const double p = e.value();
      if (p == std::floor(p) && p <= kMaxChainPower) {
        k = static_cast<int>(p);
      } else {
        needs_log_ = true;
      }
    }
    integer_power_.push_back(k);
  }
}

void NormBank::evaluate(std::span<const double> y, std::span<double> out) const {
  Workspace ws;
  evaluate(y, out, ws);
}

void NormBank::evaluate(std::span<const double> y, std::span<double> out, Workspace& ws) const {
  if (y.empty()) throw DomainError("p-norm of an empty vector");
  if (out.size() != exponents_.size()) throw DomainError("NormBank: output size mismatch");

  double m = 0.0;
  double probe = 0.0;  // becomes NaN on any NaN or infinite entry
  for (double v : y) {
    m = std::max(m, std::fabs(v));
    probe += v - v;
  }
  if (probe != 0.0 || !std::isfinite(m)) throw DomainError("p-norm of a non-finite vector");
  if (m == 0.0) {
    for (double& o : out) o = 0.0;
    return;
  }
  const std::size_t d = y.size();
  ws.ratio.resize(d);
  const double inv_m = 1.0 / m;
  for (std::size_t i = 0; i < d; ++i) ws.ratio[i] = std::fabs(y[i]) * inv_m;
  if (needs_log_) {
    ws.log_ratio.resize(d);
    for (std::size_t i = 0; i < d; ++i) ws.log_ratio[i] = std::log(ws.ratio[i]);
  }

  for (std::size_t k = 0; k < exponents_.size(); ++k) {
    const Exponent& e = exponents_[k];
    if (e.is_sup()) {
      out[k] = m;
      continue;
    }
    const double p = e.value();
    const int ip = integer_power_[k];
    double acc = 0.0;
    if (ip == 1) {
      for (std::size_t i = 0; i < d; ++i) acc += ws.ratio[i];
      out[k] = m * acc;
    } else if (ip == 2) {
      for (std::size_t i = 0; i < d; ++i) acc += ws.ratio[i] * ws.ratio[i];
      out[k] = m * std::sqrt(acc);
    } else if (ip > 0) {
      for (std::size_t i = 0; i < d; ++i) acc += int_pow(ws.ratio[i], ip);
      out[k] = m * std::pow(acc, 1.0 / p);
    } else {
      // exp(-inf) == 0 covers zero coordinates.
      for (std::size_t i = 0; i < d; ++i) acc += std::exp(p * ws.log_ratio[i]);
      out[k] = m * std::pow(acc, 1.0 / p);
    }
  }
}

double p_norm_stat(std::span<const double> y, Exponent p) {
  NormBank bank({p});
  double out = 0.0;
  bank.evaluate(y, std::span<double>(&out, 1));
  return out;
}

}  // namespace pnorm
