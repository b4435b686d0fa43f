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

// Critical values for single p-norm tests: asymptotic formulas and the
// Monte-Carlo-exact empirical quantile, plus the shared null sample that
// the combined-test builders calibrate on.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pnorm/math.hpp"
#include "pnorm/monte_carlo.hpp"

namespace pnorm {

enum class ScheduleKind { kAsymptoticFinite, kAsymptoticSup, kMonteCarloExact, kAnalyticMinimax };

std::string to_string(ScheduleKind kind);
ScheduleKind schedule_kind_from_string(const std::string& text);

// Seeds and sizes of the simulation a critical value came from.
struct McProvenance {
  std::uint64_t seed = 0;
  std::int64_t replications = 0;
  std::int64_t chunk_size = 0;
  std::string sampler = "standard-normal";
};

struct CriticalValueSchedule {
  ScheduleKind kind = ScheduleKind::kMonteCarloExact;
  Exponent exponent = Exponent::sup();
  double alpha = 0.0;
  std::int64_t d = 0;
  double kappa = 0.0;
  std::string formula;                 // set for the asymptotic kinds
  std::optional<McProvenance> mc;      // set for kMonteCarloExact

  // Critical value at dimension `dim`. Asymptotic schedules re-evaluate
  // their formula; Monte-Carlo schedules only answer for their own d.
  double value(std::int64_t dim) const;
};

// [Phi^{-1}(1-alpha) sqrt(d sigma_p^2) + d mu_p]^{1/p}, o(1) term dropped.
// Throws CalibrationError when the bracket is not positive.
double asymptotic_kappa_finite(double p, std::int64_t d, double alpha);

// sqrt(2 log d) - [log log d + log 4pi]/(2 sqrt(2 log d))
//   - log(-log(1-alpha)/2)/sqrt(2 log d), for d >= 3.
double asymptotic_kappa_sup(std::int64_t d, double alpha);

// [r_d sqrt(d sigma_p^2) + d mu_p]^{1/p}.
double minimax_kappa(double p, std::int64_t d, double r_d);

CriticalValueSchedule asymptotic_schedule(Exponent p, std::int64_t d, double alpha);

// 1-based rank ceil(R (1 - alpha)) of the conservative empirical quantile.
std::int64_t upper_quantile_rank(std::int64_t replications, double alpha);

// The ceil(R(1-alpha))-th order statistic of `values` (copied, not sorted
// in place).
double empirical_upper_quantile(std::span<const double> values, double alpha);

// Norm statistics of R simulated error vectors, row r = replication r.
class NullStatistics {
 public:
  NullStatistics(std::vector<Exponent> exponents, std::int64_t d, std::int64_t replications,
                 McProvenance provenance, std::vector<double> values);

  const std::vector<Exponent>& exponents() const { return exponents_; }
  std::int64_t d() const { return d_; }
  std::int64_t replications() const { return replications_; }
  const McProvenance& provenance() const { return provenance_; }

  std::span<const double> row(std::int64_t r) const;
  std::vector<double> column(std::size_t k) const;
  // Column index of `p`; throws DomainError if absent.
  std::size_t index_of(const Exponent& p) const;

 private:
  std::vector<Exponent> exponents_;
  std::int64_t d_;
  std::int64_t replications_;
  McProvenance provenance_;
  std::vector<double> values_;
};

// Simulates ||eps_d||_p for every requested exponent on one shared sample.
NullStatistics simulate_null(std::vector<Exponent> exponents, std::int64_t d,
                             const MonteCarloPlan& plan);

// Throws ConfigError unless R >= 1000 and alpha R >= 10.
void check_calibration_budget(std::int64_t replications, double alpha);

// Empirical (1-alpha) critical value from a fresh null simulation.
CriticalValueSchedule mc_calibrate(Exponent p, std::int64_t d, double alpha,
                                   const MonteCarloPlan& plan);

// Same, reading column `p` of an existing null sample.
CriticalValueSchedule mc_calibrate(const NullStatistics& null, Exponent p, double alpha);

}  // namespace pnorm
