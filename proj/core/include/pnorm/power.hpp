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

// Monte-Carlo rejection rates. All tests and all alternatives of one call
// see the same errors eps^(r): replication r is keyed on (seed, chunk,
// position in chunk) and never on the test or the alternative.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "pnorm/consistency.hpp"
#include "pnorm/hypothesis_tests.hpp"
#include "pnorm/monte_carlo.hpp"

namespace pnorm {

struct RateEstimate {
  double rate = 0.0;
  double stderr_ = 0.0;  // sqrt(rate (1 - rate) / R)
  std::int64_t replications = 0;
};

RateEstimate rate_from_count(std::int64_t rejections, std::int64_t replications);

// Rejection indicators indexed [alternative][replication][test].
class DecisionCube {
 public:
  DecisionCube(std::size_t alternatives, std::int64_t replications, std::size_t tests);

  std::size_t alternatives() const { return alternatives_; }
  std::int64_t replications() const { return replications_; }
  std::size_t tests() const { return tests_; }

  std::uint8_t at(std::size_t alt, std::int64_t rep, std::size_t test) const {
    return data_[offset(alt, rep) + test];
  }
  std::span<std::uint8_t> row(std::size_t alt, std::int64_t rep) {
    return {data_.data() + offset(alt, rep), tests_};
  }
  std::int64_t count(std::size_t alt, std::size_t test) const;
  RateEstimate rate(std::size_t alt, std::size_t test) const;

 private:
  std::size_t offset(std::size_t alt, std::int64_t rep) const {
    return (alt * static_cast<std::size_t>(replications_) + static_cast<std::size_t>(rep)) * tests_;
  }
  std::size_t alternatives_;
  std::int64_t replications_;
  std::size_t tests_;
  std::vector<std::uint8_t> data_;
};

// Evaluates every test of the battery on theta_a + eps^(r) for every
// alternative a and replication r. Throws DomainError on a dimension
// mismatch.
DecisionCube simulate_decisions(const TestBattery& battery, const std::vector<std::vector<double>>& thetas,
                                const MonteCarloPlan& plan);

RateEstimate estimate_rejection(const AnyTest& test, std::span<const double> theta, const MonteCarloPlan& plan);

struct PowerRow {
  std::string test;
  std::string family;
  double a = 0.0;
  std::int64_t d = 0;
  double power = 0.0;
  double stderr_ = 0.0;
  std::int64_t replications = 0;
};

struct PowerTable {
  std::vector<std::string> tests;  // column order
  std::string family;
  std::vector<double> a_grid;
  std::vector<PowerRow> rows;      // a-major, test-minor

  const PowerRow& at(std::size_t a_index, std::size_t test) const { return rows[a_index * tests.size() + test]; }
};

// `labels` overrides label_of(test) when non-empty. The family must have a
// scale (dense, sparse or dagger).
PowerTable power_curve(const std::vector<AnyTest>& tests, const AlternativeFamily& family,
                       const std::vector<double>& a_grid, std::int64_t d, const MonteCarloPlan& plan,
                       const std::vector<std::string>& labels = {});

// `points` equally spaced scales from 0 to a top at which the best test has
// pilot power >= 0.99. The top starts at sqrt(5 sqrt(2/d)) for dense,
// sqrt(2 log d) + 3 for sparse and 2 for dagger, and is doubled until the
// pilot (min(R, 500) replications) reaches 0.99.
std::vector<double> auto_a_grid(const std::vector<AnyTest>& tests, const AlternativeFamily& family,
                                std::int64_t d, const MonteCarloPlan& plan, int points = 32);

// Columns: test,family,a,d,power,stderr,replications
void write_power_csv(std::ostream& out, const PowerTable& table);
void write_power_svg(std::ostream& out, const PowerTable& table);

// The configuration of the numerical study: exponential ladder with the
// geometric budget delta0 = gamma = 1/2.
AlphaBudget ladder_budget(std::int64_t d, double alpha);
std::vector<Exponent> ladder_exponents(std::int64_t d);

struct PeDemoReport {
  std::int64_t d = 0;
  double alpha2 = 0.0;
  double alpha_inf = 0.0;
  double alpha = 0.0;        // alpha2 + alpha_inf, level of psi_d and the p = 3, 4 tests
  double kappa2 = 0.0;
  double kappa_inf = 0.0;
  RateEstimate two;          // 2-norm test at alpha2
  RateEstimate sup;          // sup-norm test at alpha_inf
  RateEstimate max_comb;     // rejects if either of the two does
  RateEstimate psi;          // combined test of the numerical study
  RateEstimate p3;
  RateEstimate p4;
  bool union_bound_per_sample = true;  // max_comb count <= two count + sup count
  CombinedTest combined;
};

// Calibrates every test on one null sample drawn with `calibration`, then
// estimates power against the unscaled dagger array with `power`.
PeDemoReport pe_demo(std::int64_t d, double alpha2, double alpha_inf, const MonteCarloPlan& calibration,
                     const MonteCarloPlan& power);

// (Phi^{-1}(1 - abar_j) - Phi^{-1}(1 - alpha))/sqrt(2 pi), with abar_j =
// gamma alpha delta0 (1 - delta0)^{j} for a geometric budget and j below
// the last member, the budget's own alpha_j otherwise. j is 0-based.
double opt_sum_bound(const CombinedTest& combined, std::size_t j);

struct GapScan {
  std::vector<double> gaps;            // standalone power - combined power, per theta
  std::vector<RateEstimate> standalone;
  std::vector<RateEstimate> combined;
  std::size_t argmax = 0;
  double max_gap = 0.0;
  double bound = 0.0;
  double combined_stderr = 0.0;        // at argmax
};

// `standalone` must be the p_j member calibrated on its own at the
// combined test's target level.
GapScan opt_sum_gap_scan(const CombinedTest& combined, std::size_t j, const SingleNormTest& standalone,
                         const std::vector<std::vector<double>>& theta_grid, const MonteCarloPlan& plan);

struct EnhancementReport {
  EnhancedTest enhanced;
  RateEstimate base_size;
  RateEstimate enhanced_size;
  RateEstimate base_power;       // against a_d e_{i(d)}
  RateEstimate enhanced_power;
  double power_floor = 0.0;      // P(|N(a_d,1)| >= sqrt a_d)
  double size_inflation_bound = 0.0;  // 2 Phibar((log(d)/2)^{1/4})
  std::int64_t domination_violations = 0;  // samples where base rejects and enhanced does not
};

EnhancementReport enhancement_demo(std::int64_t d, const TestSpec& base, const MonteCarloPlan& plan);

}  // namespace pnorm
