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

#include <gtest/gtest.h>

#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <numbers>
#include <numeric>

#include "pnorm/errors.hpp"
#include "pnorm/hypothesis_tests.hpp"
#include "pnorm/power.hpp"

using namespace pnorm;

namespace {

MonteCarloPlan plan(std::int64_t reps, std::uint64_t seed, int workers = 1) {
  MonteCarloPlan p;
  p.replications = reps;
  p.seed = seed;
  p.workers = workers;
  return p;
}

std::vector<Exponent> finite(std::initializer_list<double> ps) {
  std::vector<Exponent> out;
  for (double p : ps) out.push_back(Exponent::finite(p));
  return out;
}

SingleNormTest never_reject(std::int64_t d) {
  CriticalValueSchedule s;
  s.exponent = Exponent::finite(2);
  s.d = d;
  s.alpha = 0.0;
  s.kappa = INFINITY;
  return SingleNormTest{d, s.exponent, s.kappa, s};
}

}  // namespace

TEST(AlphaBudget, GeometricExamples) {
  const auto two = budget_from_geometric(2, 0.05, 0.3, 0.7);
  ASSERT_EQ(two.m(), 2u);
  EXPECT_NEAR(two.alphas[0], 0.7 * 0.05, 1e-17);
  EXPECT_NEAR(two.alphas[1], 0.3 * 0.05, 1e-17);

  const auto five = budget_from_geometric(5, 0.05, 0.5, 0.5);
  const double expect[] = {0.05 / 3.75, 0.05 / 7.5, 0.05 / 15, 0.05 / 30, 0.025};
  for (int j = 0; j < 5; ++j) EXPECT_NEAR(five.alphas[static_cast<std::size_t>(j)], expect[j], 1e-15);
  // The rounded values reported for the numerical study.
  const double rounded[] = {0.013, 0.007, 0.003, 0.002, 0.025};
  for (int j = 0; j < 5; ++j) EXPECT_NEAR(five.alphas[static_cast<std::size_t>(j)], rounded[j], 5e-4);

  for (int m = 2; m <= 40; ++m) {
    for (double a : {0.01, 0.05, 0.1}) {
      const auto b = budget_from_geometric(m, a, 0.37, 0.6);
      EXPECT_NEAR(std::accumulate(b.alphas.begin(), b.alphas.end(), 0.0), a, 1e-15);
      for (double x : b.alphas) EXPECT_TRUE(x > 0 && x < 1);
    }
  }
  EXPECT_THROW(budget_from_geometric(1, 0.05, 0.5, 0.5), DomainError);
  EXPECT_THROW(budget_from_geometric(3, 0.05, 1.0, 0.5), DomainError);
  EXPECT_THROW(budget_from_geometric(3, 0.05, 0.5, 0.0), DomainError);
}

TEST(AlphaBudget, Custom) {
  const auto b = custom_budget({0.01, 0.04});
  EXPECT_NEAR(b.total, 0.05, 1e-17);
  EXPECT_EQ(b.generator, AlphaBudget::Generator::kCustom);
  EXPECT_THROW(custom_budget({0.5, 1.0}), DomainError);
  EXPECT_THROW(custom_budget({}), DomainError);
}

TEST(Ladders, NumericalStudyPreset) {
  for (std::int64_t d : {50000, 250000}) {
    const auto l = exponential_ladder(d);
    EXPECT_EQ(l.m_d, 5);
    ASSERT_EQ(l.exponents.size(), 5u);
    for (int j = 0; j < 5; ++j) EXPECT_NEAR(l.exponents[static_cast<std::size_t>(j)], std::exp(j) + 1, 1e-12);
  }
  EXPECT_EQ(exponential_ladder(50000).exponents.front(), 2.0);
  EXPECT_GT(exponential_ladder(50000).exponents.back() / std::log(50000.0), 5.0);
  EXPECT_EQ(exponential_ladder(10000).m_d, static_cast<int>(std::ceil(std::log(6 * std::log(1e4)))));
  EXPECT_THROW(exponential_ladder(2), DomainError);
}

TEST(Ladders, LinearPreset) {
  const auto l = linear_ladder(1000);
  EXPECT_EQ(l.m_d, static_cast<int>(std::ceil(3 * std::log(1000.0))) + 1);
  for (int j = 0; j < l.m_d; ++j) EXPECT_EQ(l.exponents[static_cast<std::size_t>(j)], j + 2.0);
}

TEST(Combined, SingleMemberDegeneratesToMemberTest) {
  const auto p = plan(4000, 3);
  const auto null = simulate_null(finite({2}), 80, p);
  const auto t = calibrate_combined(null, finite({2}), custom_budget({0.05}));
  const double q = mc_calibrate(null, Exponent::finite(2), 0.05).kappa;
  EXPECT_NEAR(t.c_d * t.kappas[0], q, 1e-12 * q);
  EXPECT_LE(t.c_d, 1.0);
}

TEST(Combined, SharedSampleAndSizeGranularity) {
  const std::int64_t R = 8000;
  const auto exps = finite({2, std::exp(1) + 1, std::exp(2) + 1});
  const auto budget = budget_from_geometric(3, 0.05, 0.5, 0.5);
  const auto t = build_combined(300, exps, budget, plan(R, 44));
  EXPECT_GT(t.c_d, 0.0);
  EXPECT_LE(t.c_d, 1.0);
  EXPECT_NEAR(t.calibration_size, 0.05, 1.0 / R + 1e-12);
  EXPECT_EQ(t.provenance.seed, 44u);
  EXPECT_EQ(t.provenance.replications, R);
  // Each kappa is the member's quantile on the same sample.
  const auto null = simulate_null(exps, 300, plan(R, 44));
  for (std::size_t j = 0; j < exps.size(); ++j) {
    EXPECT_EQ(t.kappas[j], mc_calibrate(null, exps[j], budget.alphas[j]).kappa);
  }
  const auto again = calibrate_combined(null, exps, budget);
  EXPECT_EQ(again.c_d, t.c_d);
}

TEST(Combined, FreshSeedSize) {
  const std::int64_t R = 20000;
  const std::int64_t d = 500;
  const auto exps = finite({2, std::exp(1) + 1, std::exp(2) + 1});
  const auto t = build_combined(d, exps, budget_from_geometric(3, 0.05, 0.5, 0.5), plan(R, 1));
  const auto size = estimate_rejection(t, std::vector<double>(d, 0.0), plan(R, 2));
  EXPECT_NEAR(size.rate, 0.05, 3 * std::sqrt(0.05 * 0.95 / R));
}

TEST(Combined, RejectsBadInput) {
  const auto p = plan(2000, 3);
  EXPECT_THROW(build_combined(50, finite({3, 2}), custom_budget({0.025, 0.025}), p), DomainError);
  EXPECT_THROW(build_combined(50, {Exponent::sup(), Exponent::finite(2)}, custom_budget({0.025, 0.025}), p),
               DomainError);
  EXPECT_THROW(build_combined(50, finite({2, 3}), custom_budget({0.05}), p), DomainError);
  auto b = custom_budget({0.025, 0.025});
  b.total = 0.06;
  EXPECT_THROW(build_combined(50, finite({2, 3}), b, p), DomainError);
  EXPECT_THROW(build_combined(50, finite({2, 3}), custom_budget({0.0025, 0.025}), p), ConfigError);
}

TEST(Combined, NestingPerSample) {
  const std::int64_t d = 200;
  const auto exps = std::vector<Exponent>{Exponent::finite(1), Exponent::finite(2), Exponent::finite(4),
                                          Exponent::sup()};
  const auto t = build_combined(d, exps, custom_budget({0.01, 0.01, 0.01, 0.02}), plan(5000, 8));
  Xoshiro256pp rng(123);
  const NormBank bank(exps);
  std::vector<double> y(d), norms(exps.size());
  for (int s = 0; s < 10000; ++s) {
    const double shift = 0.3 * (s % 7);
    for (auto& v : y) v = standard_normal(rng) + shift * (s % 3 == 0);
    bank.evaluate(y, norms);
    bool member = false;
    for (std::size_t j = 0; j < exps.size(); ++j) member |= norms[j] >= t.kappas[j];
    if (member) ASSERT_EQ(evaluate(AnyTest{t}, y), Decision::kReject);
  }
}

TEST(Minimax, AnalyticKappas) {
  const auto t = build_minimax_adaptive(400, 2.5, 3);
  ASSERT_EQ(t.kappas.size(), 3u);
  EXPECT_NEAR(t.kappas[0], 2.5 * std::sqrt(400 * (1 - 2 / std::numbers::pi)) + 400 * std::sqrt(2 / std::numbers::pi),
              1e-10);
  EXPECT_NEAR(t.kappas[1] * t.kappas[1], 2.5 * std::sqrt(800.0) + 400, 1e-9);
  const auto one = build_minimax_adaptive(400, 2.5, 1);
  std::vector<double> y(400, 0.0);
  y[0] = one.kappas[0] + 1e-9;
  EXPECT_EQ(evaluate(AnyTest{one}, y), Decision::kReject);
  y[0] = one.kappas[0] - 1e-9;
  EXPECT_EQ(evaluate(AnyTest{one}, y), Decision::kAccept);
  EXPECT_THROW(build_minimax_adaptive(400, 2.5, 0), DomainError);
}

TEST(Minimax, GrowthWarnings) {
  // (p_d/sqrt d)(3/2)^{3 p_d/2} is about 10 at d = 10^4, p_d = 8: only the
  // growth surrogate fires.
  EXPECT_EQ(build_minimax_adaptive(10000, 5, 8).warnings.size(), 1u);
  EXPECT_EQ(build_minimax_adaptive(10000, 1, 8).warnings.size(), 2u);
  EXPECT_TRUE(build_minimax_adaptive(100000000, 5, 1).warnings.empty());
}

TEST(Minimax, RadiusForSize) {
  const std::int64_t d = 300, R = 10000;
  std::vector<Exponent> exps;
  for (int j = 1; j <= 4; ++j) exps.push_back(Exponent::finite(j));
  const auto null = simulate_null(exps, d, plan(R, 6));
  const double r = minimax_radius_for_size(null, 4, 0.05);
  EXPECT_GT(r, std_normal_quantile(0.95));
  const auto t = build_minimax_adaptive(d, r, 4);
  const auto fresh = estimate_rejection(t, std::vector<double>(d, 0.0), plan(R, 7));
  EXPECT_NEAR(fresh.rate, 0.05, 3 * std::sqrt(0.05 * 0.95 / R));
}

TEST(Evaluate, Decisions) {
  const auto s = make_single_test(asymptotic_schedule(Exponent::finite(2), 3, 0.05));
  std::vector<double> y{0, 0, 0};
  EXPECT_EQ(evaluate(AnyTest{s}, y), Decision::kAccept);
  y = {s.kappa, 0, 0};
  EXPECT_EQ(evaluate(AnyTest{s}, y), Decision::kReject);
  y = {s.kappa * 0.999, 0, 0};
  EXPECT_EQ(evaluate(AnyTest{s}, y), Decision::kAccept);
  EXPECT_THROW(evaluate(AnyTest{s}, std::vector<double>{1, 2}), DomainError);

  const auto c = build_combined(3, finite({1, 2}), custom_budget({0.02, 0.03}), plan(2000, 1));
  y = {0, 0, 0};
  EXPECT_EQ(evaluate(AnyTest{c}, y), Decision::kAccept);
  EXPECT_EQ(evaluate(AnyTest{build_minimax_adaptive(3, 2, 2)}, y), Decision::kAccept);
}

TEST(Enhanced, SymmetricBaseTakesFirstCoordinate) {
  const auto base = make_single_test(asymptotic_schedule(Exponent::finite(2), 50, 0.05));
  const auto e = build_enhanced(base, 50, plan(1000, 1));
  EXPECT_EQ(e.coordinate, 0);
  EXPECT_NEAR(e.a_d, std::sqrt(std::log(50.0) / 2), 1e-15);
  EXPECT_NEAR(e.nu_threshold, std::pow(std::log(50.0) / 2, 0.25), 1e-15);
  EXPECT_TRUE(is_permutation_symmetric(base));
}

TEST(Enhanced, ScanOfSymmetricBaseTiesToSmallestIndex) {
  // Never-rejecting base: every coordinate has power 0.
  const auto e = build_enhanced(never_reject(30), 30, plan(1000, 1), true);
  EXPECT_EQ(e.coordinate, 0);
}

TEST(Enhanced, ScanFindsLeastPowerfulCoordinate) {
  // Rejects on a large value in any coordinate except 7.
  const DecisionFn rejects = [](std::span<const double> y) {
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (i != 7 && std::fabs(y[i]) > 2.5) return true;
    }
    return false;
  };
  const auto scan = least_powerful_coordinate(rejects, 20, 1.5, plan(2000, 3));
  EXPECT_EQ(scan.coordinate, 7);
  EXPECT_EQ(scan.screen_power.size(), 20u);
}

TEST(Enhanced, NeverRejectBaseSizeMatchesOneCoordinateTail) {
  const std::int64_t d = 100, R = 40000;
  const auto e = build_enhanced(never_reject(d), d, plan(1000, 1));
  const auto size = estimate_rejection(e, std::vector<double>(d, 0.0), plan(R, 9));
  const double exact = 2 * std_normal_ccdf(std::pow(std::log(static_cast<double>(d)) / 2, 0.25));
  EXPECT_NEAR(size.rate, exact, 3 * std::sqrt(exact * (1 - exact) / R));
}

TEST(Enhanced, PointwiseDomination) {
  const std::int64_t d = 64;
  const auto base = make_single_test(asymptotic_schedule(Exponent::finite(3), d, 0.05));
  const auto e = build_enhanced(base, d, plan(1000, 1));
  Xoshiro256pp rng(5);
  std::vector<double> y(d);
  for (int s = 0; s < 10000; ++s) {
    for (auto& v : y) v = standard_normal(rng) + (s % 4 == 0 ? 0.4 : 0.0);
    if (evaluate(AnyTest{base}, y) == Decision::kReject) ASSERT_EQ(evaluate(AnyTest{e}, y), Decision::kReject);
  }
}

TEST(Battery, MatchesIndividualEvaluation) {
  const std::int64_t d = 120;
  const auto c = build_combined(d, finite({2, 3}), custom_budget({0.02, 0.03}), plan(3000, 1));
  const auto s1 = make_single_test(asymptotic_schedule(Exponent::finite(1), d, 0.05));
  const auto sup = make_single_test(asymptotic_schedule(Exponent::sup(), d, 0.05));
  const auto mm = build_minimax_adaptive(d, 2.0, 4);
  const auto e = build_enhanced(c, d, plan(1000, 1));
  const std::vector<AnyTest> tests{c, s1, sup, mm, e};
  const TestBattery battery(tests);
  EXPECT_EQ(battery.bank().size(), 5u);  // 2, 3, 1, sup, 4; the enhanced test reuses 2 and 3
  TestBattery::Workspace ws;
  std::vector<std::uint8_t> out(tests.size());
  Xoshiro256pp rng(2);
  std::vector<double> y(d);
  for (int s = 0; s < 2000; ++s) {
    for (auto& v : y) v = standard_normal(rng) * (1 + 0.001 * (s % 50));
    battery.decide(y, out, ws);
    for (std::size_t t = 0; t < tests.size(); ++t) {
      ASSERT_EQ(out[t] == 1, evaluate(tests[t], y) == Decision::kReject);
    }
  }
  EXPECT_THROW(TestBattery({s1, make_single_test(asymptotic_schedule(Exponent::finite(1), d + 1, 0.05))}),
               DomainError);
}

TEST(Labels, Readable) {
  EXPECT_EQ(label_of(make_single_test(asymptotic_schedule(Exponent::finite(2), 10, 0.05))), "p=2");
  EXPECT_EQ(label_of(make_single_test(asymptotic_schedule(Exponent::sup(), 10, 0.05))), "sup");
}
