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

#include "pnorm/hypothesis_tests.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "pnorm/errors.hpp"

namespace pnorm {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;


void require_increasing(const std::vector<Exponent>& exps) {
  if (exps.empty()) throw DomainError("combined test needs at least one exponent");
  for (std::size_t j = 0; j < exps.size(); ++j) {
    if (exps[j].is_sup() && j + 1 != exps.size()) {
      throw DomainError("the supremum norm may only be the last member of a combined test");
    }
    if (j > 0 && !exps[j].is_sup() && !(exps[j].value() > exps[j - 1].value())) {
      throw DomainError("combined-test exponents must be strictly increasing");
    }
  }
}

double max_ratio(std::span<const double> norms, const std::vector<double>& kappas) {
  double t = 0.0;
  for (std::size_t j = 0; j < kappas.size(); ++j) t = std::max(t, norms[j] / kappas[j]);
  return t;
}

std::string format_number(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

}  // namespace

AnyTest widen(const TestSpec& t) {
  return std::visit([](const auto& x) -> AnyTest { return x; }, t);
}

AlphaBudget budget_from_geometric(int m_d, double alpha, double delta0, double gamma) {
  if (m_d < 2) throw DomainError("geometric alpha budget needs m_d >= 2");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0,1)");
  if (!(delta0 > 0.0 && delta0 < 1.0)) throw DomainError("delta0 must lie in (0,1)");
  if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("gamma must lie in (0,1)");
  std::vector<double> delta(static_cast<std::size_t>(m_d - 1));
  for (int j = 0; j < m_d - 1; ++j) delta[static_cast<std::size_t>(j)] = delta0 * std::pow(1.0 - delta0, j);
  const double head = std::accumulate(delta.begin(), delta.end(), 0.0);

  AlphaBudget b;
  b.total = alpha;
  b.generator = AlphaBudget::Generator::kGeometric;
  b.delta0 = delta0;
  b.gamma = gamma;
  for (double dj : delta) b.alphas.push_back(gamma * alpha * dj / head);
  b.alphas.push_back((1.0 - gamma) * alpha);
  for (double a : b.alphas) {
    if (!(a > 0.0)) throw NumericError("geometric alpha budget underflowed; reduce m_d");
  }
  return b;
}

AlphaBudget custom_budget(std::vector<double> alphas) {
  if (alphas.empty()) throw DomainError("alpha budget is empty");
  for (double a : alphas) {
    if (!(a > 0.0 && a < 1.0)) throw DomainError("budget entries must lie in (0,1)");
  }
  AlphaBudget b;
  b.total = std::accumulate(alphas.begin(), alphas.end(), 0.0);
  if (!(b.total < 1.0)) throw DomainError("budget total must be below 1");
  b.alphas = std::move(alphas);
  b.generator = AlphaBudget::Generator::kCustom;
  return b;
}

ExponentLadder exponential_ladder(std::int64_t d) {
  if (d < 3) throw DomainError("exponent ladder needs d >= 3");
  ExponentLadder out;
  out.m_d = static_cast<int>(std::ceil(std::log(6.0 * std::log(static_cast<double>(d)))));
  for (int j = 1; j <= out.m_d; ++j) out.exponents.push_back(std::exp(static_cast<double>(j - 1)) + 1.0);
  return out;
}

ExponentLadder linear_ladder(std::int64_t d) {
  if (d < 3) throw DomainError("exponent ladder needs d >= 3");
  ExponentLadder out;
  out.m_d = static_cast<int>(std::ceil(3.0 * std::log(static_cast<double>(d)))) + 1;
  for (int j = 1; j <= out.m_d; ++j) out.exponents.push_back(static_cast<double>(j) + 1.0);
  return out;
}

std::int64_t dimension_of(const TestSpec& test) {
  return std::visit([](const auto& t) { return t.d; }, test);
}

std::int64_t dimension_of(const AnyTest& test) {
  return std::visit([](const auto& t) { return t.d; }, test);
}

std::string label_of(const AnyTest& test) {
  return std::visit(
      Overloaded{
          [](const SingleNormTest& t) {
            return t.exponent.is_sup() ? std::string("sup") : "p=" + format_number(t.exponent.value());
          },
          [](const CombinedTest& t) { return "combined(m=" + std::to_string(t.exponents.size()) + ")"; },
          [](const MinimaxAdaptiveTest& t) { return "minimax(p_d=" + std::to_string(t.p_d) + ")"; },
          [](const EnhancedTest& t) { return "enhanced[" + label_of(widen(t.base)) + "]"; },
      },
      test);
}

std::vector<Exponent> exponents_of(const AnyTest& test) {
  return std::visit(
      Overloaded{
          [](const SingleNormTest& t) { return std::vector<Exponent>{t.exponent}; },
          [](const CombinedTest& t) { return t.exponents; },
          [](const MinimaxAdaptiveTest& t) {
            std::vector<Exponent> e;
            for (int j = 1; j <= t.p_d; ++j) e.push_back(Exponent::finite(j));
            return e;
          },
          [](const EnhancedTest& t) { return exponents_of(widen(t.base)); },
      },
      test);
}

namespace {

bool base_rejects(const SingleNormTest& t, std::span<const double> norms) { return norms[0] >= t.kappa; }
bool base_rejects(const CombinedTest& t, std::span<const double> norms) {
  return max_ratio(norms, t.kappas) >= t.c_d;
}
bool base_rejects(const MinimaxAdaptiveTest& t, std::span<const double> norms) {
  return max_ratio(norms, t.kappas) >= 1.0;
}

}  // namespace

Decision decide(const AnyTest& test, std::span<const double> y, std::span<const double> norms) {
  const bool reject = std::visit(
      Overloaded{
          [&](const EnhancedTest& t) {
            return std::visit([&](const auto& b) { return base_rejects(b, norms); }, t.base) ||
                   std::fabs(y[static_cast<std::size_t>(t.coordinate)]) >= t.nu_threshold;
          },
          [&](const auto& t) { return base_rejects(t, norms); },
      },
      test);
  return reject ? Decision::kReject : Decision::kAccept;
}

Decision evaluate(const AnyTest& test, std::span<const double> y) {
  if (static_cast<std::int64_t>(y.size()) != dimension_of(test)) {
    throw DomainError("observation length " + std::to_string(y.size()) +
                      " does not match test dimension " + std::to_string(dimension_of(test)));
  }
  const NormBank bank(exponents_of(test));
  std::vector<double> norms(bank.size());
  bank.evaluate(y, norms);
  return decide(test, y, norms);
}

Decision evaluate(const TestSpec& test, std::span<const double> y) { return evaluate(widen(test), y); }

SingleNormTest make_single_test(const CriticalValueSchedule& schedule) {
  if (!(schedule.kappa > 0.0)) throw CalibrationError("critical value must be positive");
  return SingleNormTest{schedule.d, schedule.exponent, schedule.kappa, schedule};
}

CombinedTest calibrate_combined(const NullStatistics& null, const std::vector<Exponent>& exponents,
                                const AlphaBudget& budget) {
  require_increasing(exponents);
  if (budget.m() != exponents.size()) {
    throw DomainError("alpha budget has " + std::to_string(budget.m()) + " entries for " +
                      std::to_string(exponents.size()) + " exponents");
  }
  const double sum = std::accumulate(budget.alphas.begin(), budget.alphas.end(), 0.0);
  if (std::fabs(sum - budget.total) > 1e-12) throw DomainError("alpha budget does not sum to its total");

  const std::int64_t R = null.replications();
  CombinedTest out;
  out.d = null.d();
  out.exponents = exponents;
  out.budget = budget;
  out.target_alpha = budget.total;
  out.provenance = null.provenance();

  std::vector<std::size_t> cols;
  for (std::size_t j = 0; j < exponents.size(); ++j) {
    check_calibration_budget(R, budget.alphas[j]);
    cols.push_back(null.index_of(exponents[j]));
    out.kappas.push_back(empirical_upper_quantile(null.column(cols.back()), budget.alphas[j]));
  }

  std::vector<double> ratio(static_cast<std::size_t>(R));
  std::vector<double> member(exponents.size());
  for (std::int64_t r = 0; r < R; ++r) {
    const auto row = null.row(r);
    for (std::size_t j = 0; j < cols.size(); ++j) member[j] = row[cols[j]];
    ratio[static_cast<std::size_t>(r)] = max_ratio(member, out.kappas);
  }
  std::sort(ratio.begin(), ratio.end());
  auto rejections_at = [&](double c) {
    return static_cast<std::int64_t>(ratio.end() - std::lower_bound(ratio.begin(), ratio.end(), c));
  };

  // Line search for the smallest order statistic whose empirical size does
  // not exceed that of the conservative (1-alpha) quantile. The size is
  // monotone in c, so bisection over the sorted ratios is exact.
  const std::int64_t allowed = R - upper_quantile_rank(R, budget.total) + 1;
  std::int64_t lo = 0;
  std::int64_t hi = R - 1;
  if (rejections_at(ratio[static_cast<std::size_t>(lo)]) <= allowed ||
      rejections_at(ratio[static_cast<std::size_t>(hi)]) > allowed) {
    throw InternalError("combined-test size search failed to bracket alpha");
  }
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (rejections_at(ratio[static_cast<std::size_t>(mid)]) <= allowed) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  // Union bound: at c = 1 the size is at most sum_j alpha_j = alpha.
  out.c_d = std::min(1.0, ratio[static_cast<std::size_t>(hi)]);
  if (!(out.c_d > 0.0)) throw InternalError("combined-test multiplier is not positive");
  out.calibration_size = static_cast<double>(rejections_at(out.c_d)) / static_cast<double>(R);
  return out;
}

CombinedTest build_combined(std::int64_t d, const std::vector<Exponent>& exponents,
                            const AlphaBudget& budget, const MonteCarloPlan& plan) {
  require_increasing(exponents);
  if (budget.m() != exponents.size()) throw DomainError("alpha budget length does not match exponents");
  for (double a : budget.alphas) check_calibration_budget(plan.replications, a);
  return calibrate_combined(simulate_null(exponents, d, plan), exponents, budget);
}

MinimaxAdaptiveTest build_minimax_adaptive(std::int64_t d, double r_d, int p_d) {
  if (p_d < 1) throw DomainError("minimax-adaptive test needs p_d >= 1");
  if (d < 1) throw DomainError("dimension must be >= 1");
  if (!(r_d > 0.0) || !std::isfinite(r_d)) throw DomainError("r_d must be a positive real");
  MinimaxAdaptiveTest t;
  t.d = d;
  t.r_d = r_d;
  t.p_d = p_d;
  for (int j = 1; j <= p_d; ++j) t.kappas.push_back(minimax_kappa(j, d, r_d));

  const double size_surrogate = p_d * std_normal_cdf(-r_d);
  if (size_surrogate > 0.01) {
    t.warnings.push_back("p_d * Phi(-r_d) = " + format_number(size_surrogate) +
                         " > 0.01; the null rejection bound is loose");
  }
  const double growth = p_d / std::sqrt(static_cast<double>(d)) * std::pow(1.5, 1.5 * p_d);
  if (growth > 0.01) {
    t.warnings.push_back("(p_d / sqrt(d)) (3/2)^(3 p_d / 2) = " + format_number(growth) +
                         " > 0.01; p_d is large for this dimension");
  }
  return t;
}

double minimax_radius_for_size(const NullStatistics& null, int p_d, double alpha) {
  if (p_d < 1) throw DomainError("minimax-adaptive test needs p_d >= 1");
  check_calibration_budget(null.replications(), alpha);
  const double dd = static_cast<double>(null.d());
  std::vector<std::size_t> cols;
  std::vector<double> centre;
  std::vector<double> scale;
  for (int j = 1; j <= p_d; ++j) {
    cols.push_back(null.index_of(Exponent::finite(j)));
    const GaussMoments m = gauss_moments(j);
    centre.push_back(dd * m.mu_p);
    scale.push_back(std::sqrt(dd * m.sigma2_p));
  }
  std::vector<double> z(static_cast<std::size_t>(null.replications()));
  for (std::int64_t r = 0; r < null.replications(); ++r) {
    const auto row = null.row(r);
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < cols.size(); ++j) {
      const double power = std::pow(row[cols[j]], static_cast<double>(j + 1));
      best = std::max(best, (power - centre[j]) / scale[j]);
    }
    z[static_cast<std::size_t>(r)] = best;
  }
  const double r_d = empirical_upper_quantile(z, alpha);
  if (!(r_d > 0.0)) {
    throw CalibrationError("no positive r_d attains size " + format_number(alpha) +
                           "; increase alpha or reduce p_d");
  }
  return r_d;
}

CoordinateScan least_powerful_coordinate(const DecisionFn& rejects, std::int64_t d, double shift,
                                         const MonteCarloPlan& plan) {
  if (d < 1) throw DomainError("dimension must be >= 1");
  plan.validate();
  const auto ud = static_cast<std::size_t>(d);

  // Rejection counts per coordinate; chunks add into per-worker rows.
  auto count = [&](const MonteCarloPlan& p, const std::vector<std::int64_t>& coords) {
    const auto workers = static_cast<std::size_t>(resolved_workers(p));
    std::vector<std::vector<std::int64_t>> hits(workers, std::vector<std::int64_t>(coords.size(), 0));
    std::vector<std::vector<double>> buf(workers, std::vector<double>(ud));
    for_each_chunk(p, [&](const ChunkRange& chunk, Xoshiro256pp& rng, int w) {
      auto& y = buf[static_cast<std::size_t>(w)];
      auto& h = hits[static_cast<std::size_t>(w)];
      for (std::int64_t r = 0; r < chunk.count; ++r) {
        draw_errors(p, rng, y);
        for (std::size_t k = 0; k < coords.size(); ++k) {
          const auto i = static_cast<std::size_t>(coords[k]);
          const double saved = y[i];
          y[i] += shift;
          if (rejects(y)) ++h[k];
          y[i] = saved;
        }
      }
    });
    std::vector<double> power(coords.size(), 0.0);
    for (const auto& h : hits) {
      for (std::size_t k = 0; k < coords.size(); ++k) power[k] += static_cast<double>(h[k]);
    }
    for (double& v : power) v /= static_cast<double>(p.replications);
    return power;
  };

  std::vector<std::int64_t> all(ud);
  std::iota(all.begin(), all.end(), 0);
  CoordinateScan scan;
  scan.screen_power = count(plan.with_replications(std::max<std::int64_t>(1, plan.replications / 10)), all);

  std::vector<std::int64_t> order = all;
  std::stable_sort(order.begin(), order.end(), [&](std::int64_t a, std::int64_t b) {
    return scan.screen_power[static_cast<std::size_t>(a)] < scan.screen_power[static_cast<std::size_t>(b)];
  });
  order.resize(std::min<std::size_t>(10, order.size()));
  std::sort(order.begin(), order.end());
  const auto refined = count(plan, order);
  std::size_t best = 0;
  for (std::size_t k = 1; k < order.size(); ++k) {
    if (refined[k] < refined[best]) best = k;
  }
  scan.coordinate = order[best];
  scan.power = refined[best];
  return scan;
}

bool is_permutation_symmetric(const TestSpec& test) {
  // Every statistic here is a function of the multiset {|y_i|}.
  return std::visit([](const auto&) { return true; }, test);
}

EnhancedTest build_enhanced(const TestSpec& base, std::int64_t d, const MonteCarloPlan& plan,
                            bool force_scan) {
  if (d < 2) throw DomainError("enhancement needs d >= 2");
  if (dimension_of(base) != d) throw DomainError("base test dimension does not match d");
  EnhancedTest t;
  t.base = base;
  t.d = d;
  t.a_d = std::sqrt(std::log(static_cast<double>(d)) / 2.0);
  t.nu_threshold = std::sqrt(t.a_d);
  if (force_scan || !is_permutation_symmetric(base)) {
    const AnyTest wide = widen(base);
    const NormBank bank(exponents_of(wide));
    const DecisionFn rejects = [&](std::span<const double> y) {
      NormBank::Workspace ws;
      std::vector<double> norms(bank.size());
      bank.evaluate(y, norms, ws);
      return decide(wide, y, norms) == Decision::kReject;
    };
    t.coordinate = least_powerful_coordinate(rejects, d, t.a_d, plan).coordinate;
  } else {
    t.coordinate = 0;
  }
  return t;
}

TestBattery::TestBattery(std::vector<AnyTest> tests)
    : tests_(std::move(tests)), d_(0), bank_(std::vector<Exponent>{}) {
  if (tests_.empty()) throw DomainError("test battery is empty");
  d_ = dimension_of(tests_.front());
  std::vector<Exponent> unique;
  for (const auto& t : tests_) {
    if (dimension_of(t) != d_) throw DomainError("tests in one battery must share the dimension");
    std::vector<std::size_t> idx;
    for (const auto& e : exponents_of(t)) {
      auto it = std::find(unique.begin(), unique.end(), e);
      if (it == unique.end()) {
        unique.push_back(e);
        it = unique.end() - 1;
      }
      idx.push_back(static_cast<std::size_t>(it - unique.begin()));
    }
    member_index_.push_back(std::move(idx));
  }
  bank_ = NormBank(std::move(unique));
}

void TestBattery::decide(std::span<const double> y, std::span<std::uint8_t> out, Workspace& ws) const {
  if (static_cast<std::int64_t>(y.size()) != d_) throw DomainError("observation length does not match battery");
  ws.norms.resize(bank_.size());
  bank_.evaluate(y, ws.norms, ws.norms_ws);
  for (std::size_t t = 0; t < tests_.size(); ++t) {
    const auto& idx = member_index_[t];
    ws.member.resize(idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) ws.member[k] = ws.norms[idx[k]];
    out[t] = pnorm::decide(tests_[t], y, ws.member) == Decision::kReject ? 1 : 0;
  }
}

}  // namespace pnorm
