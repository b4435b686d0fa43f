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

#include "pnorm/power.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "pnorm/errors.hpp"
#include "pnorm/keyvalue.hpp"

namespace pnorm {

RateEstimate rate_from_count(std::int64_t rejections, std::int64_t replications) {
  if (replications <= 0) throw DomainError("rate needs at least one replication");
  if (rejections < 0 || rejections > replications) throw DomainError("rejection count outside [0, R]");
  RateEstimate e;
  e.replications = replications;
  e.rate = static_cast<double>(rejections) / static_cast<double>(replications);
  e.stderr_ = std::sqrt(e.rate * (1.0 - e.rate) / static_cast<double>(replications));
  return e;
}

DecisionCube::DecisionCube(std::size_t alternatives, std::int64_t replications, std::size_t tests)
    : alternatives_(alternatives),
      replications_(replications),
      tests_(tests),
      data_(alternatives * static_cast<std::size_t>(replications) * tests, 0) {}

std::int64_t DecisionCube::count(std::size_t alt, std::size_t test) const {
  std::int64_t n = 0;
  for (std::int64_t r = 0; r < replications_; ++r) n += at(alt, r, test);
  return n;
}

RateEstimate DecisionCube::rate(std::size_t alt, std::size_t test) const {
  return rate_from_count(count(alt, test), replications_);
}

DecisionCube simulate_decisions(const TestBattery& battery, const std::vector<std::vector<double>>& thetas,
                                const MonteCarloPlan& plan) {
  plan.validate();
  const auto d = static_cast<std::size_t>(battery.d());
  for (const auto& t : thetas) {
    if (t.size() != d) {
      throw DomainError("alternative of length " + std::to_string(t.size()) + " for tests of dimension " +
                        std::to_string(d));
    }
  }
  DecisionCube cube(thetas.size(), plan.replications, battery.size());
  const int workers = resolved_workers(plan);
  std::vector<TestBattery::Workspace> ws(static_cast<std::size_t>(workers));
  std::vector<std::vector<double>> eps(static_cast<std::size_t>(workers), std::vector<double>(d));
  std::vector<std::vector<double>> y(static_cast<std::size_t>(workers), std::vector<double>(d));
  for_each_chunk(plan, [&](const ChunkRange& chunk, Xoshiro256pp& rng, int w) {
    auto& e = eps[static_cast<std::size_t>(w)];
    auto& v = y[static_cast<std::size_t>(w)];
    for (std::int64_t r = chunk.first; r < chunk.first + chunk.count; ++r) {
      draw_errors(plan, rng, e);
      for (std::size_t a = 0; a < thetas.size(); ++a) {
        const auto& th = thetas[a];
        for (std::size_t i = 0; i < d; ++i) v[i] = th[i] + e[i];
        battery.decide(v, cube.row(a, r), ws[static_cast<std::size_t>(w)]);
      }
    }
  });
  return cube;
}

RateEstimate estimate_rejection(const AnyTest& test, std::span<const double> theta, const MonteCarloPlan& plan) {
  TestBattery battery({test});
  const auto cube = simulate_decisions(battery, {std::vector<double>(theta.begin(), theta.end())}, plan);
  return cube.rate(0, 0);
}

namespace {

std::vector<std::string> resolve_labels(const std::vector<AnyTest>& tests, const std::vector<std::string>& labels) {
  if (!labels.empty()) {
    if (labels.size() != tests.size()) throw DomainError("one label per test required");
    return labels;
  }
  std::vector<std::string> out;
  for (const auto& t : tests) out.push_back(label_of(t));
  return out;
}

std::int64_t common_dimension(const std::vector<AnyTest>& tests, std::int64_t d) {
  if (tests.empty()) throw DomainError("no tests given");
  for (const auto& t : tests) {
    if (dimension_of(t) != d) throw DomainError("tests calibrated at different dimensions");
  }
  return d;
}

}  // namespace

PowerTable power_curve(const std::vector<AnyTest>& tests, const AlternativeFamily& family,
                       const std::vector<double>& a_grid, std::int64_t d, const MonteCarloPlan& plan,
                       const std::vector<std::string>& labels) {
  common_dimension(tests, d);
  PowerTable table;
  table.tests = resolve_labels(tests, labels);
  table.family = family.label();
  table.a_grid = a_grid;
  std::vector<std::vector<double>> thetas;
  for (double a : a_grid) thetas.push_back(family.with_scale(a).theta(d));
  const TestBattery battery(tests);
  const auto cube = simulate_decisions(battery, thetas, plan);
  for (std::size_t k = 0; k < a_grid.size(); ++k) {
    for (std::size_t t = 0; t < tests.size(); ++t) {
      const auto e = cube.rate(k, t);
      table.rows.push_back({table.tests[t], table.family, a_grid[k], d, e.rate, e.stderr_, e.replications});
    }
  }
  return table;
}

std::vector<double> auto_a_grid(const std::vector<AnyTest>& tests, const AlternativeFamily& family,
                                std::int64_t d, const MonteCarloPlan& plan, int points) {
  if (points < 2) throw DomainError("a-grid needs at least two points");
  common_dimension(tests, d);
  const double dd = static_cast<double>(d);
  double top = 0.0;
  switch (family.kind()) {
    case AlternativeFamily::Kind::kDense:
      top = std::sqrt(5.0 * std::sqrt(2.0 / dd));
      break;
    case AlternativeFamily::Kind::kSparse:
      top = std::sqrt(2.0 * std::log(dd)) + 3.0;
      break;
    case AlternativeFamily::Kind::kSemiSparseDagger:
      top = 2.0;
      break;
    default:
      throw DomainError("family '" + family.label() + "' has no scale to range over");
  }
  const TestBattery battery(tests);
  const auto pilot = plan.with_replications(std::min<std::int64_t>(plan.replications, 500));
  for (int doubling = 0;; ++doubling) {
    const auto cube = simulate_decisions(battery, {family.with_scale(top).theta(d)}, pilot);
    double best = 0.0;
    for (std::size_t t = 0; t < tests.size(); ++t) best = std::max(best, cube.rate(0, t).rate);
    if (best >= 0.99) break;
    if (doubling == 12) throw NumericError("a-grid auto-ranging did not reach power 0.99");
    top *= 2.0;
  }
  std::vector<double> grid;
  for (int k = 0; k < points; ++k) grid.push_back(top * k / (points - 1.0));
  return grid;
}

void write_power_csv(std::ostream& out, const PowerTable& table) {
  out << "test,family,a,d,power,stderr,replications\n";
  for (const auto& r : table.rows) {
    out << r.test << ',' << r.family << ',' << format_double(r.a) << ',' << r.d << ',' << format_double(r.power)
        << ',' << format_double(r.stderr_) << ',' << r.replications << '\n';
  }
}

void write_power_svg(std::ostream& out, const PowerTable& table) {
  constexpr double W = 720, H = 440, L = 60, R = 170, T = 40, B = 50;
  static const char* const palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                        "#ff7f0e", "#17becf", "#8c564b", "#e377c2"};
  const double amax = table.a_grid.empty() ? 1.0 : std::max(table.a_grid.back(), 1e-12);
  auto px = [&](double a) { return L + (W - L - R) * a / amax; };
  auto py = [&](double p) { return H - B - (H - T - B) * p; };
  const std::int64_t d = table.rows.empty() ? 0 : table.rows.front().d;

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << L << "\" y=\"24\" font-size=\"14\">power, " << table.family << ", d = " << d << "</text>\n";
  out << "<line x1=\"" << L << "\" y1=\"" << py(0) << "\" x2=\"" << px(amax) << "\" y2=\"" << py(0)
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << L << "\" y1=\"" << py(0) << "\" x2=\"" << L << "\" y2=\"" << py(1)
      << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double p = k / 4.0;
    out << "<line x1=\"" << L - 4 << "\" y1=\"" << py(p) << "\" x2=\"" << px(amax) << "\" y2=\"" << py(p)
        << "\" stroke=\"#ddd\"/>\n";
    out << "<text x=\"" << L - 8 << "\" y=\"" << py(p) + 4 << "\" text-anchor=\"end\">" << format_double(p)
        << "</text>\n";
    const double a = amax * k / 4.0;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", a);
    out << "<text x=\"" << px(a) << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\">" << buf << "</text>\n";
  }
  out << "<text x=\"" << px(amax / 2) << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">a</text>\n";
  for (std::size_t t = 0; t < table.tests.size(); ++t) {
    const char* color = palette[t % (sizeof palette / sizeof palette[0])];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < table.a_grid.size(); ++k) {
      out << (k ? " " : "") << px(table.a_grid[k]) << ',' << py(table.at(k, t).power);
    }
    out << "\"/>\n";
    const double ly = T + 16.0 * static_cast<double>(t) + 10;
    out << "<line x1=\"" << W - R + 15 << "\" y1=\"" << ly << "\" x2=\"" << W - R + 40 << "\" y2=\"" << ly
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << W - R + 46 << "\" y=\"" << ly + 4 << "\">" << table.tests[t] << "</text>\n";
  }
  out << "</svg>\n";
}

AlphaBudget ladder_budget(std::int64_t d, double alpha) {
  return budget_from_geometric(exponential_ladder(d).m_d, alpha, 0.5, 0.5);
}

std::vector<Exponent> ladder_exponents(std::int64_t d) {
  std::vector<Exponent> out;
  for (double p : exponential_ladder(d).exponents) out.push_back(Exponent::finite(p));
  return out;
}

PeDemoReport pe_demo(std::int64_t d, double alpha2, double alpha_inf, const MonteCarloPlan& calibration,
                     const MonteCarloPlan& power) {
  if (d < 16) throw DomainError("pe_demo needs d >= 16");
  if (!(alpha2 > 0.0 && alpha_inf > 0.0 && alpha2 + alpha_inf < 1.0)) {
    throw DomainError("pe_demo needs alpha2, alpha_inf > 0 with alpha2 + alpha_inf < 1");
  }
  PeDemoReport rep;
  rep.d = d;
  rep.alpha2 = alpha2;
  rep.alpha_inf = alpha_inf;
  rep.alpha = alpha2 + alpha_inf;

  const auto ladder = ladder_exponents(d);
  std::vector<Exponent> exps = ladder;
  for (double p : {3.0, 4.0}) exps.push_back(Exponent::finite(p));
  exps.push_back(Exponent::sup());
  const auto null = simulate_null(exps, d, calibration);

  const auto two = make_single_test(mc_calibrate(null, Exponent::finite(2), alpha2));
  const auto sup = make_single_test(mc_calibrate(null, Exponent::sup(), alpha_inf));
  const auto p3 = make_single_test(mc_calibrate(null, Exponent::finite(3), rep.alpha));
  const auto p4 = make_single_test(mc_calibrate(null, Exponent::finite(4), rep.alpha));
  rep.combined = calibrate_combined(null, ladder, ladder_budget(d, rep.alpha));
  rep.kappa2 = two.kappa;
  rep.kappa_inf = sup.kappa;

  const TestBattery battery({two, sup, rep.combined, p3, p4});
  const auto cube = simulate_decisions(battery, {AlternativeFamily::dagger(1.0).theta(d)}, power);
  rep.two = cube.rate(0, 0);
  rep.sup = cube.rate(0, 1);
  rep.psi = cube.rate(0, 2);
  rep.p3 = cube.rate(0, 3);
  rep.p4 = cube.rate(0, 4);
  std::int64_t comb = 0;
  for (std::int64_t r = 0; r < cube.replications(); ++r) comb += (cube.at(0, r, 0) | cube.at(0, r, 1));
  rep.max_comb = rate_from_count(comb, cube.replications());
  rep.union_bound_per_sample = comb <= cube.count(0, 0) + cube.count(0, 1);
  return rep;
}

double opt_sum_bound(const CombinedTest& combined, std::size_t j) {
  const auto& b = combined.budget;
  if (j >= b.m()) throw DomainError("member index out of range");
  double abar = b.alphas[j];
  if (b.generator == AlphaBudget::Generator::kGeometric && j + 1 < b.m()) {
    abar = b.gamma * b.total * b.delta0 * std::pow(1.0 - b.delta0, static_cast<double>(j));
  }
  return (std_normal_quantile(1.0 - abar) - std_normal_quantile(1.0 - combined.target_alpha)) /
         std::sqrt(2.0 * std::numbers::pi);
}

GapScan opt_sum_gap_scan(const CombinedTest& combined, std::size_t j, const SingleNormTest& standalone,
                         const std::vector<std::vector<double>>& theta_grid, const MonteCarloPlan& plan) {
  if (j >= combined.exponents.size()) throw DomainError("member index out of range");
  if (!(standalone.exponent == combined.exponents[j])) {
    throw DomainError("standalone test exponent differs from member " + std::to_string(j));
  }
  if (std::fabs(standalone.schedule.alpha - combined.target_alpha) > 1e-12) {
    throw DomainError("standalone test must be calibrated at the combined test's level");
  }
  if (standalone.d != combined.d) throw DomainError("standalone and combined tests differ in dimension");
  GapScan scan;
  scan.bound = opt_sum_bound(combined, j);
  const TestBattery battery({standalone, combined});
  const auto cube = simulate_decisions(battery, theta_grid, plan);
  scan.max_gap = -1.0;
  for (std::size_t k = 0; k < theta_grid.size(); ++k) {
    scan.standalone.push_back(cube.rate(k, 0));
    scan.combined.push_back(cube.rate(k, 1));
    scan.gaps.push_back(scan.standalone.back().rate - scan.combined.back().rate);
    if (scan.gaps.back() > scan.max_gap) {
      scan.max_gap = scan.gaps.back();
      scan.argmax = k;
    }
  }
  if (!theta_grid.empty()) scan.combined_stderr = scan.combined[scan.argmax].stderr_;
  return scan;
}

EnhancementReport enhancement_demo(std::int64_t d, const TestSpec& base, const MonteCarloPlan& plan) {
  if (d < 2) throw DomainError("enhancement needs d >= 2");
  EnhancementReport rep;
  rep.enhanced = build_enhanced(base, d, plan);
  const double a = rep.enhanced.a_d;
  const double nu = rep.enhanced.nu_threshold;
  rep.power_floor = std_normal_ccdf(nu - a) + std_normal_cdf(-nu - a);
  rep.size_inflation_bound = 2.0 * std_normal_ccdf(std::pow(std::log(static_cast<double>(d)) / 2.0, 0.25));

  std::vector<double> shifted(static_cast<std::size_t>(d), 0.0);
  shifted[static_cast<std::size_t>(rep.enhanced.coordinate)] = a;
  const TestBattery battery({widen(base), rep.enhanced});
  const auto cube = simulate_decisions(battery, {std::vector<double>(static_cast<std::size_t>(d), 0.0), shifted},
                                       plan);
  rep.base_size = cube.rate(0, 0);
  rep.enhanced_size = cube.rate(0, 1);
  rep.base_power = cube.rate(1, 0);
  rep.enhanced_power = cube.rate(1, 1);
  for (std::size_t alt = 0; alt < 2; ++alt) {
    for (std::int64_t r = 0; r < cube.replications(); ++r) {
      if (cube.at(alt, r, 0) && !cube.at(alt, r, 1)) ++rep.domination_violations;
    }
  }
  return rep;
}

}  // namespace pnorm
