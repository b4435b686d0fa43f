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

#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pnorm/artifact.hpp"
#include "pnorm/consistency.hpp"
#include "pnorm/errors.hpp"
#include "pnorm/power.hpp"
#include "pnorm/regression.hpp"

namespace pnormtest {

using namespace pnorm;
namespace fs = std::filesystem;

namespace {

MonteCarloPlan make_plan(const PlanOptions& o, std::int64_t reps, std::uint64_t seed) {
  MonteCarloPlan p;
  p.replications = reps;
  p.seed = seed;
  p.chunk_size = o.chunk;
  p.workers = o.workers;
  p.validate();
  return p;
}

MonteCarloPlan make_plan(const PlanOptions& o) { return make_plan(o, o.reps, o.seed); }

std::string join(const std::string& dir, const std::string& name) {
  const fs::path p(name);
  return p.is_absolute() ? name : (fs::path(dir) / p).string();
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write '" + path + "'");
  return f;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string tok;
  while (std::getline(in, tok, sep)) {
    if (!tok.empty()) out.push_back(tok);
  }
  return out;
}

std::vector<Exponent> parse_exponents(const std::string& text) {
  std::vector<Exponent> out;
  for (const auto& t : split(text, ',')) out.push_back(Exponent::parse(t));
  if (out.empty()) throw ConfigError("empty exponent list");
  return out;
}

// Slug used in file names: "p=2" -> "p2", "psi_d" -> "psi_d".
std::string slug(const std::string& label) {
  std::string s;
  for (char c : label) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.') s += c;
  }
  return s;
}

void print_test(const AnyTest& test) {
  std::visit(
      [](const auto& t) {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, SingleNormTest>) {
          std::printf("test        %s, d = %lld\n", label_of(t).c_str(), static_cast<long long>(t.d));
          std::printf("kappa       %.10g\n", t.kappa);
          if (!t.schedule.formula.empty()) std::printf("formula     %s\n", t.schedule.formula.c_str());
        } else if constexpr (std::is_same_v<T, CombinedTest>) {
          std::printf("test        combined, d = %lld, alpha = %g\n", static_cast<long long>(t.d), t.target_alpha);
          for (std::size_t j = 0; j < t.exponents.size(); ++j) {
            const auto name = "kappa[" + t.exponents[j].to_string() + "]";
            std::printf("%-12s%-16.10g alpha_j = %.6g\n", name.c_str(), t.kappas[j], t.budget.alphas[j]);
          }
          std::printf("c_d         %.10g\n", t.c_d);
          std::printf("size        %.6g on the calibration sample\n", t.calibration_size);
        } else if constexpr (std::is_same_v<T, MinimaxAdaptiveTest>) {
          std::printf("test        minimax-adaptive, d = %lld, r_d = %.10g, p_d = %d\n", static_cast<long long>(t.d),
                      t.r_d, t.p_d);
          for (std::size_t j = 0; j < t.kappas.size(); ++j) std::printf("kappa[%zu]    %.10g\n", j + 1, t.kappas[j]);
          for (const auto& w : t.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
        } else {
          print_test(widen(t.base));
          std::printf("enhanced    coordinate %lld (0-based), a_d = %.6g, threshold %.6g\n",
                      static_cast<long long>(t.coordinate), t.a_d, t.nu_threshold);
        }
      },
      test);
}

void save(const AnyTest& test, const std::string& path, RunManifest& manifest) {
  save_artifact(test, path);
  manifest.output(path);
}

std::vector<double> parse_a_grid(const std::string& spec, const std::vector<AnyTest>& tests,
                                 const AlternativeFamily& family, std::int64_t d, const MonteCarloPlan& plan) {
  if (spec == "auto") return auto_a_grid(tests, family, d, plan);
  if (spec.rfind("auto:", 0) == 0) {
    const auto n = static_cast<int>(parse_double(spec.substr(5)));
    if (n < 2) throw ConfigError("auto grid needs at least 2 points");
    return auto_a_grid(tests, family, d, plan, n);
  }
  const auto parts = split(spec, ':');
  if (parts.size() == 3) {
    const double lo = parse_double(parts[0]), hi = parse_double(parts[1]);
    const auto n = static_cast<int>(parse_double(parts[2]));
    if (n < 2 || !(hi > lo)) throw ConfigError("a-grid '" + spec + "' needs lo < hi and n >= 2");
    std::vector<double> g;
    for (int k = 0; k < n; ++k) g.push_back(lo + (hi - lo) * k / (n - 1));
    return g;
  }
  return parse_double_list(spec);
}

void write_table(const PowerTable& t, const std::string& stem, bool svg, RunManifest& manifest) {
  {
    auto f = open_out(stem + ".csv");
    write_power_csv(f, t);
  }
  manifest.output(stem + ".csv");
  if (svg) {
    {
      auto f = open_out(stem + ".svg");
      write_power_svg(f, t);
    }
    manifest.output(stem + ".svg");
  }
  std::printf("%-8s %zu scales, a in [0, %.5g] -> %s.csv\n", t.family.c_str(), t.a_grid.size(), t.a_grid.back(),
              stem.c_str());
  for (std::size_t i = 0; i < t.tests.size(); ++i) {
    const auto& row0 = t.at(0, i);
    std::printf("    %-8s power at a=0: %.4f (se %.4f)\n", t.tests[i].c_str(), row0.power, row0.stderr_);
  }
}

}  // namespace

void run_calibrate(const CalibrateOptions& o, const std::string& out, RunManifest& manifest) {
  if (o.d < 1) throw ConfigError("--d is required");
  const int modes = !o.p.empty() + !o.preset.empty() + !o.exponents.empty() + o.minimax;
  if (modes != 1) throw ConfigError("choose exactly one of --p, --preset, --exponents, --minimax");
  if (o.asymptotic && o.p.empty()) throw ConfigError("--asymptotic only applies to --p");
  const auto plan = make_plan(o.plan);

  TestSpec spec;
  if (!o.p.empty()) {
    const auto e = Exponent::parse(o.p);
    spec = make_single_test(o.asymptotic ? asymptotic_schedule(e, o.d, o.alpha) : mc_calibrate(e, o.d, o.alpha, plan));
  } else if (!o.preset.empty()) {
    // "sec6": exponents e^{j-1} + 1; "linear": exponents j + 1. Both with
    // the geometric budget delta0 = gamma = 1/2.
    ExponentLadder ladder;
    if (o.preset == "sec6") {
      ladder = exponential_ladder(o.d);
    } else if (o.preset == "linear") {
      ladder = linear_ladder(o.d);
    } else {
      throw ConfigError("unknown preset '" + o.preset + "' (known: sec6, linear)");
    }
    std::vector<Exponent> exps;
    for (double q : ladder.exponents) exps.push_back(Exponent::finite(q));
    spec = build_combined(o.d, exps, budget_from_geometric(ladder.m_d, o.alpha, 0.5, 0.5), plan);
  } else if (!o.exponents.empty()) {
    const auto exps = parse_exponents(o.exponents);
    const int m = static_cast<int>(exps.size());
    AlphaBudget budget;
    if (o.budget.empty()) {
      budget = budget_from_geometric(m, o.alpha, 0.5, 0.5);
    } else if (o.budget.rfind("geometric:", 0) == 0) {
      const auto parts = split(o.budget.substr(10), ':');
      if (parts.size() != 2) throw ConfigError("--budget geometric:<delta0>:<gamma>");
      budget = budget_from_geometric(m, o.alpha, parse_double(parts[0]), parse_double(parts[1]));
    } else {
      budget = custom_budget(parse_double_list(o.budget));
    }
    spec = build_combined(o.d, exps, budget, plan);
  } else {
    if (o.pd < 1) throw ConfigError("--minimax needs --pd >= 1");
    double rd = o.rd;
    if (!(rd > 0.0)) {
      std::vector<Exponent> exps;
      for (int j = 1; j <= o.pd; ++j) exps.push_back(Exponent::finite(j));
      rd = minimax_radius_for_size(simulate_null(exps, o.d, plan), o.pd, o.alpha);
    }
    spec = build_minimax_adaptive(o.d, rd, o.pd);
  }

  const AnyTest test = o.enhance ? AnyTest{build_enhanced(spec, o.d, plan)} : widen(spec);
  print_test(test);
  const auto path = join(out, o.output);
  save(test, path, manifest);
  std::printf("artifact    %s\n", path.c_str());
}

void run_power(const PowerOptions& o, const std::string& out, RunManifest& manifest) {
  if (o.figure3) {
    if (o.scale != "desk" && o.scale != "paper") throw ConfigError("--scale must be desk or paper");
    const bool paper = o.scale == "paper";
    std::vector<std::int64_t> dims = paper ? std::vector<std::int64_t>{50000, 250000} : std::vector<std::int64_t>{10000};
    if (o.d > 0) dims = {o.d};
    const std::int64_t cal_reps = o.calibration_reps > 0 ? o.calibration_reps : (paper ? 50000 : 100000);
    const std::int64_t pow_reps = o.plan.reps > 0 ? o.plan.reps : (paper ? 1000 : 2000);
    const std::vector<std::string> families =
        o.families.empty() ? std::vector<std::string>{"dense", "dagger", "sparse"} : o.families;

    for (const auto d : dims) {
      const auto ladder = ladder_exponents(d);
      std::vector<Exponent> exps = {Exponent::finite(1), Exponent::finite(2), Exponent::finite(3),
                                    Exponent::finite(4)};
      for (const auto& e : ladder) {
        if (std::find(exps.begin(), exps.end(), e) == exps.end()) exps.push_back(e);
      }
      exps.push_back(Exponent::sup());
      std::printf("d = %lld: calibrating on %lld null draws\n", static_cast<long long>(d),
                  static_cast<long long>(cal_reps));
      const auto null = simulate_null(exps, d, make_plan(o.plan, cal_reps, o.plan.seed + 1));
      std::vector<AnyTest> tests;
      std::vector<std::string> labels;
      for (int p = 1; p <= 4; ++p) {
        tests.push_back(make_single_test(mc_calibrate(null, Exponent::finite(p), 0.05)));
        labels.push_back("p=" + std::to_string(p));
      }
      tests.push_back(make_single_test(mc_calibrate(null, Exponent::sup(), 0.05)));
      labels.push_back("sup");
      tests.push_back(calibrate_combined(null, ladder, ladder_budget(d, 0.05)));
      labels.push_back("psi_d");
      for (std::size_t t = 0; t < tests.size(); ++t) {
        save(tests[t], join(out, "calibration_d" + std::to_string(d) + "_" + slug(labels[t]) + ".txt"), manifest);
      }
      const auto plan = make_plan(o.plan, pow_reps, o.plan.seed);
      for (const auto& spec : families) {
        const auto family = AlternativeFamily::parse(spec);
        const auto grid = parse_a_grid(o.agrid, tests, family, d, plan);
        const auto table = power_curve(tests, family, grid, d, plan, labels);
        write_table(table, join(out, "power_" + slug(family.label()) + "_d" + std::to_string(d)), o.svg, manifest);
      }
    }
    return;
  }

  if (o.artifacts.empty()) throw ConfigError("power needs --artifact (one per test) or --figure3");
  if (o.families.empty()) throw ConfigError("power needs --family");
  std::vector<AnyTest> tests;
  for (const auto& path : o.artifacts) {
    tests.push_back(load_artifact(path));
    manifest.input("artifact_hash." + std::to_string(tests.size() - 1), file_hash(path));
  }
  const auto d = dimension_of(tests.front());
  for (std::size_t t = 0; t < tests.size(); ++t) {
    if (dimension_of(tests[t]) != d) {
      throw ConfigError("artifact '" + o.artifacts[t] + "' has d = " + std::to_string(dimension_of(tests[t])) +
                        ", first artifact has d = " + std::to_string(d));
    }
  }
  if (o.d > 0 && o.d != d) {
    throw ConfigError("--d " + std::to_string(o.d) + " does not match the artifacts' d = " + std::to_string(d));
  }
  const auto plan = make_plan(o.plan, o.plan.reps > 0 ? o.plan.reps : 2000, o.plan.seed);
  for (const auto& spec : o.families) {
    const auto family = AlternativeFamily::parse(spec);
    const auto grid = parse_a_grid(o.agrid, tests, family, d, plan);
    const auto table = power_curve(tests, family, grid, d, plan);
    write_table(table, join(out, "power_" + slug(family.label()) + "_d" + std::to_string(d)), o.svg, manifest);
  }
}

void run_consistency(const ConsistencyOptions& o, const std::string& out, RunManifest& manifest) {
  const int modes = o.contour + o.radius + o.rewrite + o.sparsity;
  if (modes > 1) throw ConfigError("choose at most one of --contour, --radius, --rewrite, --sparsity");

  auto exponent_arg = [&] {
    if (o.sup == !o.p.empty()) throw ConfigError("give exactly one of --p and --sup");
    return o.sup ? Exponent::sup() : Exponent::parse(o.p);
  };
  auto finite_p = [&] {
    const auto e = exponent_arg();
    if (e.is_sup()) throw ConfigError("this mode needs a finite --p");
    return e.value();
  };
  auto need_d = [&] {
    if (o.d < 1) throw ConfigError("--d is required");
    return o.d;
  };
  auto first_family = [&] {
    if (o.families.size() != 1) throw ConfigError("this mode needs exactly one --family");
    return AlternativeFamily::parse(o.families.front());
  };

  if (o.radius) {
    std::printf("%s\n", format_double(minimax_radius(finite_p(), need_d())).c_str());
    return;
  }
  if (o.contour) {
    const auto e = exponent_arg();
    const auto r = split(o.range, ':');
    if (r.size() != 2) throw ConfigError("--range lo:hi");
    const auto grid = contour_grid(e, parse_double(r[0]), parse_double(r[1]), o.resolution);
    const auto path = join(out, "contour_" + std::string(e.is_sup() ? "sup" : "p" + e.to_string()) + ".csv");
    {
      auto f = open_out(path);
      write_contour_csv(f, grid);
    }
    manifest.output(path);
    std::printf("contour %s: %d x %d grid on [%s]^2 -> %s\n", e.to_string().c_str(), o.resolution, o.resolution,
                o.range.c_str(), path.c_str());
    return;
  }
  if (o.rewrite) {
    const auto f = first_family();
    const auto parts = rewrite_check(f.theta(need_d()), finite_p());
    std::printf("family           %s, d = %lld, p = %s\n", f.label().c_str(), static_cast<long long>(o.d),
                o.p.c_str());
    std::printf("two_norm_part    %.10g\n", parts.two_norm_part);
    std::printf("p_norm_part      %.10g\n", parts.p_norm_part);
    std::printf("combined         %.10g\n", parts.combined);
    std::printf("criterion        %.10g\n", parts.criterion);
    return;
  }
  if (o.sparsity) {
    const auto f = first_family();
    const auto s = sparsity_diagnostic(f.theta(need_d()), o.delta, finite_p());
    std::printf("family           %s, d = %lld, delta = %g\n", f.label().c_str(), static_cast<long long>(o.d), o.delta);
    std::printf("exceed_frac      %.10g\n", s.exceed_frac);
    std::printf("max_abs          %.10g\n", s.max_abs);
    std::printf("delta_p_product  %.10g\n", s.delta_p_product);
    return;
  }

  if (o.families.empty()) throw ConfigError("consistency needs --family (or --contour, --radius)");
  const auto grid = parse_d_grid(o.dgrid);
  const auto exps = parse_exponents(o.exponents);
  std::vector<CriterionTrace> traces;
  for (const auto& spec : o.families) {
    const auto family = AlternativeFamily::parse(spec);
    for (const auto& e : exps) traces.push_back(trace(family, e, grid));
  }
  const auto tpath = join(out, "traces.csv"), spath = join(out, "slopes.csv");
  {
    auto f = open_out(tpath);
    write_traces_csv(f, traces);
  }
  {
    auto f = open_out(spath);
    write_slopes_csv(f, traces);
  }
  manifest.output(tpath);
  manifest.output(spath);
  std::printf("%-24s %-8s %12s %12s %12s\n", "family", "exponent", "slope", "first", "last");
  for (const auto& t : traces) {
    std::printf("%-24s %-8s %+12.5f %12.5g %12.5g%s\n", t.family.c_str(), t.exponent.to_string().c_str(),
                t.fitted_log_slope, t.values.front(), t.values.back(),
                std::find(t.saturated.begin(), t.saturated.end(), true) != t.saturated.end() ? "  (saturated)" : "");
  }
}

void run_demo_pe(const PeOptions& o, const std::string& out, RunManifest& manifest) {
  const auto r = pe_demo(o.d, o.alpha2, o.alpha_inf, make_plan(o.plan, o.calibration_reps, o.plan.seed + 1),
                         make_plan(o.plan, o.plan.reps, o.plan.seed));
  KeyValueFile kv;
  kv.set("d", r.d);
  kv.set("alpha2", r.alpha2);
  kv.set("alpha_inf", r.alpha_inf);
  kv.set("kappa2", r.kappa2);
  kv.set("kappa_inf", r.kappa_inf);
  kv.set("psi_c_d", r.combined.c_d);
  const std::vector<std::pair<const char*, RateEstimate>> rows = {
      {"two", r.two}, {"sup", r.sup}, {"max_comb", r.max_comb}, {"psi", r.psi}, {"p3", r.p3}, {"p4", r.p4}};
  std::printf("power against the semi-sparse array, d = %lld, R = %lld\n", static_cast<long long>(r.d),
              static_cast<long long>(r.psi.replications));
  for (const auto& [name, e] : rows) {
    kv.set(std::string("power.") + name, e.rate);
    kv.set(std::string("stderr.") + name, e.stderr_);
    std::printf("  %-9s %.4f (se %.4f)\n", name, e.rate, e.stderr_);
  }
  kv.set("union_bound_per_sample", std::string(r.union_bound_per_sample ? "true" : "false"));
  std::printf("  max-comb <= 2-norm + sup on every sample: %s\n", r.union_bound_per_sample ? "yes" : "no");
  const auto path = join(out, "pe_demo.txt");
  {
    auto f = open_out(path);
    kv.write(f);
  }
  manifest.output(path);
  save(r.combined, join(out, "pe_demo_psi.txt"), manifest);
}

void run_demo_enhance(const EnhanceOptions& o, const std::string& out, RunManifest& manifest) {
  TestSpec base;
  std::int64_t d = o.d;
  if (fs::exists(o.base)) {
    const auto any = load_artifact(o.base);
    if (std::holds_alternative<EnhancedTest>(any)) throw ConfigError("base artifact is already enhanced");
    std::visit(
        [&](const auto& t) {
          if constexpr (!std::is_same_v<std::decay_t<decltype(t)>, EnhancedTest>) base = t;
        },
        any);
    if (d > 0 && d != dimension_of(base)) throw ConfigError("--d does not match the base artifact");
    d = dimension_of(base);
    manifest.input("base_hash", file_hash(o.base));
  } else {
    if (d < 2) throw ConfigError("--d is required unless --base names an artifact file");
    const auto parts = split(o.base, ':');
    if (parts.size() == 2 && parts[0] == "p") {
      base = make_single_test(mc_calibrate(Exponent::parse(parts[1]), d, o.alpha,
                                           make_plan(o.plan, o.calibration_reps, o.plan.seed + 1)));
    } else if (parts.size() == 3 && parts[0] == "minimax") {
      base = build_minimax_adaptive(d, parse_double(parts[1]), static_cast<int>(parse_double(parts[2])));
    } else {
      throw ConfigError("--base must be an artifact path, p:<exponent> or minimax:<r_d>:<p_d>");
    }
  }
  const auto r = enhancement_demo(d, base, make_plan(o.plan));
  print_test(r.enhanced);
  std::printf("size          base %.4f (se %.4f), enhanced %.4f (se %.4f), bound on inflation %.4f\n", r.base_size.rate,
              r.base_size.stderr_, r.enhanced_size.rate, r.enhanced_size.stderr_, r.size_inflation_bound);
  std::printf("power at a_d  base %.4f, enhanced %.4f, floor %.4f\n", r.base_power.rate, r.enhanced_power.rate,
              r.power_floor);
  std::printf("domination    %lld samples where base rejects and enhanced does not\n",
              static_cast<long long>(r.domination_violations));

  KeyValueFile kv;
  kv.set("d", d);
  kv.set("coordinate", r.enhanced.coordinate);
  kv.set("a_d", r.enhanced.a_d);
  kv.set("size.base", r.base_size.rate);
  kv.set("size.enhanced", r.enhanced_size.rate);
  kv.set("size_inflation_bound", r.size_inflation_bound);
  kv.set("power.base", r.base_power.rate);
  kv.set("power.enhanced", r.enhanced_power.rate);
  kv.set("power_floor", r.power_floor);
  kv.set("domination_violations", r.domination_violations);
  const auto path = join(out, "enhance_demo.txt");
  {
    auto f = open_out(path);
    kv.write(f);
  }
  manifest.output(path);
  save(r.enhanced, join(out, "enhanced.txt"), manifest);
}

void run_reduce(const ReduceOptions& o, const std::string& out, RunManifest& manifest) {
  if (o.input.empty()) throw ConfigError("reduce needs --input");
  const auto data = read_regression_file(o.input);
  manifest.input("input_hash", file_hash(o.input));
  const auto v = regression_reduce(data.X, data.z, o.tol);
  const auto path = join(out, o.output);
  {
    auto f = open_out(path);
    for (double x : v) f << format_double(x) << '\n';
  }
  manifest.output(path);
  std::printf("reduced %lld observations on %lld regressors -> %s\n", static_cast<long long>(data.X.rows),
              static_cast<long long>(data.X.cols), path.c_str());
}

}  // namespace pnormtest
