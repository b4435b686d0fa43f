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

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "commands.hpp"
#include "pnorm/errors.hpp"
#include "pnorm/keyvalue.hpp"
#include "pnorm/manifest.hpp"

namespace {

using namespace pnormtest;

void add_plan(CLI::App* app, PlanOptions& p) {
  app->add_option("--seed", p.seed, "RNG seed")->capture_default_str();
  app->add_option("--reps", p.reps, "Monte Carlo replications")->capture_default_str();
  app->add_option("--chunk", p.chunk, "replications per RNG stream")->capture_default_str();
  app->add_option("--workers", p.workers, "worker threads (0 = hardware concurrency)")->capture_default_str();
}

// Splices `--key value` pairs from a config file in front of the user's
// arguments, skipping keys given on the command line. Manifests are valid
// config files: their `input.` prefix is stripped, outputs are ignored.
std::vector<std::string> with_config(const std::vector<std::string>& args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty() || args.empty()) return args;
  auto given = [&](const std::string& key) {
    for (const auto& a : args) {
      if (a == "--" + key || a.rfind("--" + key + "=", 0) == 0) return true;
    }
    return false;
  };
  std::vector<std::string> injected;
  const auto config = pnorm::KeyValueFile::read(path);
  for (const auto& [raw, value] : config.entries()) {
    if (raw.empty() || raw == "format" || raw == "command" || raw.rfind("output.", 0) == 0) continue;
    std::string key = raw.rfind("input.", 0) == 0 ? raw.substr(6) : raw;
    if (key.find('.') != std::string::npos || key == "config" || given(key)) continue;
    if (value == "false") continue;
    injected.push_back("--" + key + "=" + value);
  }
  std::vector<std::string> out = {args[0]};
  out.insert(out.end(), injected.begin(), injected.end());
  out.insert(out.end(), args.begin() + 1, args.end());
  return out;
}

void record(const CLI::App* sub, pnorm::RunManifest& manifest) {
  for (const auto* opt : sub->get_options()) {
    const auto name = opt->get_single_name();
    if (name.empty() || name == "help" || name == "config") continue;
    std::string value;
    if (opt->count() > 0) {
      if (opt->get_type_size() == 0) {
        value = "true";
      } else {
        for (const auto& r : opt->results()) value += (value.empty() ? "" : ",") + r;
      }
    } else {
      value = opt->get_default_str();
    }
    if (!value.empty()) manifest.input(name, value);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pnormtest: p-norm based tests in the Gaussian sequence model"};
  app.name("pnormtest");
  app.require_subcommand(1);
  std::string out = ".";

  CalibrateOptions cal;
  PowerOptions pow;
  ConsistencyOptions con;
  PeOptions pe;
  EnhanceOptions enh;
  ReduceOptions red;

  auto common = [&](CLI::App* s) {
    s->add_option("--out", out, "output directory")->capture_default_str();
    s->add_option("--config", "key = value file (a run manifest works)");
  };

  auto* c = app.add_subcommand("calibrate", "calibrate one test and write its artifact");
  c->add_option("--d", cal.d, "dimension");
  c->add_option("--alpha", cal.alpha)->capture_default_str();
  c->add_option("--p", cal.p, "single p-norm test, p >= 1 or inf");
  c->add_option("--preset", cal.preset, "combined test preset: sec6 (exponential ladder) or linear");
  c->add_option("--exponents", cal.exponents, "combined test exponents, comma separated");
  c->add_option("--budget", cal.budget, "alpha list or geometric:<delta0>:<gamma>");
  c->add_flag("--minimax", cal.minimax, "minimax-adaptive test");
  c->add_option("--pd", cal.pd, "largest exponent of the minimax-adaptive test");
  c->add_option("--rd", cal.rd, "radius r_d (default: simulated for size alpha)");
  c->add_flag("--asymptotic", cal.asymptotic, "use the limiting critical value");
  c->add_flag("--enhance", cal.enhance, "add the power enhancement component");
  c->add_option("--output", cal.output)->capture_default_str();
  add_plan(c, cal.plan);
  common(c);

  auto* p = app.add_subcommand("power", "power curves with common random numbers");
  p->add_flag("--figure3", pow.figure3, "the six-test comparison on dense, semi-sparse and sparse families");
  p->add_option("--scale", pow.scale, "desk or paper")->capture_default_str();
  p->add_option("--artifact", pow.artifacts, "calibrated test (repeatable)")->delimiter(',');
  p->add_option("--family", pow.families, "alternative family (repeatable)")->delimiter(',');
  p->add_option("--agrid", pow.agrid, "auto, auto:<n>, <lo>:<hi>:<n> or a list")->capture_default_str();
  p->add_option("--d", pow.d, "dimension");
  p->add_option("--calibration-reps", pow.calibration_reps, "null replications for --figure3");
  p->add_option("--svg", pow.svg, "also write SVG plots")->capture_default_str();
  add_plan(p, pow.plan);
  common(p);

  auto* k = app.add_subcommand("consistency", "consistency criteria, contours and radii");
  k->add_option("--family", con.families, "alternative family (repeatable)")->delimiter(',');
  k->add_option("--exponents", con.exponents, "comma separated, inf for sup")->capture_default_str();
  k->add_option("--dgrid", con.dgrid, "geometric:<lo>:<hi>[:n] or a list")->capture_default_str();
  k->add_flag("--contour", con.contour, "unit-level contour of g_p");
  k->add_flag("--radius", con.radius, "minimax critical radius");
  k->add_flag("--rewrite", con.rewrite, "two-norm / p-norm decomposition");
  k->add_flag("--sparsity", con.sparsity, "sparsity diagnostic");
  k->add_option("--p", con.p, "exponent");
  k->add_flag("--sup", con.sup, "sup-norm contour");
  k->add_option("--range", con.range, "contour axis lo:hi")->capture_default_str();
  k->add_option("--resolution", con.resolution)->capture_default_str();
  k->add_option("--d", con.d, "dimension");
  k->add_option("--delta", con.delta)->capture_default_str();
  common(k);

  auto* e = app.add_subcommand("demo-pe", "2-norm, sup and their max-combination against the semi-sparse array");
  e->add_option("--d", pe.d)->capture_default_str();
  e->add_option("--alpha2", pe.alpha2)->capture_default_str();
  e->add_option("--alpha-inf", pe.alpha_inf)->capture_default_str();
  e->add_option("--calibration-reps", pe.calibration_reps)->capture_default_str();
  add_plan(e, pe.plan);
  common(e);

  auto* h = app.add_subcommand("demo-enhance", "power enhancement of a base test");
  h->add_option("--d", enh.d, "dimension");
  h->add_option("--base", enh.base, "artifact path, p:<exponent> or minimax:<r_d>:<p_d>")->capture_default_str();
  h->add_option("--alpha", enh.alpha)->capture_default_str();
  h->add_option("--calibration-reps", enh.calibration_reps)->capture_default_str();
  add_plan(h, enh.plan);
  common(h);

  auto* r = app.add_subcommand("reduce", "reduce a linear regression to the sequence model");
  r->add_option("--input", red.input, "regression file");
  r->add_option("--output", red.output)->capture_default_str();
  r->add_option("--tol", red.tol, "relative eigenvalue tolerance")->capture_default_str();
  common(r);

  for (auto* s : app.get_subcommands({})) {
    for (auto* opt : s->get_options()) {
      if (opt->get_items_expected_max() == 1) opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    }
  }

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = with_config(args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : 2;
  } catch (const pnorm::ConfigError& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 2;
  }

  auto* sub = app.get_subcommands().front();
  pnorm::RunManifest manifest(sub->get_name());
  record(sub, manifest);

  try {
    std::filesystem::create_directories(out);
    const auto name = sub->get_name();
    if (name == "calibrate") run_calibrate(cal, out, manifest);
    if (name == "power") run_power(pow, out, manifest);
    if (name == "consistency") run_consistency(con, out, manifest);
    if (name == "demo-pe") run_demo_pe(pe, out, manifest);
    if (name == "demo-enhance") run_demo_enhance(enh, out, manifest);
    if (name == "reduce") run_reduce(red, out, manifest);
    const auto mpath = (std::filesystem::path(out) / (name + ".manifest.txt")).string();
    manifest.write(mpath);
  } catch (const pnorm::ConfigError& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 2;
  } catch (const pnorm::DomainError& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 2;
  } catch (const pnorm::NumericError& err) {
    std::fprintf(stderr, "numeric error: %s\n", err.what());
    return 3;
  } catch (const pnorm::CalibrationError& err) {
    std::fprintf(stderr, "calibration error: %s\n", err.what());
    return 3;
  } catch (const pnorm::LinearAlgebraError& err) {
    std::fprintf(stderr, "linear algebra error: %s\n", err.what());
    return 3;
  } catch (const std::exception& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 1;
  }
  return 0;
}
