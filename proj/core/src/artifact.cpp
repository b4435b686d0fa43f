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

#include "pnorm/artifact.hpp"

#include <fstream>
#include <sstream>

#include "pnorm/errors.hpp"

namespace pnorm {
namespace {

constexpr const char* kFormat = "pnorm-calibration/1";

std::string exponent_list(const std::vector<Exponent>& exps) {
  std::string s;
  for (std::size_t i = 0; i < exps.size(); ++i) {
    if (i) s += ' ';
    s += exps[i].to_string();
  }
  return s;
}

std::vector<Exponent> parse_exponents(const std::string& text) {
  std::vector<Exponent> out;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) out.push_back(Exponent::parse(tok));
  return out;
}

void write_provenance(KeyValueFile& kv, const McProvenance& p) {
  kv.set("seed", std::to_string(p.seed));
  kv.set("replications", p.replications);
  kv.set("chunk_size", p.chunk_size);
  kv.set("sampler", p.sampler);
}

McProvenance read_provenance(const KeyValueFile& kv) {
  McProvenance p;
  p.seed = std::stoull(kv.get("seed"));
  p.replications = kv.get_int("replications");
  p.chunk_size = kv.get_int("chunk_size");
  p.sampler = kv.get("sampler");
  return p;
}

void write_base(KeyValueFile& kv, const TestSpec& test, const std::string& kind_key) {
  std::visit(
      [&](const auto& t) {
        using T = std::decay_t<decltype(t)>;
        kv.set("d", t.d);
        if constexpr (std::is_same_v<T, SingleNormTest>) {
          kv.set(kind_key, std::string("single"));
          kv.set("exponent", t.exponent.to_string());
          kv.set("alpha", t.schedule.alpha);
          kv.set("kappa", t.kappa);
          kv.set("schedule", to_string(t.schedule.kind));
          if (t.schedule.mc) write_provenance(kv, *t.schedule.mc);
        } else if constexpr (std::is_same_v<T, CombinedTest>) {
          kv.set(kind_key, std::string("combined"));
          kv.set("exponents", exponent_list(t.exponents));
          kv.set("alphas", t.budget.alphas);
          kv.set("budget", std::string(t.budget.generator == AlphaBudget::Generator::kGeometric ? "geometric"
                                                                                               : "custom"));
          if (t.budget.generator == AlphaBudget::Generator::kGeometric) {
            kv.set("delta0", t.budget.delta0);
            kv.set("gamma", t.budget.gamma);
          }
          kv.set("target_alpha", t.target_alpha);
          kv.set("kappas", t.kappas);
          kv.set("c_d", t.c_d);
          kv.set("calibration_size", t.calibration_size);
          write_provenance(kv, t.provenance);
        } else {
          kv.set(kind_key, std::string("minimax"));
          kv.set("r_d", t.r_d);
          kv.set("p_d", static_cast<std::int64_t>(t.p_d));
          kv.set("kappas", t.kappas);
        }
      },
      test);
}

TestSpec read_base(const KeyValueFile& kv, const std::string& kind) {
  const std::int64_t d = kv.get_int("d");
  if (kind == "single") {
    CriticalValueSchedule s;
    s.kind = schedule_kind_from_string(kv.get("schedule"));
    s.exponent = Exponent::parse(kv.get("exponent"));
    s.alpha = kv.get_double("alpha");
    s.d = d;
    s.kappa = kv.get_double("kappa");
    if (kv.has("seed")) s.mc = read_provenance(kv);
    return make_single_test(s);
  }
  if (kind == "combined") {
    CombinedTest t;
    t.d = d;
    t.exponents = parse_exponents(kv.get("exponents"));
    if (kv.get("budget") == "geometric") {
      t.budget.generator = AlphaBudget::Generator::kGeometric;
      t.budget.delta0 = kv.get_double("delta0");
      t.budget.gamma = kv.get_double("gamma");
    }
    t.budget.alphas = kv.get_doubles("alphas");
    t.budget.total = kv.get_double("target_alpha");
    t.target_alpha = t.budget.total;
    t.kappas = kv.get_doubles("kappas");
    t.c_d = kv.get_double("c_d");
    t.calibration_size = kv.get_double("calibration_size");
    t.provenance = read_provenance(kv);
    if (t.kappas.size() != t.exponents.size() || t.budget.alphas.size() != t.exponents.size()) {
      throw ConfigError("combined artifact: exponents, alphas and kappas differ in length");
    }
    return t;
  }
  if (kind == "minimax") {
    MinimaxAdaptiveTest t;
    t.d = d;
    t.r_d = kv.get_double("r_d");
    t.p_d = static_cast<int>(kv.get_int("p_d"));
    t.kappas = kv.get_doubles("kappas");
    if (static_cast<int>(t.kappas.size()) != t.p_d) throw ConfigError("minimax artifact: kappas length != p_d");
    return t;
  }
  throw ConfigError("unknown test kind '" + kind + "'");
}

}  // namespace

KeyValueFile to_artifact(const AnyTest& test) {
  KeyValueFile kv;
  kv.set("format", std::string(kFormat));
  if (const auto* e = std::get_if<EnhancedTest>(&test)) {
    kv.set("kind", std::string("enhanced"));
    write_base(kv, e->base, "base_kind");
    kv.set("coordinate", e->coordinate);
    kv.set("a_d", e->a_d);
    kv.set("nu_threshold", e->nu_threshold);
    return kv;
  }
  const TestSpec base = std::visit(
      [](const auto& t) -> TestSpec {
        if constexpr (std::is_same_v<std::decay_t<decltype(t)>, EnhancedTest>) {
          return t.base;
        } else {
          return t;
        }
      },
      test);
  write_base(kv, base, "kind");
  return kv;
}

AnyTest from_artifact(const KeyValueFile& kv) {
  if (kv.get("format") != kFormat) throw ConfigError("unsupported artifact format '" + kv.get("format") + "'");
  const std::string kind = kv.get("kind");
  if (kind == "enhanced") {
    EnhancedTest e;
    e.base = read_base(kv, kv.get("base_kind"));
    e.d = kv.get_int("d");
    e.coordinate = kv.get_int("coordinate");
    e.a_d = kv.get_double("a_d");
    e.nu_threshold = kv.get_double("nu_threshold");
    if (e.coordinate < 0 || e.coordinate >= e.d) throw ConfigError("enhanced artifact: coordinate out of range");
    return e;
  }
  return std::visit([](auto&& t) -> AnyTest { return t; }, read_base(kv, kind));
}

void save_artifact(const AnyTest& test, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  to_artifact(test).write(out);
}

AnyTest load_artifact(const std::string& path) { return from_artifact(KeyValueFile::read(path)); }

}  // namespace pnorm
