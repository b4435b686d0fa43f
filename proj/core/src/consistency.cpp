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

#include "pnorm/consistency.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <regex>
#include <sstream>

#include "pnorm/errors.hpp"
#include "pnorm/keyvalue.hpp"

namespace pnorm {
namespace {

constexpr double kPhiFloor = 1e-300;

void require_dim(std::int64_t d, std::int64_t min) {
  if (d < min) throw DomainError("dimension " + std::to_string(d) + " below " + std::to_string(min));
}

double sup_ratio_term(double x) {
  const double lower = std_normal_ccdf(-x);
  if (lower < kPhiFloor) return -1.0;
  return std_normal_ccdf(x) / lower;
}

}  // namespace

std::int64_t dagger_support(std::int64_t d) {
  require_dim(d, 16);
  const double ld = std::log(static_cast<double>(d));
  return static_cast<std::int64_t>(std::ceil(std::sqrt(static_cast<double>(d)) / ld));
}

double dagger_height(std::int64_t d) {
  require_dim(d, 16);
  const double ld = std::log(static_cast<double>(d));
  return std::sqrt(2.0 * ld) / std::log(ld);
}

AlternativeFamily AlternativeFamily::dense(double a) { return {Kind::kDense, a}; }
AlternativeFamily AlternativeFamily::sparse(double a) { return {Kind::kSparse, a}; }
AlternativeFamily AlternativeFamily::dagger(double a) { return {Kind::kSemiSparseDagger, a}; }

AlternativeFamily AlternativeFamily::power_sparse(double p) {
  if (!(p > 0.0) || !std::isfinite(p)) throw DomainError("power-sparse family needs p > 0");
  return {Kind::kPowerSparse, p};
}

AlternativeFamily AlternativeFamily::custom(std::string label, Rule rule) {
  if (!rule) throw DomainError("custom family needs a rule");
  AlternativeFamily f(Kind::kCustom, 0.0);
  f.custom_label_ = std::move(label);
  f.rule_ = std::move(rule);
  return f;
}

AlternativeFamily AlternativeFamily::parse(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  const std::string scale = colon == std::string::npos ? "" : spec.substr(colon + 1);

  // sqrt(c*log) and c/sqrt(log), with c optional.
  static const std::regex grows(R"(sqrt\((?:([^*()]+)\*)?log\))");
  static const std::regex shrinks(R"(([^/()]+)/sqrt\(log\))");
  std::smatch m;
  ScaleRule rule;
  if (std::regex_match(scale, m, grows)) {
    const double c = m[1].matched ? parse_double(m[1].str()) : 1.0;
    rule = [c](std::int64_t d) { return std::sqrt(c * std::log(static_cast<double>(d))); };
  } else if (std::regex_match(scale, m, shrinks)) {
    const double c = parse_double(m[1].str());
    rule = [c](std::int64_t d) { return c / std::sqrt(std::log(static_cast<double>(d))); };
  }
  const double v = scale.empty() || rule ? 1.0 : parse_double(scale);

  AlternativeFamily f = [&] {
    if (name == "dense") return dense(v);
    if (name == "sparse") return sparse(v);
    if (name == "dagger" || name == "semi-sparse") return dagger(v);
    if (name == "power" || name == "power-sparse") {
      if (rule) throw ConfigError("power-sparse takes a number, got '" + scale + "'");
      return power_sparse(v);
    }
    throw ConfigError("unknown alternative family '" + spec + "'");
  }();
  return rule ? f.with_scale_rule(rule, scale) : f;
}

std::string AlternativeFamily::label() const {
  const std::string rule = scale_rule_ ? "[" + scale_label_ + "]" : "";
  switch (kind_) {
    case Kind::kDense:
      return "dense" + rule;
    case Kind::kSparse:
      return "sparse" + rule;
    case Kind::kSemiSparseDagger:
      return "dagger" + rule;
    case Kind::kPowerSparse:
      return "power-sparse(" + format_double(param_) + ")";
    case Kind::kCustom:
      return custom_label_;
  }
  return "";
}

std::vector<double> AlternativeFamily::theta(std::int64_t d) const {
  require_dim(d, 1);
  if (kind_ == Kind::kCustom) {
    auto t = rule_(d);
    if (static_cast<std::int64_t>(t.size()) != d) throw DomainError("custom rule returned wrong length");
    return t;
  }
  std::vector<double> t;
  t.reserve(static_cast<std::size_t>(d));
  for (const auto& a : atoms(d)) t.insert(t.end(), static_cast<std::size_t>(a.count), a.value);
  return t;
}

std::vector<Atom> AlternativeFamily::atoms(std::int64_t d) const {
  require_dim(d, 1);
  std::vector<Atom> out;
  auto push = [&](double v, std::int64_t n) {
    if (n > 0) out.push_back({v, n});
  };
  switch (kind_) {
    case Kind::kDense:
      push(scale_at(d), d);
      break;
    case Kind::kSparse:
      push(scale_at(d), 1);
      push(0.0, d - 1);
      break;
    case Kind::kSemiSparseDagger: {
      const auto k = std::min(dagger_support(d), d);
      push(scale_at(d) * dagger_height(d), k);
      push(0.0, d - k);
      break;
    }
    case Kind::kPowerSparse:
      push(std::pow(static_cast<double>(d), 1.0 / (2.0 * param_)), 1);
      push(0.0, d - 1);
      break;
    case Kind::kCustom:
      for (double v : theta(d)) {
        if (!out.empty() && out.back().value == v) {
          ++out.back().count;
        } else {
          out.push_back({v, 1});
        }
      }
      break;
  }
  return out;
}

AlternativeFamily AlternativeFamily::with_scale(double a) const {
  if (kind_ == Kind::kPowerSparse || kind_ == Kind::kCustom) {
    throw DomainError("family '" + label() + "' has no scale parameter");
  }
  AlternativeFamily f = *this;
  f.param_ = a;
  f.scale_rule_ = nullptr;
  f.scale_label_.clear();
  return f;
}

AlternativeFamily AlternativeFamily::with_scale_rule(ScaleRule a, std::string rule_label) const {
  if (kind_ == Kind::kPowerSparse || kind_ == Kind::kCustom) {
    throw DomainError("family '" + label() + "' has no scale parameter");
  }
  if (!a) throw DomainError("empty scale rule");
  AlternativeFamily f = *this;
  f.scale_rule_ = std::move(a);
  f.scale_label_ = std::move(rule_label);
  return f;
}

double criterion_finite(std::span<const double> theta, double p, double M) {
  if (!(p > 0.0)) throw DomainError("criterion needs p > 0");
  double s = 0.0;
  for (double x : theta) s += g_p(p, x, M);
  return s / std::sqrt(static_cast<double>(theta.size()));
}

double criterion_finite(std::span<const Atom> atoms, double p, double M) {
  if (!(p > 0.0)) throw DomainError("criterion needs p > 0");
  double s = 0.0;
  std::int64_t d = 0;
  for (const auto& a : atoms) {
    s += static_cast<double>(a.count) * g_p(p, a.value, M);
    d += a.count;
  }
  return s / std::sqrt(static_cast<double>(d));
}

double sup_ratio_cap() {
  static const double cap = [] {
    const double x0 = std_normal_quantile(kPhiFloor);
    return std_normal_ccdf(x0) / std_normal_cdf(x0);
  }();
  return cap;
}

SupCriterion criterion_sup(std::span<const double> theta) {
  if (theta.empty()) throw DomainError("criterion_sup needs d >= 1");
  const double c = centering_c(static_cast<std::int64_t>(theta.size()));
  SupCriterion out;
  // Alternatives repeat values heavily; reuse the last term.
  double last_abs = std::nan("");
  double last_ratio = 0.0;
  double last_g = 0.0;
  for (double v : theta) {
    const double a = std::fabs(v);
    if (a != last_abs) {
      last_abs = a;
      last_ratio = sup_ratio_term(c - a);
      if (last_ratio < 0.0) {
        last_ratio = sup_ratio_cap();
        out.saturated = true;
      }
      last_g = g_inf(c - a);
    }
    out.ratio_form += last_ratio;
    out.g_form += last_g;
  }
  return out;
}

SupCriterion criterion_sup(std::span<const Atom> atoms) {
  std::int64_t d = 0;
  for (const auto& a : atoms) d += a.count;
  if (d < 1) throw DomainError("criterion_sup needs d >= 1");
  const double c = centering_c(d);
  SupCriterion out;
  for (const auto& a : atoms) {
    const double x = c - std::fabs(a.value);
    double ratio = sup_ratio_term(x);
    if (ratio < 0.0) {
      ratio = sup_ratio_cap();
      out.saturated = true;
    }
    out.ratio_form += static_cast<double>(a.count) * ratio;
    out.g_form += static_cast<double>(a.count) * g_inf(x);
  }
  return out;
}

double log_log_slope(std::span<const std::int64_t> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("slope needs two or more points");
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(y[i] > 0.0) || !std::isfinite(y[i])) return std::nan("");
    mx += std::log(static_cast<double>(x[i]));
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(static_cast<double>(x[i])) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

CriterionTrace trace(const AlternativeFamily& family, Exponent exponent,
                     const std::vector<std::int64_t>& d_grid) {
  if (d_grid.empty() || d_grid.front() < 3) throw DomainError("d-grid must start at 3 or above");
  for (std::size_t i = 1; i < d_grid.size(); ++i) {
    if (d_grid[i] <= d_grid[i - 1]) throw DomainError("d-grid must be increasing");
  }
  CriterionTrace t;
  t.family = family.label();
  t.exponent = exponent;
  t.d_grid = d_grid;
  for (auto d : d_grid) {
    const auto theta = family.atoms(d);
    if (exponent.is_sup()) {
      const auto s = criterion_sup(std::span<const Atom>(theta));
      t.values.push_back(s.ratio_form);
      t.saturated.push_back(s.saturated);
    } else {
      t.values.push_back(criterion_finite(std::span<const Atom>(theta), exponent.value()));
      t.saturated.push_back(false);
    }
  }
  t.fitted_log_slope = d_grid.size() >= 2 ? log_log_slope(t.d_grid, t.values) : std::nan("");
  return t;
}

std::vector<std::int64_t> geometric_d_grid(double lo, double hi) {
  if (!(lo >= 1.0) || !(hi >= lo)) throw DomainError("geometric grid needs 1 <= lo <= hi");
  std::vector<std::int64_t> out;
  const int k0 = static_cast<int>(std::floor(4.0 * std::log10(lo))) - 1;
  for (int k = std::max(k0, 0);; ++k) {
    const auto v = static_cast<std::int64_t>(std::ceil(std::pow(10.0, k / 4.0) - 1e-9));
    if (static_cast<double>(v) > hi) break;
    if (static_cast<double>(v) >= lo && (out.empty() || v > out.back())) out.push_back(v);
  }
  return out;
}

std::vector<std::int64_t> parse_d_grid(const std::string& spec) {
  if (spec.rfind("geometric:", 0) == 0) {
    const auto rest = spec.substr(10);
    const auto colon = rest.find(':');
    if (colon == std::string::npos) throw ConfigError("expected geometric:<lo>:<hi>, got '" + spec + "'");
    return geometric_d_grid(parse_double(rest.substr(0, colon)), parse_double(rest.substr(colon + 1)));
  }
  std::vector<std::int64_t> out;
  for (double v : parse_double_list(spec)) {
    if (v != std::floor(v) || v < 1) throw ConfigError("d-grid entries must be positive integers");
    out.push_back(static_cast<std::int64_t>(v));
  }
  if (out.empty()) throw ConfigError("empty d-grid");
  return out;
}

RewriteParts rewrite_check(std::span<const double> theta, double p) {
  if (!(p > 0.0)) throw DomainError("rewrite_check needs p > 0");
  const double root_d = std::sqrt(static_cast<double>(theta.size()));
  RewriteParts r;
  for (double x : theta) {
    r.two_norm_part += x * x;
    r.p_norm_part += std::pow(std::fabs(x), p);
  }
  r.two_norm_part /= root_d;
  r.p_norm_part /= root_d;
  r.criterion = criterion_finite(theta, p);
  if (p >= 2.0) {
    r.combined = std::max(r.two_norm_part, r.p_norm_part);
    const double slack = 1e-12 * (r.two_norm_part + r.p_norm_part);
    if (r.criterion < 0.5 * r.combined - slack || r.criterion > r.two_norm_part + r.p_norm_part + slack) {
      throw InternalError("rewrite sandwich violated");
    }
  } else {
    r.combined = std::min(r.two_norm_part, r.p_norm_part);
  }
  return r;
}

std::vector<double> mixed_scale_array(std::int64_t d, double p) {
  require_dim(d, 2);
  const double dd = static_cast<double>(d);
  std::vector<double> t(static_cast<std::size_t>(d), std::pow(dd, -0.25));
  t.back() = std::pow(dd, 1.0 / (2.0 * p));
  return t;
}

SparsityDiagnostic sparsity_diagnostic(std::span<const double> theta, double delta, double p) {
  if (!(delta > 0.0)) throw DomainError("delta must be positive");
  SparsityDiagnostic s;
  std::int64_t count = 0;
  for (double x : theta) {
    const double a = std::fabs(x);
    if (a > delta) ++count;
    s.max_abs = std::max(s.max_abs, a);
  }
  s.exceed_frac = static_cast<double>(count) / std::sqrt(static_cast<double>(theta.size()));
  s.delta_p_product = std::pow(delta, p) * s.exceed_frac;
  return s;
}

double minimax_radius(double p, std::int64_t d) {
  if (!(p > 0.0)) throw DomainError("minimax_radius needs p > 0");
  require_dim(d, 1);
  const double dd = static_cast<double>(d);
  return p <= 2.0 ? std::pow(dd, (4.0 - p) / (4.0 * p)) : std::pow(dd, 1.0 / (2.0 * p));
}

ContourGrid contour_grid(Exponent exponent, double lo, double hi, int resolution) {
  if (resolution < 2) throw DomainError("contour resolution must be >= 2");
  if (!(hi > lo)) throw DomainError("contour range must be non-empty");
  ContourGrid g;
  g.exponent = exponent;
  const auto n = static_cast<std::size_t>(resolution);
  for (std::size_t i = 0; i < n; ++i) g.axis.push_back(lo + (hi - lo) * static_cast<double>(i) / (n - 1.0));
  std::vector<double> term(n);
  const double c2 = centering_c(2);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = g.axis[i];
    if (exponent.is_sup()) {
      const double r = sup_ratio_term(c2 - std::fabs(x));
      term[i] = r < 0.0 ? sup_ratio_cap() : r;
    } else {
      term[i] = g_p(exponent.value(), x) / std::sqrt(2.0);
    }
  }
  g.values.resize(n * n);
  for (std::size_t i2 = 0; i2 < n; ++i2) {
    for (std::size_t i1 = 0; i1 < n; ++i1) g.values[i2 * n + i1] = term[i1] + term[i2];
  }
  return g;
}

void write_traces_csv(std::ostream& out, const std::vector<CriterionTrace>& traces) {
  out << "family,exponent,d,value,saturated\n";
  for (const auto& t : traces) {
    for (std::size_t i = 0; i < t.d_grid.size(); ++i) {
      out << t.family << ',' << t.exponent.to_string() << ',' << t.d_grid[i] << ','
          << format_double(t.values[i]) << ',' << (t.saturated[i] ? 1 : 0) << '\n';
    }
  }
}

void write_slopes_csv(std::ostream& out, const std::vector<CriterionTrace>& traces) {
  out << "family,exponent,d_min,d_max,fitted_log_slope\n";
  for (const auto& t : traces) {
    out << t.family << ',' << t.exponent.to_string() << ',' << t.d_grid.front() << ',' << t.d_grid.back()
        << ',' << format_double(t.fitted_log_slope) << '\n';
  }
}

void write_contour_csv(std::ostream& out, const ContourGrid& grid) {
  out << "x1,x2,value\n";
  const std::size_t n = grid.axis.size();
  for (std::size_t i2 = 0; i2 < n; ++i2) {
    for (std::size_t i1 = 0; i1 < n; ++i1) {
      out << format_double(grid.axis[i1]) << ',' << format_double(grid.axis[i2]) << ','
          << format_double(grid.at(i1, i2)) << '\n';
    }
  }
}

}  // namespace pnorm
