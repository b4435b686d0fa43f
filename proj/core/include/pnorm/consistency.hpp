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

// Alternative arrays theta_d and the finite-d consistency functionals
// d^{-1/2} sum g_p(theta_i) and sum Phibar(c_d - |theta_i|)/Phi(c_d - |theta_i|).
// Divergence is reported as a trace over a d-grid with a fitted log-log
// slope; nothing here issues a "consistent" verdict.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "pnorm/math.hpp"

namespace pnorm {

// A value and how many coordinates of theta_d carry it.
struct Atom {
  double value;
  std::int64_t count;
};

class AlternativeFamily {
 public:
  enum class Kind { kDense, kSparse, kSemiSparseDagger, kPowerSparse, kCustom };
  using Rule = std::function<std::vector<double>(std::int64_t)>;
  using ScaleRule = std::function<double(std::int64_t)>;

  // a (1, ..., 1)
  static AlternativeFamily dense(double a);
  // a (1, 0, ..., 0)
  static AlternativeFamily sparse(double a);
  // k_d = ceil(sqrt(d)/log d) leading entries a tau_d, tau_d =
  // sqrt(2 log d)/log log d. Needs d >= 16.
  static AlternativeFamily dagger(double a);
  // (d^{1/(2p)}, 0, ..., 0)
  static AlternativeFamily power_sparse(double p);
  static AlternativeFamily custom(std::string label, Rule rule);

  // "dense:<a>", "sparse:<a>", "dagger:<a>", "power:<p>"; a defaults to 1.
  // The scale may also depend on d: "sqrt(<c>*log)" is sqrt(c log d) and
  // "<c>/sqrt(log)" is c/sqrt(log d), e.g. "sparse:sqrt(3*log)".
  static AlternativeFamily parse(const std::string& spec);

  Kind kind() const { return kind_; }
  double parameter() const { return param_; }
  std::string label() const;

  std::vector<double> theta(std::int64_t d) const;
  // theta_d as (value, multiplicity) pairs, zeros included; counts sum to
  // d. Never materialises theta_d for the built-in shapes.
  std::vector<Atom> atoms(std::int64_t d) const;

  // Same shape at another scale. Only for dense, sparse and dagger.
  AlternativeFamily with_scale(double a) const;
  // Same shape with a dimension-dependent scale a(d), e.g. 1/sqrt(log d).
  // `rule_label` names a(d) in labels: "dense[<rule_label>]".
  AlternativeFamily with_scale_rule(ScaleRule a, std::string rule_label) const;

 private:
  AlternativeFamily(Kind k, double param) : kind_(k), param_(param) {}
  double scale_at(std::int64_t d) const { return scale_rule_ ? scale_rule_(d) : param_; }
  Kind kind_;
  double param_;
  std::string custom_label_;
  Rule rule_;
  ScaleRule scale_rule_;
  std::string scale_label_;
};

std::int64_t dagger_support(std::int64_t d);  // k_d
double dagger_height(std::int64_t d);         // tau_d

// d^{-1/2} sum_i g_p(theta_i; M).
double criterion_finite(std::span<const double> theta, double p, double M = 1.0);
double criterion_finite(std::span<const Atom> atoms, double p, double M = 1.0);

struct SupCriterion {
  double ratio_form = 0.0;  // sum Phibar(c_d - |theta_i|) / Phi(c_d - |theta_i|)
  double g_form = 0.0;      // sum g_inf(c_d - |theta_i|)
  bool saturated = false;   // some ratio term hit the underflow cap
};

// Ratio terms whose denominator falls below 1e-300 are replaced by the cap
// Phibar(x0)/Phi(x0), Phi(x0) = 1e-300, and `saturated` is set.
SupCriterion criterion_sup(std::span<const double> theta);
SupCriterion criterion_sup(std::span<const Atom> atoms);
double sup_ratio_cap();

struct CriterionTrace {
  std::string family;
  Exponent exponent = Exponent::sup();
  std::vector<std::int64_t> d_grid;
  std::vector<double> values;
  std::vector<bool> saturated;  // sup only
  double fitted_log_slope = 0.0;  // NaN if some value is <= 0
};

// Finite exponents use criterion_finite with M = 1, the sup norm uses the
// ratio form. d_grid must be increasing with minimum >= 3. Evaluated on
// atoms, so grids may reach d ~ 1e15 for the built-in shapes.
CriterionTrace trace(const AlternativeFamily& family, Exponent exponent,
                     const std::vector<std::int64_t>& d_grid);

// Least-squares slope of log(y) on log(x).
double log_log_slope(std::span<const std::int64_t> x, std::span<const double> y);

// {ceil(10^{k/4})} restricted to [lo, hi].
std::vector<std::int64_t> geometric_d_grid(double lo, double hi);
// "geometric:<lo>:<hi>" or a comma separated list of integers.
std::vector<std::int64_t> parse_d_grid(const std::string& spec);

struct RewriteParts {
  double two_norm_part = 0.0;  // ||theta||_2^2 / sqrt d
  double p_norm_part = 0.0;    // ||theta||_p^p / sqrt d
  double combined = 0.0;       // max of the parts for p >= 2, min for p < 2
  double criterion = 0.0;      // criterion_finite(theta, p)
};

// For p >= 2 throws InternalError unless max(parts)/2 <= criterion <= sum(parts).
RewriteParts rewrite_check(std::span<const double> theta, double p);

// theta_i = d^{-1/4} for i < d, theta_d = d^{1/(2p)}: for p < 2 both parts
// of the min-form grow with d while the criterion stays below 2.
std::vector<double> mixed_scale_array(std::int64_t d, double p);

struct SparsityDiagnostic {
  double exceed_frac = 0.0;      // #{|theta_i| > delta} / sqrt d
  double max_abs = 0.0;
  double delta_p_product = 0.0;  // delta^p * exceed_frac
};

SparsityDiagnostic sparsity_diagnostic(std::span<const double> theta, double delta, double p);

// d^{(4-p)/(4p)} for p <= 2, d^{1/(2p)} for p > 2.
double minimax_radius(double p, std::int64_t d);

struct ContourGrid {
  Exponent exponent = Exponent::sup();
  std::vector<double> axis;    // shared by x1 and x2
  std::vector<double> values;  // values[i2 * n + i1]
  double at(std::size_t i1, std::size_t i2) const { return values[i2 * axis.size() + i1]; }
};

// d = 2 criterion over [lo, hi]^2: (g_p(x1) + g_p(x2))/sqrt 2 for finite p,
// the two-term ratio form with c_2 for the sup norm.
ContourGrid contour_grid(Exponent exponent, double lo, double hi, int resolution);

// CSV writers. Columns:
//   traces:   family,exponent,d,value,saturated
//   slopes:   family,exponent,d_min,d_max,fitted_log_slope
//   contour:  x1,x2,value
void write_traces_csv(std::ostream& out, const std::vector<CriterionTrace>& traces);
void write_slopes_csv(std::ostream& out, const std::vector<CriterionTrace>& traces);
void write_contour_csv(std::ostream& out, const ContourGrid& grid);

}  // namespace pnorm
