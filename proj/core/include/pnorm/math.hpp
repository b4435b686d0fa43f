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

// Scalar kernel: Gaussian cdf/quantile, absolute Gaussian moments, the
// consistency functionals g_p and g_inf, and the sup-norm centering
// constants. Everything here is a pure function of its arguments.

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

namespace pnorm {

// Exponent of a norm statistic: a positive real p, or the supremum norm.
// The supremum is a distinct tag and never encoded as a large float.
class Exponent {
 public:
  // Throws DomainError unless p is finite and > 0.
  static Exponent finite(double p);
  static Exponent sup() { return Exponent(0.0, true); }

  bool is_sup() const { return sup_; }
  bool is_finite() const { return !sup_; }
  // The finite exponent; throws DomainError for the supremum norm.
  double value() const;

  // "inf" for the supremum norm, shortest round-trip decimal otherwise.
  std::string to_string() const;
  // Accepts "inf", "sup", "max" or a positive decimal.
  static Exponent parse(std::string_view text);

  friend bool operator==(const Exponent& a, const Exponent& b) {
    return a.sup_ == b.sup_ && (a.sup_ || a.p_ == b.p_);
  }

 private:
  Exponent(double p, bool sup) : p_(p), sup_(sup) {}
  double p_;
  bool sup_;
};

// E|Z|^p and Var|Z|^p for Z ~ N(0,1).
struct GaussMoments {
  double p;
  double mu_p;
  double sigma2_p;
};

// Phi(x). Throws DomainError on non-finite input.
double std_normal_cdf(double x);
// 1 - Phi(x), evaluated without cancellation for large x.
double std_normal_ccdf(double x);
// Phi^{-1}(q) for q in (0,1); |Phi(x) - q| <= 1e-12.
double std_normal_quantile(double q);
double std_normal_pdf(double x);

// E|Z|^r = Gamma((r+1)/2) 2^{r/2} / sqrt(pi), r > 0.
double abs_moment(double r);
// log E|Z|^r; usable where abs_moment overflows (r beyond ~300).
double log_abs_moment(double r);

// Throws NumericError if fewer than two significant digits of sigma2_p
// survive the subtraction E|Z|^{2p} - (E|Z|^p)^2.
GaussMoments gauss_moments(double p);

// x^2 on [-M, M], |x|^p outside.
double g_p(double p, double x, double M = 1.0);

// g_inf(x) = w(x) for x < 1 and exp(-x^2/2)/x for x >= 1.
//
// The weight w must be positive, continuous and blow up as x -> -inf. The
// default w(z) = exp((z^2 - 2z)/2) makes g_inf continuous and strictly
// decreasing on the whole line. A custom w is sanity-checked at
// construction by sampling and rejected with DomainError if it fails.
class GInfinity {
 public:
  using Weight = std::function<double(double)>;

  GInfinity();
  explicit GInfinity(Weight w);

  double operator()(double x) const;

  static double default_weight(double z);

 private:
  Weight w_;
};

// g_inf with the default weight.
double g_inf(double x);

// c_d = sqrt(2 log d) - log log d / (2 sqrt(2 log d)) for d >= 2, c_1 = 0.
double centering_c(std::int64_t d);

// exp(-2 exp(-x)): limit law of a_d [max|eps_i| - b_d].
double gumbel2_cdf(double x);
// Inverse of gumbel2_cdf: -log(-log(q)/2).
double gumbel2_quantile(double q);

}  // namespace pnorm
