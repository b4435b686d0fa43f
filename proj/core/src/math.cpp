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

#include "pnorm/math.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "pnorm/errors.hpp"

namespace pnorm {
namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kInvSqrt2Pi = 0.3989422804014326779399460599343818684759;

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) {
    throw DomainError(std::string(what) + ": argument must be finite");
  }
}

double log_gamma(double x) {
#if defined(__GLIBC__) || defined(__APPLE__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

// Wichura, AS241 (PPND16). Relative accuracy about 1e-16.
double ppnd16(double p) {
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((r * 2509.0809287301226727 + 33430.575583588128105) * r +
                 67265.770927008700853) * r + 45921.953931549871457) * r +
               13731.693765509461125) * r + 1971.5909503065514427) * r +
             133.14166789178437745) * r + 3.387132872796366608) /
           (((((((r * 5226.495278852545925 + 28729.085735721942674) * r +
                 39307.89580009271061) * r + 21213.794301586595867) * r +
               5394.1960214247511077) * r + 687.1870074920579083) * r +
             42.313330701600911252) * r + 1.0);
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((r * 7.7454501427834140764e-4 + 0.0227238449892691845833) * r +
                0.24178072517745061177) * r + 1.27045825245236838258) * r +
              3.64784832476320460504) * r + 5.7694972214606914055) * r +
            4.6303378461565452959) * r + 1.42343711074968357734) /
          (((((((r * 1.05075007164441684324e-9 + 5.475938084995344946e-4) * r +
                0.0151986665636164571966) * r + 0.14810397642748007459) * r +
              0.68976733498510000455) * r + 1.6763848301838038494) * r +
            2.05319162663775882187) * r + 1.0);
  } else {
    r -= 5.0;
    val = (((((((r * 2.01033439929228813265e-7 + 2.71155556874348757815e-5) * r +
                0.0012426609473880784386) * r + 0.026532189526576123093) * r +
              0.29656057182850489123) * r + 1.7848265399172913358) * r +
            5.4637849111641143699) * r + 6.6579046435011037772) /
          (((((((r * 2.04426310338993978564e-15 + 1.4215117583164458887e-7) * r +
                1.8463183175100546818e-5) * r + 7.868691311456132591e-4) * r +
              0.0148753612908506148525) * r + 0.13692988092273580531) * r +
            0.59983220655588793769) * r + 1.0);
  }
  return q < 0.0 ? -val : val;
}

}  // namespace

Exponent Exponent::finite(double p) {
  if (!(std::isfinite(p) && p > 0.0)) {
    throw DomainError("exponent must be a finite positive real, got " + std::to_string(p));
  }
  return Exponent(p, false);
}

double Exponent::value() const {
  if (sup_) throw DomainError("supremum norm has no finite exponent");
  return p_;
}

std::string Exponent::to_string() const {
  if (sup_) return "inf";
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), p_);
  return std::string(buf.data(), res.ptr);
}

Exponent Exponent::parse(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text == "inf" || text == "sup" || text == "max" || text == "Inf" || text == "infinity") {
    return sup();
  }
  double p = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), p);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw DomainError("cannot parse exponent '" + std::string(text) + "'");
  }
  return finite(p);
}

double std_normal_cdf(double x) {
  require_finite(x, "std_normal_cdf");
  return 0.5 * std::erfc(-x / kSqrt2);
}

double std_normal_ccdf(double x) {
  require_finite(x, "std_normal_ccdf");
  return 0.5 * std::erfc(x / kSqrt2);
}

double std_normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double std_normal_quantile(double q) {
  if (!(q > 0.0 && q < 1.0)) {
    throw DomainError("std_normal_quantile: probability must lie in (0,1)");
  }
  double x = ppnd16(q);
  // One Newton step against the library cdf; the residual is taken on the
  // smaller tail so it keeps relative accuracy.
  const double dens = std_normal_pdf(x);
  if (dens > 0.0) {
    const double resid = q < 0.5 ? std_normal_cdf(x) - q : (1.0 - q) - std_normal_ccdf(x);
    x -= resid / dens;
  }
  return x;
}

double log_abs_moment(double r) {
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw DomainError("abs_moment: order must be a finite positive real");
  }
  return log_gamma(0.5 * (r + 1.0)) + 0.5 * r * std::numbers::ln2 - 0.5 * std::log(std::numbers::pi);
}

double abs_moment(double r) { return std::exp(log_abs_moment(r)); }

GaussMoments gauss_moments(double p) {
  if (!(p > 0.0) || !std::isfinite(p)) {
    throw DomainError("gauss_moments: exponent must be a finite positive real");
  }
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  const double log_mu = log_abs_moment(p);
  const double log_m2 = log_abs_moment(2.0 * p);
  GaussMoments out{p, std::exp(log_mu), 0.0};
  double rel_left;  // sigma2 / E|Z|^{2p}
  double rel_err;   // rounding error of that quantity
  if (p > 30.0) {
    const double gap = 2.0 * log_mu - log_m2;
    rel_left = -std::expm1(gap);
    rel_err = 4.0 * kEps * (std::fabs(2.0 * log_mu) + std::fabs(log_m2) + 1.0);
    out.sigma2_p = std::exp(log_m2) * rel_left;
  } else {
    const double m2 = std::exp(log_m2);
    out.sigma2_p = m2 - out.mu_p * out.mu_p;
    rel_left = out.sigma2_p / m2;
    rel_err = 8.0 * kEps * (std::fabs(log_m2) + 1.0);
  }
  if (!(out.sigma2_p > 0.0) || rel_left < 100.0 * rel_err) {
    throw NumericError("gauss_moments: variance of |Z|^p lost all significant digits at p = " +
                       std::to_string(p));
  }
  return out;
}

double g_p(double p, double x, double M) {
  const double ax = std::fabs(x);
  return ax <= M ? x * x : std::pow(ax, p);
}

double GInfinity::default_weight(double z) { return std::exp(0.5 * (z * z - 2.0 * z)); }

GInfinity::GInfinity() : w_(&GInfinity::default_weight) {}

GInfinity::GInfinity(Weight w) : w_(std::move(w)) {
  if (!w_) throw DomainError("g_inf: weight function is empty");
  // Positive and finite on a sampling grid of (-10, 1). Each grid cell is
  // bisected toward its larger half-change; a jump survives down to a width
  // of ~1e-14, a continuous function does not.
  constexpr double kStep = 0.05;
  for (double z = -10.0; z < 1.0; z += kStep) {
    const double v = w_(z);
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw DomainError("g_inf: weight must be positive and finite on (-10, 1)");
    }
    double a = z, b = z + kStep, wa = v, wb = w_(b);
    for (int it = 0; it < 40; ++it) {
      const double mid = 0.5 * (a + b);
      const double wm = w_(mid);
      if (std::fabs(wm - wa) >= std::fabs(wb - wm)) {
        b = mid;
        wb = wm;
      } else {
        a = mid;
        wa = wm;
      }
    }
    if (!(std::fabs(wb - wa) <= 1e-6 * std::max(1.0, std::fabs(wa)))) {
      throw DomainError("g_inf: weight appears discontinuous near z = " + std::to_string(a));
    }
  }
  // Growth toward -inf.
  double prev = w_(-5.0);
  for (double z : {-10.0, -20.0, -40.0, -80.0}) {
    const double v = w_(z);
    if (!(v > prev) && !(std::isinf(v) && std::isinf(prev))) {
      throw DomainError("g_inf: weight must increase without bound as z -> -inf");
    }
    prev = v;
  }
}

double GInfinity::operator()(double x) const {
  require_finite(x, "g_inf");
  if (x < 1.0) return w_(x);
  return std::exp(-0.5 * x * x) / x;
}

double g_inf(double x) {
  require_finite(x, "g_inf");
  if (x < 1.0) return GInfinity::default_weight(x);
  return std::exp(-0.5 * x * x) / x;
}

double centering_c(std::int64_t d) {
  if (d <= 0) throw DomainError("centering_c: dimension must be positive");
  if (d == 1) return 0.0;
  const double two_log_d = 2.0 * std::log(static_cast<double>(d));
  const double root = std::sqrt(two_log_d);
  return root - std::log(0.5 * two_log_d) / (2.0 * root);
}

double gumbel2_cdf(double x) {
  require_finite(x, "gumbel2_cdf");
  return std::exp(-2.0 * std::exp(-x));
}

double gumbel2_quantile(double q) {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("gumbel2_quantile: probability must lie in (0,1)");
  return -std::log(-std::log(q) / 2.0);
}

}  // namespace pnorm
