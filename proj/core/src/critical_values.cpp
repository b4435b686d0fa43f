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

#include "pnorm/critical_values.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "pnorm/errors.hpp"
#include "pnorm/keyvalue.hpp"
#include "pnorm/norms.hpp"

namespace pnorm {
namespace {

void require_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0,1)");
}

}  // namespace

std::string to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::kAsymptoticFinite: return "asymptotic-finite";
    case ScheduleKind::kAsymptoticSup: return "asymptotic-sup";
    case ScheduleKind::kMonteCarloExact: return "monte-carlo-exact";
    case ScheduleKind::kAnalyticMinimax: return "analytic-minimax";
  }
  return "unknown";
}

ScheduleKind schedule_kind_from_string(const std::string& text) {
  for (auto k : {ScheduleKind::kAsymptoticFinite, ScheduleKind::kAsymptoticSup,
                 ScheduleKind::kMonteCarloExact, ScheduleKind::kAnalyticMinimax}) {
    if (to_string(k) == text) return k;
  }
  throw DomainError("unknown schedule kind '" + text + "'");
}

double CriticalValueSchedule::value(std::int64_t dim) const {
  switch (kind) {
    case ScheduleKind::kAsymptoticFinite: return asymptotic_kappa_finite(exponent.value(), dim, alpha);
    case ScheduleKind::kAsymptoticSup: return asymptotic_kappa_sup(dim, alpha);
    default:
      if (dim != d) throw DomainError("critical value was calibrated for a different dimension");
      return kappa;
  }
}

double asymptotic_kappa_finite(double p, std::int64_t d, double alpha) {
  require_alpha(alpha);
  if (d < 1) throw DomainError("dimension must be >= 1");
  const GaussMoments m = gauss_moments(p);
  const double dd = static_cast<double>(d);
  const double bracket = std_normal_quantile(1.0 - alpha) * std::sqrt(dd * m.sigma2_p) + dd * m.mu_p;
  if (!(bracket > 0.0)) {
    throw CalibrationError("asymptotic critical value undefined at this (p, d, alpha); "
                           "use the Monte-Carlo-exact schedule");
  }
  return std::pow(bracket, 1.0 / p);
}

double asymptotic_kappa_sup(std::int64_t d, double alpha) {
  require_alpha(alpha);
  if (d < 3) throw DomainError("asymptotic sup-norm critical value needs d >= 3");
  const double log_d = std::log(static_cast<double>(d));
  const double root = std::sqrt(2.0 * log_d);
  return root - (std::log(log_d) + std::log(4.0 * std::numbers::pi)) / (2.0 * root) -
         std::log(-std::log1p(-alpha) / 2.0) / root;
}

double minimax_kappa(double p, std::int64_t d, double r_d) {
  if (d < 1) throw DomainError("dimension must be >= 1");
  if (!(r_d >= 0.0) || !std::isfinite(r_d)) throw DomainError("minimax radius factor must be >= 0");
  const GaussMoments m = gauss_moments(p);
  const double dd = static_cast<double>(d);
  return std::pow(r_d * std::sqrt(dd * m.sigma2_p) + dd * m.mu_p, 1.0 / p);
}

CriticalValueSchedule asymptotic_schedule(Exponent p, std::int64_t d, double alpha) {
  CriticalValueSchedule s;
  s.exponent = p;
  s.alpha = alpha;
  s.d = d;
  if (p.is_sup()) {
    s.kind = ScheduleKind::kAsymptoticSup;
    s.kappa = asymptotic_kappa_sup(d, alpha);
    s.formula = "sqrt(2 log d) - (log log d + log 4pi)/(2 sqrt(2 log d)) - log(-log(1-alpha)/2)/sqrt(2 log d)";
  } else {
    s.kind = ScheduleKind::kAsymptoticFinite;
    s.kappa = asymptotic_kappa_finite(p.value(), d, alpha);
    s.formula = "(Phi^-1(1-alpha) sqrt(d sigma_p^2) + d mu_p)^(1/p)";
  }
  return s;
}

std::int64_t upper_quantile_rank(std::int64_t replications, double alpha) {
  require_alpha(alpha);
  // ceil(R(1-alpha)) == R - floor(R alpha). R alpha within rounding of an
  // integer is snapped to it (0.05 * 1e5 is 5000.000000000001).
  const double t = static_cast<double>(replications) * alpha;
  const double nearest = std::round(t);
  const double tail = std::fabs(t - nearest) <= 1e-9 * std::max(1.0, t) ? nearest : std::floor(t);
  return std::max<std::int64_t>(1, replications - static_cast<std::int64_t>(tail));
}

double empirical_upper_quantile(std::span<const double> values, double alpha) {
  if (values.empty()) throw DomainError("empirical quantile of an empty sample");
  std::vector<double> copy(values.begin(), values.end());
  const auto k = upper_quantile_rank(static_cast<std::int64_t>(copy.size()), alpha);
  auto nth = copy.begin() + (k - 1);
  std::nth_element(copy.begin(), nth, copy.end());
  return *nth;
}

NullStatistics::NullStatistics(std::vector<Exponent> exponents, std::int64_t d,
                               std::int64_t replications, McProvenance provenance,
                               std::vector<double> values)
    : exponents_(std::move(exponents)),
      d_(d),
      replications_(replications),
      provenance_(std::move(provenance)),
      values_(std::move(values)) {
  if (values_.size() != exponents_.size() * static_cast<std::size_t>(replications_)) {
    throw InternalError("NullStatistics: value matrix has the wrong size");
  }
}

std::span<const double> NullStatistics::row(std::int64_t r) const {
  const std::size_t m = exponents_.size();
  return std::span<const double>(values_).subspan(static_cast<std::size_t>(r) * m, m);
}

std::vector<double> NullStatistics::column(std::size_t k) const {
  const std::size_t m = exponents_.size();
  std::vector<double> out(static_cast<std::size_t>(replications_));
  for (std::size_t r = 0; r < out.size(); ++r) out[r] = values_[r * m + k];
  return out;
}

std::size_t NullStatistics::index_of(const Exponent& p) const {
  for (std::size_t k = 0; k < exponents_.size(); ++k) {
    if (exponents_[k] == p) return k;
  }
  throw DomainError("exponent " + p.to_string() + " not present in the null sample");
}

NullStatistics simulate_null(std::vector<Exponent> exponents, std::int64_t d,
                             const MonteCarloPlan& plan) {
  if (d < 1) throw DomainError("dimension must be >= 1");
  if (exponents.empty()) throw DomainError("simulate_null: no exponents requested");
  plan.validate();
  const NormBank bank(exponents);
  const std::size_t m = bank.size();
  std::vector<double> values(m * static_cast<std::size_t>(plan.replications));

  std::vector<std::vector<double>> eps(static_cast<std::size_t>(resolved_workers(plan)),
                                       std::vector<double>(static_cast<std::size_t>(d)));
  std::vector<NormBank::Workspace> ws(eps.size());
  for_each_chunk(plan, [&](const ChunkRange& chunk, Xoshiro256pp& rng, int worker) {
    auto& e = eps[static_cast<std::size_t>(worker)];
    for (std::int64_t r = chunk.first; r < chunk.first + chunk.count; ++r) {
      draw_errors(plan, rng, e);
      bank.evaluate(e, std::span<double>(values).subspan(static_cast<std::size_t>(r) * m, m),
                    ws[static_cast<std::size_t>(worker)]);
    }
  });
  McProvenance prov{plan.seed, plan.replications, plan.chunk_size, plan.sampler_label()};
  return NullStatistics(std::move(exponents), d, plan.replications, std::move(prov), std::move(values));
}

void check_calibration_budget(std::int64_t replications, double alpha) {
  require_alpha(alpha);
  if (replications < 1000) {
    throw ConfigError("Monte-Carlo calibration needs at least 1000 replications");
  }
  if (alpha * static_cast<double>(replications) < 10.0) {
    throw ConfigError("Monte-Carlo calibration needs alpha * replications >= 10 (alpha = " + format_double(alpha) +
                      ", replications = " + std::to_string(replications) + ")");
  }
}

CriticalValueSchedule mc_calibrate(const NullStatistics& null, Exponent p, double alpha) {
  check_calibration_budget(null.replications(), alpha);
  const auto col = null.column(null.index_of(p));
  CriticalValueSchedule s;
  s.kind = ScheduleKind::kMonteCarloExact;
  s.exponent = p;
  s.alpha = alpha;
  s.d = null.d();
  s.kappa = empirical_upper_quantile(col, alpha);
  s.mc = null.provenance();
  return s;
}

CriticalValueSchedule mc_calibrate(Exponent p, std::int64_t d, double alpha,
                                   const MonteCarloPlan& plan) {
  check_calibration_budget(plan.replications, alpha);
  return mc_calibrate(simulate_null({p}, d, plan), p, alpha);
}

}  // namespace pnorm
