#pragma once

// Self-verification suite for the analytic kernels. Each check draws its
// parameters from a fixed-seed generator, so reports are reproducible.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kschemo/kernels.hpp"

namespace kschemo::kernels {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::size_t trials = 0;
  std::size_t failures = 0;
  nlohmann::json detail;
};

namespace detail {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

}  // namespace detail

// Starting exactly at the threshold, y_200 < 1e-12 y0 for random (c, b, alpha).
inline CheckResult check_recursion_threshold(std::size_t trials = 1000, std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  CheckResult r{"recursion_threshold", false, trials, 0, {}};
  double worst = 0.0;
  nlohmann::json first_fail;
  for (std::size_t k = 0; k < trials; ++k) {
    RecursionParams p;
    p.c = std::exp(detail::uniform(rng, std::log(0.1), std::log(10.0)));
    p.b = 8.0 - 7.0 * detail::uniform(rng, 0.0, 1.0);  // (1, 8]
    p.alpha = detail::uniform(rng, 0.2, 3.0);
    p.y0 = recursion_threshold(p.c, p.b, p.alpha);
    const RecursionSequence seq = iterate_recursion(p, 200);
    const double ratio = seq.diverged ? INFINITY : seq.y.back() / p.y0;
    worst = std::max(worst, ratio);
    if (!(ratio < 1e-12)) {
      if (r.failures == 0) first_fail = {{"c", p.c}, {"b", p.b}, {"alpha", p.alpha}, {"y200_over_y0", ratio}};
      ++r.failures;
    }
  }
  r.passed = r.failures == 0;
  r.detail = {{"worst_y200_over_y0", worst}};
  if (!first_fail.is_null()) r.detail["first_failure"] = first_fail;
  return r;
}

// With eps at the bound: f(s0) <= -delta + 1e-12 and s1 <= s0 <= s2; then
// absorption_check accepts admissible synthetic h samples.
inline CheckResult check_absorption(std::size_t trials = 1000, std::size_t h_trials = 100, std::uint64_t seed = 2) {
  std::mt19937_64 rng(seed);
  CheckResult r{"absorption", false, trials + h_trials, 0, {}};
  double worst_excess = -INFINITY;
  std::size_t bound_failures = 0;
  for (std::size_t k = 0; k < trials; ++k) {
    AbsorptionParams p;
    p.delta = detail::uniform(rng, 0.05, 4.0);
    p.b = detail::uniform(rng, 0.01, 10.0);
    p.eps = absorption_eps_bound(p.delta, p.b);
    const AbsorptionBound bd = absorption_bound(p);
    const double fs0 = absorption_f(p, bd.s0);
    worst_excess = std::max(worst_excess, fs0 + p.delta);
    bool ok = fs0 <= -p.delta + 1e-12 && bd.roots.has_value();
    if (ok) ok = bd.roots->first <= bd.s0 && bd.s0 <= bd.roots->second;
    if (!ok) ++bound_failures;
  }
  std::size_t check_failures = 0;
  for (std::size_t k = 0; k < h_trials; ++k) {
    AbsorptionParams p;
    p.delta = detail::uniform(rng, 0.05, 4.0);
    p.b = detail::uniform(rng, 0.01, 10.0);
    p.eps = absorption_eps_bound(p.delta, p.b) * detail::uniform(rng, 0.2, 1.0);
    const AbsorptionBound bd = absorption_bound(p);
    const double s1 = bd.roots ? bd.roots->first : bd.s0;
    // A continuous function staying below s1 from a start below s1.
    std::vector<std::pair<double, double>> samples;
    double tau = 0.0;
    const int n = 20 + static_cast<int>(rng() % 100);
    for (int i = 0; i < n; ++i) {
      tau += detail::uniform(rng, 0.01, 1.0);
      samples.emplace_back(tau, s1 * detail::uniform(rng, 0.0, 0.999));
    }
    if (!absorption_check(samples, p).passed()) ++check_failures;
  }
  r.failures = bound_failures + check_failures;
  r.passed = r.failures == 0;
  r.detail = {{"worst_f_s0_plus_delta", worst_excess},
              {"bound_failures", bound_failures},
              {"absorption_check_failures", check_failures}};
  return r;
}

// gamma(s) -> 1/(m - q) as s grows.
inline CheckResult check_gamma_limit() {
  CheckResult r{"gamma_limit", false, 0, 0, {}};
  double worst = 0.0;
  for (double gap : {0.25, 0.5, 1.0, 2.0}) {
    for (int N : {2, 3, 4}) {
      const double q = 1.0;
      const double err = std::abs(gamma_exponent({1e6, q + gap, q, N}) - 1.0 / gap);
      worst = std::max(worst, err);
      ++r.trials;
      if (!(err <= 1e-3)) ++r.failures;
    }
  }
  r.passed = r.failures == 0;
  r.detail = {{"s", 1e6}, {"worst_abs_error", worst}};
  return r;
}

// 2 m_s < (N+2) q_s holds exactly when m > q + (q-1)/(N+1), for every s
// (checked at s and 10 s).
inline CheckResult check_h4_equivalence(std::size_t trials = 10000, std::uint64_t seed = 4) {
  std::mt19937_64 rng(seed);
  CheckResult r{"h4_equivalence", false, trials, 0, {}};
  for (std::size_t k = 0; k < trials; ++k) {
    const double m = detail::uniform(rng, 0.05, 4.0);
    const double q = detail::uniform(rng, 0.05, 3.0);
    const int N = 2 + static_cast<int>(rng() % 5);
    const double s = 100.0 - 100.0 * detail::uniform(rng, 0.0, 1.0);  // (0, 100]
    const H4Equivalence e = h4_equivalence(m, q, N, s);
    if (e.lhs != e.s_free || h4_equivalence(m, q, N, 10.0 * s).lhs != e.lhs) ++r.failures;
  }
  r.passed = r.failures == 0;
  r.detail = {{"mismatches", r.failures}};
  return r;
}

// q_s = m_s - (2q - m + s) agrees with 2(s+1)/N + 2(m - q). The error is
// measured relative to the operand scale max(|m_s|, |2q - m + s|), since q_s
// itself can vanish.
inline CheckResult check_qs_identity(std::size_t trials = 10000, std::uint64_t seed = 5) {
  std::mt19937_64 rng(seed);
  CheckResult r{"qs_identity", false, trials, 0, {}};
  double worst = 0.0;
  for (std::size_t k = 0; k < trials; ++k) {
    ExponentInputs in;
    in.m = detail::uniform(rng, 0.05, 4.0);
    in.q = detail::uniform(rng, 0.05, 3.0);
    in.N = 2 + static_cast<int>(rng() % 5);
    in.s = 100.0 - 100.0 * detail::uniform(rng, 0.0, 1.0);
    const MsQs e = exponent_ms_qs(in);
    const double scale = std::max(std::abs(e.m_s), std::abs(2.0 * in.q - in.m + in.s));
    const double rel = std::abs(e.q_s - exponent_qs_simplified(in)) / scale;
    worst = std::max(worst, rel);
    if (!(rel <= 1e-13)) ++r.failures;
  }
  r.passed = r.failures == 0;
  r.detail = {{"worst_rel_error", worst}};
  return r;
}

inline std::vector<CheckResult> run_kernel_checks() {
  return {check_recursion_threshold(), check_absorption(), check_gamma_limit(), check_h4_equivalence(),
          check_qs_identity()};
}

inline nlohmann::json to_json(const CheckResult& c) {
  return {{"name", c.name}, {"passed", c.passed}, {"trials", c.trials}, {"failures", c.failures}, {"detail", c.detail}};
}

}  // namespace kschemo::kernels
