#pragma once

// Closed-form machinery behind the a-priori estimates: the superlinear
// recursion lemma, the continuous absorption lemma, and the exponent formulas
// of the De Giorgi argument.

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace kschemo::kernels {

// --- recursion y_{n+1} <= c b^n y_n^{1+alpha} --------------------------------

struct RecursionParams {
  double c = 1.0;
  double b = 2.0;
  double alpha = 1.0;
  double y0 = 0.0;
};

inline void validate(const RecursionParams& p) {
  if (!(p.c > 0.0)) throw std::domain_error("recursion: c must be > 0");
  if (!(p.b > 1.0)) throw std::domain_error("recursion: b must be > 1");
  if (!(p.alpha > 0.0)) throw std::domain_error("recursion: alpha must be > 0");
  if (!(p.y0 >= 0.0)) throw std::domain_error("recursion: y0 must be >= 0");
}

// Largest y0 for which the recursion is guaranteed to drive y_n to zero.
inline double recursion_threshold(double c, double b, double alpha) {
  validate(RecursionParams{c, b, alpha, 0.0});
  return std::pow(c, -1.0 / alpha) * std::pow(b, -1.0 / (alpha * alpha));
}

struct RecursionSequence {
  std::vector<double> y;
  bool diverged = false;  // overflowed before n_steps
};

// The extremal sequence y_{n+1} = c b^n y_n^{1+alpha}.
//
// Iterated in coordinates relative to the threshold profile: writing
// y_n = y* b^{-n/alpha} z_n with y* = recursion_threshold(c, b, alpha), the
// recursion becomes z_{n+1} = z_n^{1+alpha}, z_0 = y0/y*. The direct form
// amplifies rounding by (1+alpha)^n and cannot resolve the threshold itself.
inline RecursionSequence iterate_recursion(const RecursionParams& p, int n_steps) {
  validate(p);
  RecursionSequence out;
  out.y.reserve(static_cast<std::size_t>(n_steps) + 1);
  if (p.y0 == 0.0) {
    out.y.assign(static_cast<std::size_t>(n_steps) + 1, 0.0);
    return out;
  }
  const double log_star = std::log(recursion_threshold(p.c, p.b, p.alpha));
  const double log_b = std::log(p.b);
  const double log_max = std::log(std::numeric_limits<double>::max());
  double log_z = std::log(p.y0) - log_star;
  for (int n = 0; n <= n_steps; ++n) {
    const double log_y = log_star - n * log_b / p.alpha + log_z;
    if (!(log_y < log_max)) {
      out.diverged = true;
      break;
    }
    out.y.push_back(std::exp(log_y));
    log_z *= 1.0 + p.alpha;
  }
  return out;
}

// --- absorption: h <= eps h^{1+delta} + b ------------------------------------

struct AbsorptionParams {
  double eps = 1.0;
  double delta = 1.0;
  double b = 1.0;
};

inline void validate(const AbsorptionParams& p) {
  if (!(p.eps > 0.0) || !(p.delta > 0.0) || !(p.b > 0.0)) {
    throw std::domain_error("absorption: eps, delta and b must be > 0");
  }
}

// f(s) = eps s^{1+delta} - s + b
inline double absorption_f(const AbsorptionParams& p, double s) {
  return p.eps * std::pow(s, 1.0 + p.delta) - s + p.b;
}

// Largest eps for which the absorption argument closes.
inline double absorption_eps_bound(double delta, double b) {
  return std::pow(delta, delta) / (std::pow(b + delta, delta) * std::pow(1.0 + delta, 1.0 + delta));
}

struct AbsorptionBound {
  double s0 = 0.0;            // argmin of f, and the bound on h
  double eps_bound = 0.0;
  bool condition_f1_holds = false;
  double f_at_s0 = 0.0;       // closed-form minimum value
  std::optional<std::pair<double, double>> roots;  // s1 < s0 < s2
};

namespace detail {

inline double bisect(const AbsorptionParams& p, double lo, double hi, double tol) {
  // f(lo) and f(hi) have opposite signs.
  const bool lo_positive = absorption_f(p, lo) > 0.0;
  double best = lo;
  double best_abs = std::abs(absorption_f(p, lo));
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = absorption_f(p, mid);
    if (std::abs(fm) < best_abs) {
      best = mid;
      best_abs = std::abs(fm);
    }
    if (best_abs <= tol * 1e-3) break;
    if ((fm > 0.0) == lo_positive) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return best;
}

}  // namespace detail

inline AbsorptionBound absorption_bound(const AbsorptionParams& p) {
  validate(p);
  AbsorptionBound out;
  const double e1d = p.eps * (1.0 + p.delta);
  out.s0 = std::pow(e1d, -1.0 / p.delta);
  out.eps_bound = absorption_eps_bound(p.delta, p.b);
  out.condition_f1_holds = p.eps <= out.eps_bound;
  out.f_at_s0 = p.b - p.delta / (std::pow(p.eps, 1.0 / p.delta) *
                                 std::pow(1.0 + p.delta, (1.0 + p.delta) / p.delta));

  if (!(absorption_f(p, out.s0) < 0.0)) return out;  // f > 0 everywhere: no roots

  const double tol = 1e-12 * (1.0 + p.b);
  const double s1 = detail::bisect(p, 0.0, out.s0, tol);
  double hi = 2.0 * out.s0;
  while (!(absorption_f(p, hi) > 0.0)) {
    hi *= 2.0;
    if (!std::isfinite(hi)) return out;
  }
  const double s2 = detail::bisect(p, out.s0, hi, tol);
  out.roots = std::make_pair(s1, s2);
  return out;
}

struct AbsorptionVerdict {
  bool condition_f1_holds = false;
  bool initial_ok = false;       // h(0) <= s0
  bool samples_ok = false;       // f(h(tau_i)) >= 0 at every sample
  bool interpolant_ok = false;   // no linear segment crosses the band (s1, s2) where f < 0
  bool conclusion_holds = false; // h <= s1 <= s0 everywhere
  std::string failure;           // first failing premise, empty when all hold
  std::optional<std::size_t> failing_index;

  bool premises_hold() const { return condition_f1_holds && initial_ok && samples_ok && interpolant_ok; }
  bool passed() const { return premises_hold() && conclusion_holds; }
};

// Checks the premises of the absorption lemma on a piecewise-linear h given by
// samples (tau, h(tau)), and its conclusion whenever the premises hold.
inline AbsorptionVerdict absorption_check(const std::vector<std::pair<double, double>>& samples,
                                          const AbsorptionParams& p) {
  validate(p);
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (!(samples[i].first > samples[i - 1].first)) {
      throw std::invalid_argument("absorption_check: tau must be strictly increasing");
    }
  }
  const AbsorptionBound bound = absorption_bound(p);
  const double tol = 1e-12 * (1.0 + p.b);
  AbsorptionVerdict v;
  v.condition_f1_holds = bound.condition_f1_holds;
  v.initial_ok = samples.empty() || samples.front().second <= bound.s0;

  v.samples_ok = true;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double h = samples[i].second;
    if (!(h >= 0.0) || absorption_f(p, h) < -tol) {
      v.samples_ok = false;
      v.failing_index = i;
      break;
    }
  }

  v.interpolant_ok = true;
  if (v.samples_ok && bound.roots) {
    // Every sample lies in [0, s1] or [s2, inf), so a segment meets the band
    // exactly when its endpoints sit on opposite sides of it.
    const double mid = 0.5 * (bound.roots->first + bound.roots->second);
    for (std::size_t i = 1; i < samples.size(); ++i) {
      const double a = std::min(samples[i - 1].second, samples[i].second);
      const double c = std::max(samples[i - 1].second, samples[i].second);
      if (a < mid && c > mid) {
        v.interpolant_ok = false;
        v.failing_index = i;
        break;
      }
    }
  }

  if (!v.condition_f1_holds) {
    v.failure = "condition_f1";
  } else if (!v.initial_ok) {
    v.failure = "initial_value";
  } else if (!v.samples_ok) {
    v.failure = "pointwise_inequality";
  } else if (!v.interpolant_ok) {
    v.failure = "intermediate_inequality";
  }

  if (v.premises_hold()) {
    const double s1 = bound.roots ? bound.roots->first : bound.s0;
    v.conclusion_holds = true;
    for (const auto& [tau, h] : samples) {
      if (h > s1 * (1.0 + 1e-12) + tol || h > bound.s0) {
        v.conclusion_holds = false;
        v.failure = "conclusion";
        break;
      }
    }
  }
  return v;
}

// --- exponents of the truncation argument -----------------------------------

struct ExponentInputs {
  double s = 1.0;
  double m = 1.0;
  double q = 1.0;
  int N = 3;
};

struct MsQs {
  double m_s = 0.0;
  double q_s = 0.0;
};

// m_s = 2(s+1)/N + m + s,  q_s = m_s - (2q - m + s)
inline MsQs exponent_ms_qs(const ExponentInputs& in) {
  MsQs out;
  out.m_s = (in.s + 1.0) * 2.0 / in.N + in.m + in.s;
  out.q_s = out.m_s - (2.0 * in.q - in.m + in.s);
  return out;
}

// Simplified form of q_s: 2(s+1)/N + 2(m - q).
inline double exponent_qs_simplified(const ExponentInputs& in) {
  return 2.0 * (in.s + 1.0) / in.N + 2.0 * (in.m - in.q);
}

// Exponent of |grad v|_inf in the sup bound on u when m > q. Tends to
// 1/(m-q) as s grows.
inline double gamma_exponent(const ExponentInputs& in) {
  const double s = in.s, m = in.m, q = in.q;
  const double N = in.N;
  if (!(m > q)) throw std::domain_error("gamma_exponent: requires m > q");
  const double mp = std::max(m - 1.0, 0.0);
  const double num = ((s + 1.0) * (N + 2.0) + N * mp) * (m + s) + (s + 1.0) * N * (m - q) * (N + 2.0);
  const double den = (s + 1.0) * (m - q) * ((N + 2.0) * (s + 1.0) + 2.0 * N * (m - q));
  return num / den;
}

// beta in gamma = 1 + beta, when gamma > 1.
inline std::optional<double> gamma_excess(const ExponentInputs& in) {
  const double g = gamma_exponent(in);
  if (g > 1.0) return g - 1.0;
  return std::nullopt;
}

struct H4Equivalence {
  bool lhs = false;     // 2 m_s < (N+2) q_s
  bool rhs = false;     // q < 1 and m > q + (q-1)/(N+1)
  bool s_free = false;  // m > q + (q-1)/(N+1)
};

inline H4Equivalence h4_equivalence(double m, double q, int N, double s) {
  if (!(s > 0.0)) throw std::domain_error("h4_equivalence: s must be > 0");
  const MsQs e = exponent_ms_qs({s, m, q, N});
  H4Equivalence out;
  out.lhs = 2.0 * e.m_s < (N + 2.0) * e.q_s;
  out.s_free = m > q + (q - 1.0) / (N + 1.0);
  out.rhs = q < 1.0 && out.s_free;
  return out;
}

// (N+2)/((N+1)m - (N+2)q + 1), the exponent of the sup bound in the strict
// interior of H4.
inline double h4_bound_exponent(double m, double q, int N) {
  const double den = (N + 1.0) * m - (N + 2.0) * q + 1.0;
  if (!(den > 0.0)) throw std::domain_error("h4_bound_exponent: (N+1)m - (N+2)q + 1 must be > 0");
  return (N + 2.0) / den;
}

// Interpolation exponent mu; requires (m+s)/2 < 2q - m + s, i.e. s > 3m - 4q.
inline double interpolation_mu(double s, double m, double q) {
  const double a = m + s;
  const double b = 2.0 * q - m + s;
  if (!(0.5 * a < b)) throw std::domain_error("interpolation_mu: requires (m+s)/2 < 2q - m + s");
  return (1.0 - 2.0 / a) / (2.0 / a - 1.0 / b);
}

}  // namespace kschemo::kernels
