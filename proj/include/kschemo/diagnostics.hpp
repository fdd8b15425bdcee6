#pragma once

// Per-sample diagnostics of a simulation: conserved mass, norms, the energy
// functional int u^{s+1}, gradient bounds on v, the estimate ratios tracked
// against the a-priori bounds, and the De Giorgi truncation ladder.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kschemo/grid.hpp"
#include "kschemo/kernels.hpp"
#include "kschemo/model.hpp"
#include "kschemo/solver.hpp"

namespace kschemo {

enum class LadderKPolicy {
  MaxSup,   // K = max over samples of sup u
  Initial,  // K = 2 (|u0|_inf + 1)
  Fixed,    // K = DiagnosticsConfig::ladder_k_value
};

inline const char* to_string(LadderKPolicy p) {
  switch (p) {
    case LadderKPolicy::MaxSup: return "max_sup";
    case LadderKPolicy::Initial: return "initial";
    case LadderKPolicy::Fixed: return "fixed";
  }
  return "?";
}

struct DiagnosticsConfig {
  std::vector<double> p_list{1.0, 2.0, std::numeric_limits<double>::infinity()};
  std::optional<double> s;             // default: default_s(m, q, N)
  std::optional<double> fr1_p;         // default: N + 2
  std::optional<int> analytic_dim;     // default: max(2, grid dim)
  LadderKPolicy ladder_k = LadderKPolicy::MaxSup;
  double ladder_k_value = 1.0;
  int ladder_levels = 8;               // n_max

  void validate() const {
    for (double p : p_list) {
      if (!(p >= 1.0)) throw std::invalid_argument("diagnostics.p_list entries must be >= 1");
    }
    if (s && !(*s > 1.0)) throw std::invalid_argument("diagnostics.s must be > 1");
    if (analytic_dim && *analytic_dim < 2) throw std::invalid_argument("diagnostics.analytic_dim must be >= 2");
    if (ladder_levels < 0 || ladder_levels > 60) throw std::invalid_argument("diagnostics.ladder_levels must be in [0, 60]");
    if (ladder_k == LadderKPolicy::Fixed && !(ladder_k_value > 0.0)) {
      throw std::invalid_argument("diagnostics.ladder_k_value must be > 0");
    }
  }

  bool operator==(const DiagnosticsConfig&) const = default;
};

// Smallest integer-step choice of s clearing s > max(0, m-2q),
// s >= ((2q-m)(N-2) - Nm)/2 and s > 3m - 4q, and at least 3.
inline double default_s(double m, double q, int N) {
  const double a = std::ceil(3.0 * m - 4.0 * q) + 1.0;
  const double b = std::ceil(((2.0 * q - m) * (N - 2.0) - N * m) / 2.0) + 1.0;
  return std::max({3.0, a, b});
}

// Exponent applied to sup|grad v| in ratio_s14: gamma when m > q, the strict-H4
// exponent when it is defined, N+2 otherwise.
inline double s14_exponent(double m, double q, int N, double s) {
  if (m > q) return kernels::gamma_exponent({s, m, q, N});
  const double den = (N + 1.0) * m - (N + 2.0) * q + 1.0;
  if (den > 0.0) return kernels::h4_bound_exponent(m, q, N);
  return N + 2.0;
}

struct ResolvedDiagnostics {
  int N = 2;
  double s = 3.0;
  double fr1_p = 4.0;
  double s14_exponent = 1.0;
  double m_s = 0.0;
};

inline ResolvedDiagnostics resolve(const DiagnosticsConfig& cfg, const ModelParams& params, int grid_dim) {
  ResolvedDiagnostics r;
  r.N = cfg.analytic_dim.value_or(std::max(2, grid_dim));
  r.s = cfg.s.value_or(default_s(params.m, params.q, r.N));
  r.fr1_p = cfg.fr1_p.value_or(r.N + 2.0);
  r.s14_exponent = s14_exponent(params.m, params.q, r.N, r.s);
  r.m_s = kernels::exponent_ms_qs({r.s, params.m, params.q, r.N}).m_s;
  return r;
}

struct DiagnosticsRecord {
  double t = 0.0;
  double mass = 0.0;
  double sup_u = 0.0;
  double min_u = 0.0;
  double sup_v = 0.0;
  double min_v = 0.0;
  double sup_grad_v = 0.0;
  double sup_d2_v = 0.0;  // max second difference of v, the W^{2,inf} part
  std::vector<std::pair<double, double>> lp_u;  // (p, |u|_p)
  double energy_s = 0.0;
  double grad_energy_running = 0.0;
  double v_w1inf_0 = 0.0;
  double ratio_fr1 = 0.0;
  double ratio_s14 = 0.0;
};

namespace detail {

inline double sup_face_gradient(const Field& f) {
  double g = 0.0;
  for (int axis = 0; axis < f.grid().dim(); ++axis) {
    for (double x : face_gradient(f, axis).values) g = std::max(g, std::abs(x));
  }
  return g;
}

inline double sup_second_difference(const Field& f) {
  const GridSpec& g = f.grid();
  double out = 0.0;
  for (int axis = 0; axis < g.dim(); ++axis) {
    const FaceValues grad = face_gradient(f, axis);
    const double inv_h = 1.0 / g.spacing(axis);
    detail::for_each_cell_faces(g, axis, [&](std::size_t, std::size_t lo, std::size_t hi) {
      out = std::max(out, std::abs(grad.values[hi] - grad.values[lo]) * inv_h);
    });
  }
  return out;
}

inline double integral_of_power(const Field& u, double power) {
  double s = 0.0;
  for (double x : u.values()) s += std::pow(x, power);
  return s * u.grid().cell_volume();
}

// int |grad w|^2 with w = u^exponent, from face differences.
inline double dirichlet_energy_of_power(const Field& u, double exponent) {
  Field w(u.grid());
  for (std::size_t k = 0; k < u.size(); ++k) w[k] = std::pow(u[k], exponent);
  double s = 0.0;
  for (int axis = 0; axis < u.grid().dim(); ++axis) {
    for (double x : face_gradient(w, axis).values) s += x * x;
  }
  return s * u.grid().cell_volume();
}

}  // namespace detail

// Stateful recorder: space-time integrals are accumulated across calls with the
// trapezoidal rule in time (piecewise constant on the dual intervals of the
// sample times).
class DiagnosticsRecorder {
 public:
  DiagnosticsRecorder(const ModelParams& params, const DiagnosticsConfig& cfg, const SimState& initial)
      : params_(params), cfg_(cfg), resolved_(resolve(cfg, params, initial.u.grid().dim())) {
    v_w1inf_0_ = detail::sup_face_gradient(initial.v) + sup_abs(initial.v);
  }

  const ResolvedDiagnostics& resolved() const { return resolved_; }

  DiagnosticsRecord record(const SimState& state) {
    const Field& u = state.u;
    DiagnosticsRecord r;
    r.t = state.t;
    r.mass = integrate(u);
    r.sup_u = u.max();
    r.min_u = u.min();
    r.sup_v = state.v.max();
    r.min_v = state.v.min();
    r.sup_grad_v = detail::sup_face_gradient(state.v);
    r.sup_d2_v = detail::sup_second_difference(state.v);
    for (double p : cfg_.p_list) r.lp_u.emplace_back(p, lp_norm(u, p));
    r.energy_s = detail::integral_of_power(u, resolved_.s + 1.0);

    const double grad_energy = detail::dirichlet_energy_of_power(u, 0.5 * (params_.m + resolved_.s));
    const double u2p = detail::integral_of_power(u, 2.0 * resolved_.fr1_p);
    if (has_previous_) {
      const double dt = state.t - t_prev_;
      grad_energy_running_ += 0.5 * dt * (grad_energy + grad_energy_prev_);
      u2p_running_ += 0.5 * dt * (u2p + u2p_prev_);
    }
    has_previous_ = true;
    t_prev_ = state.t;
    grad_energy_prev_ = grad_energy;
    u2p_prev_ = u2p;
    r.grad_energy_running = grad_energy_running_;

    r.v_w1inf_0 = v_w1inf_0_;
    const double u_2p_norm = std::pow(u2p_running_, 1.0 / (2.0 * resolved_.fr1_p));
    const double fr1_den = v_w1inf_0_ + u_2p_norm;
    r.ratio_fr1 = r.sup_grad_v == 0.0 ? 0.0 : r.sup_grad_v / fr1_den;

    sup_grad_v_running_ = std::max(sup_grad_v_running_, r.sup_grad_v);
    r.ratio_s14 = r.sup_u / (1.0 + std::pow(sup_grad_v_running_, resolved_.s14_exponent));
    return r;
  }

 private:
  ModelParams params_;
  DiagnosticsConfig cfg_;
  ResolvedDiagnostics resolved_;
  double v_w1inf_0_ = 0.0;
  bool has_previous_ = false;
  double t_prev_ = 0.0;
  double grad_energy_prev_ = 0.0;
  double u2p_prev_ = 0.0;
  double grad_energy_running_ = 0.0;
  double u2p_running_ = 0.0;
  double sup_grad_v_running_ = 0.0;
};

// --- De Giorgi ladder --------------------------------------------------------

struct SpaceTimeSample {
  double t = 0.0;
  double weight = 0.0;  // time quadrature weight
  std::vector<double> values;
};

struct SpaceTimeSeries {
  GridSpec grid;
  std::vector<SpaceTimeSample> samples;

  // Assigns dual-interval weights: half the spacing to each neighbour.
  void assign_dual_weights() {
    const std::size_t n = samples.size();
    for (std::size_t k = 0; k < n; ++k) {
      const double left = k > 0 ? samples[k].t - samples[k - 1].t : 0.0;
      const double right = k + 1 < n ? samples[k + 1].t - samples[k].t : 0.0;
      samples[k].weight = 0.5 * (left + right);
    }
  }
};

struct DeGiorgiLadder {
  double K = 0.0;
  double m_s = 0.0;
  std::vector<double> levels;    // K_n = K - K/2^{n+1}
  std::vector<double> measures;  // |{(x,t): u >= K_n}|
  std::vector<double> energies;  // y_n = int int [(u - K_n)^+]^{m_s}
};

inline double ladder_level(double K, int n) { return K - std::ldexp(K, -(n + 1)); }

inline DeGiorgiLadder build_ladder(const SpaceTimeSeries& series, double K, int n_max, double m_s) {
  if (series.samples.empty()) throw std::invalid_argument("build_ladder: empty series");
  if (!(K > 0.0)) throw std::invalid_argument("build_ladder: K must be > 0");
  if (!(m_s > 1.0)) throw std::invalid_argument("build_ladder: m_s must be > 1");
  if (n_max < 0) throw std::invalid_argument("build_ladder: n_max must be >= 0");
  const double vol = series.grid.cell_volume();
  DeGiorgiLadder out;
  out.K = K;
  out.m_s = m_s;
  for (int n = 0; n <= n_max; ++n) {
    const double level = ladder_level(K, n);
    double measure = 0.0;
    double energy = 0.0;
    for (const SpaceTimeSample& s : series.samples) {
      if (s.values.size() != series.grid.size()) throw std::invalid_argument("build_ladder: sample size mismatch");
      double count = 0.0;
      double e = 0.0;
      for (double u : s.values) {
        if (u >= level) {
          count += 1.0;
          e += std::pow(u - level, m_s);
        }
      }
      measure += s.weight * vol * count;
      energy += s.weight * vol * e;
    }
    out.levels.push_back(level);
    out.measures.push_back(measure);
    out.energies.push_back(energy);
  }
  return out;
}

struct DecayReport {
  bool monotone = true;           // y_{n+1} <= y_n
  bool measures_monotone = true;  // |A_{n+1}| <= |A_n|
  // log(y_{n+1}/y_n); nullopt where y_n == 0 (not applicable).
  std::vector<std::optional<double>> exponents;
};

inline DecayReport check_decay(const DeGiorgiLadder& ladder) {
  DecayReport r;
  for (std::size_t n = 0; n + 1 < ladder.energies.size(); ++n) {
    const double y = ladder.energies[n];
    const double y_next = ladder.energies[n + 1];
    if (y_next > y) r.monotone = false;
    if (ladder.measures[n + 1] > ladder.measures[n]) r.measures_monotone = false;
    if (y > 0.0) {
      r.exponents.emplace_back(y_next > 0.0 ? std::log(y_next / y) : -std::numeric_limits<double>::infinity());
    } else {
      r.exponents.emplace_back(std::nullopt);
    }
  }
  return r;
}

}  // namespace kschemo
