#pragma once

// Time stepping for the sigma-regularized Keller-Segel system with porous
// medium diffusion. One step advances u with a conservative flux-form update
// (potential-form diffusion plus donor-cell chemotaxis) and v with backward
// Euler; both use the previous state on the right-hand side.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "kschemo/grid.hpp"
#include "kschemo/linsolve.hpp"
#include "kschemo/model.hpp"

namespace kschemo {

enum class Scheme {
  // Forward Euler for the whole u update; dt obeys the diffusive and
  // chemotactic limits.
  Explicit,
  // Chemotaxis explicit, diffusion backward Euler with face mobilities lagged
  // at the old state (one SPD solve per step); dt obeys the chemotactic limit.
  SemiImplicit,
};

inline const char* to_string(Scheme s) { return s == Scheme::Explicit ? "explicit" : "semi-implicit"; }

struct StepControl {
  double safety = 0.4;
  double dt_min = 1e-12;
  double dt_max = 1e-2;
  double v_solve_tol = 1e-10;
  int v_solve_max_iters = 10000;
  Scheme scheme = Scheme::Explicit;
  // Relative residual target of the semi-implicit u solve.
  double u_solve_tol = 1e-12;
  // Blow-up sentinel: sup u above this multiple of the initial sup u.
  double sup_multiple = 1e4;

  void validate() const {
    if (!(safety > 0.0 && safety <= 1.0)) throw std::invalid_argument("step.safety must be in (0, 1]");
    if (!(dt_min > 0.0)) throw std::invalid_argument("step.dt_min must be > 0");
    if (!(dt_max > dt_min)) throw std::invalid_argument("step.dt_max must be > step.dt_min");
    if (!(v_solve_tol > 0.0)) throw std::invalid_argument("step.v_solve_tol must be > 0");
    if (v_solve_max_iters < 1) throw std::invalid_argument("step.v_solve_max_iters must be >= 1");
    if (!(u_solve_tol > 0.0)) throw std::invalid_argument("step.u_solve_tol must be > 0");
    if (!(sup_multiple > 1.0)) throw std::invalid_argument("step.sup_multiple must be > 1");
  }

  bool operator==(const StepControl&) const = default;
};

struct SimState {
  Field u;
  Field v;
  double t = 0.0;
  long step = 0;
};

struct StepFlags {
  bool dt_collapsed = false;
  bool nonfinite_detected = false;
  bool any() const { return dt_collapsed || nonfinite_detected; }
};

struct StepOutcome {
  SimState state;
  double dt_used = 0.0;
  int v_solve_iters = 0;
  int u_solve_iters = 0;
  // True when the outflow limiter had to scale any face flux.
  bool limiter_active = false;
  StepFlags flags;
};

namespace detail {

// Evaluation floor for mobility/speed estimates where the exact value is
// singular at u = 0 (m < 1 with sigma = 0, q < 1).
inline double singular_floor(double sup_u) {
  return std::sqrt(std::numeric_limits<double>::epsilon()) * std::max(1.0, sup_u);
}

inline void require_nonnegative(const Field& u, const char* who) {
  for (double x : u.values()) {
    if (!(x >= 0.0)) throw std::invalid_argument(std::string(who) + ": u must be nonnegative and finite");
  }
}

// (u + sigma)^m per cell.
inline std::vector<double> potential(const Field& u, const ModelParams& p) {
  std::vector<double> out(u.size());
  if (p.m == 1.0) {
    for (std::size_t k = 0; k < u.size(); ++k) out[k] = u[k] + p.sigma;
  } else {
    for (std::size_t k = 0; k < u.size(); ++k) out[k] = std::pow(u[k] + p.sigma, p.m);
  }
  return out;
}

inline double pow_q(double x, double q) {
  if (q == 1.0) return x;
  return x > 0.0 ? std::pow(x, q) : 0.0;
}

}  // namespace detail

// -[(u_R+sigma)^m - (u_L+sigma)^m]/h on interior faces, zero on the boundary.
inline FaceValues diffusive_flux(const Field& u, const ModelParams& params, int axis) {
  detail::check_axis(u.grid(), axis);
  detail::require_nonnegative(u, "diffusive_flux");
  const std::vector<double> pot = detail::potential(u, params);
  FaceValues out(u.grid(), axis);
  const double inv_h = 1.0 / u.grid().spacing(axis);
  detail::for_each_interior_face(u.grid(), axis, [&](std::size_t f, std::size_t l, std::size_t r) {
    out.values[f] = -(pot[r] - pot[l]) * inv_h;
  });
  return out;
}

// (u_donor)^q (v_R - v_L)/h with the donor upstream of the flux: left cell
// when grad v > 0, right cell otherwise.
inline FaceValues chemotactic_flux(const Field& u, const Field& v, const ModelParams& params, int axis) {
  detail::check_axis(u.grid(), axis);
  detail::require_nonnegative(u, "chemotactic_flux");
  FaceValues out(u.grid(), axis);
  const double inv_h = 1.0 / u.grid().spacing(axis);
  detail::for_each_interior_face(u.grid(), axis, [&](std::size_t f, std::size_t l, std::size_t r) {
    const double grad = (v[r] - v[l]) * inv_h;
    const double donor = grad > 0.0 ? u[l] : u[r];
    out.values[f] = detail::pow_q(donor, params.q) * grad;
  });
  return out;
}

struct DtLimits {
  double diffusion = std::numeric_limits<double>::infinity();
  double advection = std::numeric_limits<double>::infinity();
  double dt = 0.0;
};

inline DtLimits dt_limits(const SimState& state, const ModelParams& params, const StepControl& ctrl) {
  const GridSpec& g = state.u.grid();
  const double h = g.min_spacing();
  const int dim = g.dim();
  const double sup_u = state.u.max();
  const double floor = detail::singular_floor(sup_u);
  DtLimits lim;

  if (ctrl.scheme == Scheme::Explicit) {
    double d_max = 0.0;
    if (params.m == 1.0) {
      d_max = 1.0;
    } else if (params.m > 1.0) {
      d_max = params.m * std::pow(sup_u + params.sigma, params.m - 1.0);
    } else {
      double lowest = state.u.min() + params.sigma;
      if (params.sigma == 0.0) lowest = std::max(lowest, floor);
      d_max = params.m * std::pow(lowest, params.m - 1.0);
    }
    if (d_max > 0.0) lim.diffusion = h * h / (2.0 * dim * d_max);
  }

  if (params.chemotaxis) {
    double speed = 0.0;
    for (int axis = 0; axis < dim; ++axis) {
      const double inv_h = 1.0 / g.spacing(axis);
      detail::for_each_interior_face(g, axis, [&](std::size_t, std::size_t l, std::size_t r) {
        const double grad = (state.v[r] - state.v[l]) * inv_h;
        if (grad == 0.0) return;
        const double donor = grad > 0.0 ? state.u[l] : state.u[r];
        if (donor <= 0.0) return;
        const double mob = params.q == 1.0 ? 1.0 : std::pow(std::max(donor, floor), params.q - 1.0);
        speed = std::max(speed, mob * std::abs(grad));
      });
    }
    if (speed > 0.0) lim.advection = h / (2.0 * dim * speed);
  }

  lim.dt = ctrl.safety * std::min({lim.diffusion, lim.advection, ctrl.dt_max});
  return lim;
}

// Stable step size; a value below ctrl.dt_min means the caller must flag
// dt_collapsed.
inline double compute_dt(const SimState& state, const ModelParams& params, const StepControl& ctrl) {
  return dt_limits(state, params, ctrl).dt;
}

struct VSolve {
  Field v;
  int iters = 0;
};

// Backward Euler for v_t - lap v + v = u:  (I + dt(-lap + I)) v_new = v + dt u.
// The exact discrete solution obeys the maximum principle
//   (min v + dt min u)/(1+dt) <= v_new <= (max v + dt max u)/(1+dt),
// so the iterate is projected onto that box after convergence.
inline VSolve advance_v(const Field& v, const Field& u, double dt, const StepControl& ctrl) {
  if (!(dt > 0.0)) throw std::invalid_argument("advance_v: dt must be > 0");
  const GridSpec& g = v.grid();
  std::vector<double> rhs(g.size());
  for (std::size_t k = 0; k < rhs.size(); ++k) rhs[k] = v[k] + dt * u[k];
  const double rhs_norm = std::sqrt(detail::dot(rhs, rhs));

  StencilOperator op(g, 1.0 + dt, dt);
  VSolve out{v, 0};
  const CgResult res =
      conjugate_gradient(op, rhs, out.v.values(), ctrl.v_solve_tol * (1.0 + rhs_norm), ctrl.v_solve_max_iters);
  out.iters = res.iterations;

  const double lo = (v.min() + dt * u.min()) / (1.0 + dt);
  const double hi = std::min((v.max() + dt * u.max()) / (1.0 + dt), std::max(v.max(), u.max()));
  for (double& x : out.v.data()) x = std::clamp(x, std::max(lo, 0.0), hi);
  return out;
}

namespace detail {

// Scales every face flux leaving a cell so that the cell's total outflow over
// dt never exceeds its content. Returns true if any flux was scaled.
inline bool limit_outflow(const Field& u, std::vector<FaceValues>& flux, double dt) {
  const GridSpec& g = u.grid();
  std::vector<double> outflow(g.size(), 0.0);
  for (int axis = 0; axis < g.dim(); ++axis) {
    const double w = dt / g.spacing(axis);
    const auto& F = flux[axis].values;
    detail::for_each_cell_faces(g, axis, [&](std::size_t c, std::size_t lo, std::size_t hi) {
      if (F[hi] > 0.0) outflow[c] += w * F[hi];
      if (F[lo] < 0.0) outflow[c] -= w * F[lo];
    });
  }
  constexpr double kMargin = 1.0 - 1e-12;
  std::vector<double> theta(g.size(), 1.0);
  bool active = false;
  for (std::size_t c = 0; c < g.size(); ++c) {
    if (outflow[c] > kMargin * u[c]) {
      theta[c] = kMargin * u[c] / outflow[c];
      active = true;
    }
  }
  if (!active) return false;
  for (int axis = 0; axis < g.dim(); ++axis) {
    auto& F = flux[axis].values;
    detail::for_each_interior_face(g, axis, [&](std::size_t f, std::size_t l, std::size_t r) {
      F[f] *= F[f] > 0.0 ? theta[l] : theta[r];
    });
  }
  return true;
}

// Secant mobility (P(u_R) - P(u_L))/(u_R - u_L) of P(u) = (u+sigma)^m per face,
// with the derivative at the midpoint when the two states nearly coincide.
inline std::array<std::vector<double>, GridSpec::kMaxDim> secant_mobility(const Field& u,
                                                                         const ModelParams& p) {
  const GridSpec& g = u.grid();
  std::array<std::vector<double>, GridSpec::kMaxDim> k;
  if (p.m == 1.0) return k;  // unit mobility
  const std::vector<double> pot = potential(u, p);
  const double floor = singular_floor(u.max());
  const double cap = p.m < 1.0 ? p.m * std::pow((p.sigma > 0.0 ? p.sigma : floor), p.m - 1.0)
                               : std::numeric_limits<double>::infinity();
  for (int axis = 0; axis < g.dim(); ++axis) {
    k[axis].assign(g.face_count(axis), 0.0);
    detail::for_each_interior_face(g, axis, [&](std::size_t f, std::size_t l, std::size_t r) {
      const double du = u[r] - u[l];
      const double scale = u[r] + u[l] + p.sigma;
      double c;
      if (std::abs(du) > 1e-6 * scale) {
        c = (pot[r] - pot[l]) / du;
      } else {
        const double mid = 0.5 * (u[r] + u[l]) + p.sigma;
        c = mid > 0.0 ? p.m * std::pow(mid, p.m - 1.0) : (p.m > 1.0 ? 0.0 : cap);
      }
      k[axis][f] = std::clamp(c, 0.0, cap);
    });
  }
  return k;
}

inline bool all_finite(const Field& f) { return f.all_finite(); }

}  // namespace detail

// Advances one step with a given dt (no stability check on dt itself).
inline StepOutcome step_with_dt(const SimState& state, const ModelParams& params, const StepControl& ctrl,
                                double dt) {
  const GridSpec& g = state.u.grid();
  StepOutcome out;
  out.dt_used = dt;

  std::vector<FaceValues> flux;
  flux.reserve(g.dim());
  for (int axis = 0; axis < g.dim(); ++axis) {
    FaceValues F = params.chemotaxis ? chemotactic_flux(state.u, state.v, params, axis) : FaceValues(g, axis);
    if (ctrl.scheme == Scheme::Explicit) {
      const FaceValues D = diffusive_flux(state.u, params, axis);
      for (std::size_t f = 0; f < F.values.size(); ++f) F.values[f] += D.values[f];
    }
    flux.push_back(std::move(F));
  }
  out.limiter_active = detail::limit_outflow(state.u, flux, dt);
  Field u_new = apply_divergence(state.u, flux, dt);

  if (ctrl.scheme == Scheme::SemiImplicit) {
    // (I + dt L_k) u_new = u*, with L_k = -div(k grad) and k the lagged secant mobility.
    const double target = detail::compensated_sum(u_new.values());
    const double rhs_norm = std::sqrt(detail::dot(u_new.values(), u_new.values()));
    StencilOperator op(g, 1.0, dt, detail::secant_mobility(state.u, params));
    Field rhs = u_new;
    const CgResult res =
        conjugate_gradient(op, rhs.values(), u_new.values(), ctrl.u_solve_tol * rhs_norm, ctrl.v_solve_max_iters);
    out.u_solve_iters = res.iterations;
    // The exact solution is nonnegative (M-matrix) and has the mass of u*;
    // remove solver-level negatives and restore the mass.
    for (double& x : u_new.data()) x = std::max(x, 0.0);
    const double total = detail::compensated_sum(u_new.values());
    if (total > 0.0 && total != target) {
      const double s = target / total;
      for (double& x : u_new.data()) x *= s;
    }
  }

  VSolve vs = advance_v(state.v, state.u, dt, ctrl);
  out.v_solve_iters = vs.iters;

  out.state = SimState{std::move(u_new), std::move(vs.v), state.t + dt, state.step + 1};
  out.flags.nonfinite_detected = !detail::all_finite(out.state.u) || !detail::all_finite(out.state.v);
  return out;
}

inline StepOutcome step(const SimState& state, const ModelParams& params, const StepControl& ctrl) {
  const double dt = compute_dt(state, params, ctrl);
  if (!(dt >= ctrl.dt_min) || !std::isfinite(dt)) {
    StepOutcome out;
    out.state = state;
    out.dt_used = dt;
    out.flags.dt_collapsed = !(dt >= ctrl.dt_min);
    out.flags.nonfinite_detected = !std::isfinite(dt) && !out.flags.dt_collapsed;
    return out;
  }
  return step_with_dt(state, params, ctrl, dt);
}

}  // namespace kschemo
