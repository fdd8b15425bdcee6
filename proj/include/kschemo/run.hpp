#pragma once

// Integration of a full trajectory with scheduled diagnostics and blow-up
// detection.

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "kschemo/diagnostics.hpp"
#include "kschemo/solver.hpp"

namespace kschemo {

enum class Termination { ReachedT, DtCollapsed, Nonfinite, SupThreshold };

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::ReachedT: return "reached_T";
    case Termination::DtCollapsed: return "dt_collapsed";
    case Termination::Nonfinite: return "nonfinite";
    case Termination::SupThreshold: return "sup_threshold";
  }
  return "?";
}

struct RunOptions {
  double horizon = 1.0;
  int samples = 11;          // output times k T/(samples-1), k = 0..samples-1
  bool keep_snapshots = true;
  long max_steps = 0;        // 0: unlimited; exceeding it throws
};

struct RunResult {
  std::vector<DiagnosticsRecord> records;
  SimState final_state;
  Termination reason = Termination::ReachedT;
  long steps = 0;
  double initial_sup_u = 0.0;
  ResolvedDiagnostics resolved;
  SpaceTimeSeries snapshots;
};

using StepObserver = std::function<void(const SimState& before, const StepOutcome&)>;

inline RunResult run(const InitialData& initial, const ModelParams& params, const StepControl& ctrl,
                     const DiagnosticsConfig& dcfg, const RunOptions& opts, const StepObserver& observer = {}) {
  params.validate();
  ctrl.validate();
  dcfg.validate();
  if (!(opts.horizon > 0.0)) throw std::invalid_argument("run: horizon must be > 0");
  if (opts.samples < 2) throw std::invalid_argument("run: samples must be >= 2");

  SimState state{initial.u0, initial.v0, 0.0, 0};
  DiagnosticsRecorder recorder(params, dcfg, state);
  RunResult out;
  out.resolved = recorder.resolved();
  out.initial_sup_u = state.u.max();
  out.snapshots.grid = state.u.grid();

  auto emit = [&](const SimState& s) {
    out.records.push_back(recorder.record(s));
    if (opts.keep_snapshots) out.snapshots.samples.push_back({s.t, 0.0, s.u.data()});
  };
  emit(state);

  const double sup_limit = ctrl.sup_multiple * out.initial_sup_u;
  const double T = opts.horizon;
  int next = 1;
  auto output_time = [&](int k) { return k == opts.samples - 1 ? T : T * k / (opts.samples - 1); };

  while (true) {
    double dt = compute_dt(state, params, ctrl);
    if (!(dt >= ctrl.dt_min)) {
      out.reason = Termination::DtCollapsed;
      break;
    }
    const double t_out = output_time(next);
    bool hits_output = false;
    if (state.t + dt >= t_out) {
      dt = t_out - state.t;
      hits_output = true;
    }
    StepOutcome o = step_with_dt(state, params, ctrl, dt);
    if (observer) observer(state, o);
    if (o.flags.nonfinite_detected) {
      out.reason = Termination::Nonfinite;
      break;
    }
    state = std::move(o.state);
    ++out.steps;
    if (opts.max_steps > 0 && out.steps > opts.max_steps) {
      throw std::runtime_error("run: step budget of " + std::to_string(opts.max_steps) + " exhausted at t=" +
                               std::to_string(state.t));
    }
    bool recorded = false;
    if (hits_output) {
      state.t = t_out;
      emit(state);
      recorded = true;
      ++next;
    }
    if (state.u.max() > sup_limit) {
      if (!recorded) emit(state);
      out.reason = Termination::SupThreshold;
      out.final_state = state;
      out.snapshots.assign_dual_weights();
      return out;
    }
    if (hits_output && next == opts.samples) {
      out.reason = Termination::ReachedT;
      break;
    }
  }
  if (out.reason != Termination::ReachedT && out.records.back().t != state.t) emit(state);
  out.final_state = state;
  out.snapshots.assign_dual_weights();
  return out;
}

inline double ladder_top(const DiagnosticsConfig& cfg, const RunResult& r) {
  switch (cfg.ladder_k) {
    case LadderKPolicy::Fixed: return cfg.ladder_k_value;
    case LadderKPolicy::Initial: {
      const double u0 = r.records.front().sup_u;
      return 2.0 * (u0 + 1.0);
    }
    case LadderKPolicy::MaxSup: {
      double k = 0.0;
      for (const auto& rec : r.records) k = std::max(k, rec.sup_u);
      return k > 0.0 ? k : 1.0;
    }
  }
  return 1.0;
}

}  // namespace kschemo
