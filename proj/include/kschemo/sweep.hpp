#pragma once

// (m, q) sweeps: run classification, a worker pool, and the sweep artifact.

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "kschemo/config.hpp"
#include "kschemo/io.hpp"
#include "kschemo/run.hpp"

namespace kschemo {

enum class Classification { Bounded, BlowUp, Inconclusive };

inline const char* to_string(Classification c) {
  switch (c) {
    case Classification::Bounded: return "Bounded";
    case Classification::BlowUp: return "BlowUp";
    case Classification::Inconclusive: return "Inconclusive";
  }
  return "?";
}

struct RunVerdict {
  Classification classification = Classification::Inconclusive;
  // sup_u nondecreasing over the samples with net growth; flagged for review.
  bool monotone_growth = false;
};

inline RunVerdict classify_run(const std::vector<DiagnosticsRecord>& series, Termination reason,
                               const SweepThresholds& th) {
  if (series.empty()) throw std::invalid_argument("classify_run: empty series");
  RunVerdict v;
  bool nondecreasing = true;
  double sup_max = series.front().sup_u;
  for (std::size_t k = 1; k < series.size(); ++k) {
    if (series[k].sup_u < series[k - 1].sup_u) nondecreasing = false;
    sup_max = std::max(sup_max, series[k].sup_u);
  }
  v.monotone_growth = series.size() > 1 && nondecreasing && series.back().sup_u > series.front().sup_u;
  switch (reason) {
    case Termination::DtCollapsed:
    case Termination::Nonfinite:
    case Termination::SupThreshold:
      v.classification = Classification::BlowUp;
      break;
    case Termination::ReachedT:
      v.classification = sup_max <= th.bounded_multiple * series.front().sup_u ? Classification::Bounded
                                                                                : Classification::Inconclusive;
      break;
  }
  return v;
}

struct SweepPoint {
  std::size_t i = 0;
  std::size_t j = 0;
  double m = 0.0;
  double q = 0.0;
  RegimeLabel regime = RegimeLabel::Outside;
  std::optional<std::string> error;
  Classification classification = Classification::Inconclusive;
  bool monotone_growth = false;
  Termination termination = Termination::ReachedT;
  double final_sup_u = 0.0;
  double t_end = 0.0;
  double max_ratio_s14 = 0.0;
  long steps = 0;
};

struct SweepResult {
  std::vector<SweepPoint> points;  // row-major in (i, j)

  std::size_t failures() const {
    return static_cast<std::size_t>(
        std::count_if(points.begin(), points.end(), [](const SweepPoint& p) { return p.error.has_value(); }));
  }
};

// Runs one grid point. Job-level exceptions are captured in the point.
inline SweepPoint run_point(const SweepConfig& cfg, std::size_t i, std::size_t j, RunResult* keep = nullptr) {
  SweepPoint p;
  p.i = i;
  p.j = j;
  p.m = cfg.m_grid[i];
  p.q = cfg.q_grid[j];
  const RunConfig rc = cfg.job(i, j);
  const int N = rc.diagnostics.analytic_dim.value_or(std::max(2, rc.grid.dim()));
  p.regime = classify_regime(rc.model, N);
  try {
    const InitialData init = make_initial_data(rc.initial, rc.grid, rc.seed);
    RunOptions opts = rc.run_options();
    opts.keep_snapshots = keep != nullptr && rc.save_snapshots;
    RunResult r = run(init, rc.model, rc.step, rc.diagnostics, opts);
    const RunVerdict v = classify_run(r.records, r.reason, cfg.thresholds);
    p.classification = v.classification;
    p.monotone_growth = v.monotone_growth;
    p.termination = r.reason;
    p.final_sup_u = r.final_state.u.max();
    p.t_end = r.final_state.t;
    p.steps = r.steps;
    for (const auto& rec : r.records) p.max_ratio_s14 = std::max(p.max_ratio_s14, rec.ratio_s14);
    if (keep) *keep = std::move(r);
  } catch (const std::exception& e) {
    p.error = e.what();
  }
  return p;
}

inline SweepResult run_sweep(const SweepConfig& cfg, std::optional<int> workers = std::nullopt) {
  const std::size_t nq = cfg.q_grid.size();
  const std::size_t n = cfg.job_count();
  SweepResult result;
  result.points.resize(n);
  std::atomic<std::size_t> next{0};
  std::mutex collector;
  auto worker = [&] {
    for (std::size_t k = next++; k < n; k = next++) {
      SweepPoint p = run_point(cfg, k / nq, k % nq);
      std::lock_guard<std::mutex> lock(collector);
      result.points[k] = std::move(p);
    }
  };
  const int w = std::max(1, std::min<int>(workers.value_or(cfg.workers), static_cast<int>(n)));
  if (w == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < w; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return result;
}

inline json to_json(const SweepPoint& p) {
  json j;
  j["i"] = p.i;
  j["j"] = p.j;
  j["m"] = p.m;
  j["q"] = p.q;
  j["regime"] = to_string(p.regime);
  if (p.error) {
    j["error"] = *p.error;
    return j;
  }
  j["classification"] = to_string(p.classification);
  j["monotone_growth"] = p.monotone_growth;
  j["termination"] = to_string(p.termination);
  j["final_sup_u"] = p.final_sup_u;
  j["t_end"] = p.t_end;
  j["max_ratio_s14"] = p.max_ratio_s14;
  j["steps"] = p.steps;
  return j;
}

inline json to_json(const SweepResult& r) {
  json j = json::array();
  for (const auto& p : r.points) j.push_back(to_json(p));
  return j;
}

inline void write_sweep_artifacts(const std::filesystem::path& dir, const SweepConfig& cfg, const SweepResult& r) {
  ensure_dir(dir);
  write_text(dir / "sweep.json", to_json(r).dump(2) + "\n");
  json meta;
  meta["version"] = KSCHEMO_VERSION;
  meta["config"] = to_json(cfg);
  meta["points"] = r.points.size();
  meta["failures"] = r.failures();
  write_text(dir / "sweep_metadata.json", meta.dump(2) + "\n");
}

}  // namespace kschemo
