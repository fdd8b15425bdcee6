#include <filesystem>
#include <string>

#include <gtest/gtest.h>

#include "kschemo/io.hpp"
#include "kschemo/sweep.hpp"

using namespace kschemo;
namespace fs = std::filesystem;

namespace {

std::vector<DiagnosticsRecord> series(std::initializer_list<double> sups) {
  std::vector<DiagnosticsRecord> out;
  double t = 0.0;
  for (double s : sups) {
    DiagnosticsRecord r;
    r.t = t;
    r.sup_u = s;
    out.push_back(r);
    t += 0.1;
  }
  return out;
}

const char* kSmallSweep = R"({
  "m_grid": [1.0, 2.0], "q_grid": [0.5, 1.0],
  "template": {"grid": {"dim": 1, "cells": [24], "extent": [1]},
               "initial": {"u": {"preset": "random-nonneg", "amplitude": 2, "offset": 0.5}},
               "horizon": 0.02, "samples": 3, "seed": 3},
  "workers": 1
})";

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("kschemo_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(Classify, Rules) {
  const SweepThresholds th;
  EXPECT_EQ(classify_run(series({1, 1, 1}), Termination::ReachedT, th).classification, Classification::Bounded);
  EXPECT_EQ(classify_run(series({1, 2}), Termination::Nonfinite, th).classification, Classification::BlowUp);
  EXPECT_EQ(classify_run(series({1, 2}), Termination::DtCollapsed, th).classification, Classification::BlowUp);
  EXPECT_EQ(classify_run(series({1, 2}), Termination::SupThreshold, th).classification, Classification::BlowUp);
  EXPECT_EQ(classify_run(series({1, 60}), Termination::ReachedT, th).classification, Classification::Inconclusive);
  EXPECT_THROW(classify_run({}, Termination::ReachedT, th), std::invalid_argument);
}

TEST(Classify, MonotoneGrowthIsFlaggedButStillBounded) {
  const SweepThresholds th;
  const RunVerdict v = classify_run(series({1, 10, 30, 49.5}), Termination::ReachedT, th);
  EXPECT_EQ(v.classification, Classification::Bounded);
  EXPECT_TRUE(v.monotone_growth);
  EXPECT_FALSE(classify_run(series({1, 1, 1}), Termination::ReachedT, th).monotone_growth);
}

TEST(Sweep, OneByOneMatchesSingleRun) {
  const SweepConfig cfg = parse_sweep_config(std::string(
      R"({"m_grid": [2], "q_grid": [1], "template": {"grid": {"dim": 1, "cells": [16], "extent": [1]},
          "initial": {"u": {"preset": "gaussian", "mass": 2, "width": 0.2}}, "horizon": 0.05}})"));
  const SweepResult r = run_sweep(cfg);
  ASSERT_EQ(r.points.size(), 1u);
  const RunConfig rc = cfg.job(0, 0);
  const RunResult single = run(make_initial_data(rc.initial, rc.grid, rc.seed), rc.model, rc.step, rc.diagnostics,
                               rc.run_options());
  EXPECT_EQ(r.points[0].classification, classify_run(single.records, single.reason, cfg.thresholds).classification);
  EXPECT_EQ(r.points[0].final_sup_u, single.final_state.u.max());
  EXPECT_EQ(r.points[0].regime, RegimeLabel::H3);
}

TEST(Sweep, EveryPointPresentOnceAndWorkerCountIrrelevant) {
  const SweepConfig cfg = parse_sweep_config(std::string(kSmallSweep));
  const SweepResult one = run_sweep(cfg, 1);
  const SweepResult three = run_sweep(cfg, 3);
  ASSERT_EQ(one.points.size(), 4u);
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_EQ(one.points[k].i, k / 2);
    EXPECT_EQ(one.points[k].j, k % 2);
  }
  EXPECT_EQ(to_json(one).dump(), to_json(three).dump());

  const fs::path a = scratch("sweep_a"), b = scratch("sweep_b");
  write_sweep_artifacts(a, cfg, one);
  write_sweep_artifacts(b, cfg, three);
  EXPECT_EQ(read_text(a / "sweep.json"), read_text(b / "sweep.json"));
  EXPECT_EQ(nlohmann::json::parse(read_text(a / "sweep.json")).size(), cfg.job_count());
}

TEST(Sweep, JobFailureIsRecordedAndSweepContinues) {
  SweepConfig cfg = parse_sweep_config(std::string(kSmallSweep));
  cfg.base.max_steps = 1;  // every job exhausts its budget
  const SweepResult r = run_sweep(cfg, 2);
  EXPECT_EQ(r.points.size(), 4u);
  EXPECT_EQ(r.failures(), 4u);
  EXPECT_TRUE(to_json(r)[0].contains("error"));
}

TEST(Artifacts, SteadyRunGivesIdenticalRowsAndDeterministicFiles) {
  const RunConfig cfg = parse_run_config(std::string(
      R"({"grid": {"dim": 2, "cells": [8, 8], "extent": [1, 1]}, "samples": 3,
          "initial": {"u": {"preset": "constant", "value": 1}, "v": {"preset": "constant", "value": 1}}})"));
  auto once = [&](const fs::path& dir) {
    const RunResult r =
        run(make_initial_data(cfg.initial, cfg.grid, cfg.seed), cfg.model, cfg.step, cfg.diagnostics, cfg.run_options());
    write_run_artifacts(dir, cfg, r);
  };
  const fs::path a = scratch("run_a"), b = scratch("run_b");
  once(a);
  once(b);
  for (const char* f : {"diagnostics.csv", "metadata.json", "snapshots.json"}) {
    EXPECT_EQ(read_text(a / f), read_text(b / f)) << f;
  }
  const CsvTable t = parse_csv(read_text(a / "diagnostics.csv"));
  ASSERT_EQ(t.rows.size(), 3u);
  for (const auto& row : t.rows) {
    for (std::size_t c = 1; c < row.size(); ++c) EXPECT_EQ(row[c], t.rows[0][c]) << t.header[c];
  }
  const auto meta = nlohmann::json::parse(read_text(a / "metadata.json"));
  EXPECT_EQ(meta.at("termination"), "reached_T");
  EXPECT_EQ(parse_run_config(meta.at("config")), cfg);
}

TEST(Artifacts, LadderCsvFromSnapshots) {
  const RunConfig cfg = parse_run_config(std::string(
      R"({"grid": {"dim": 1, "cells": [32], "extent": [1]}, "samples": 4, "horizon": 0.01,
          "model": {"m": 2}, "initial": {"u": {"preset": "gaussian", "width": 0.1}}})"));
  const RunResult r =
      run(make_initial_data(cfg.initial, cfg.grid, cfg.seed), cfg.model, cfg.step, cfg.diagnostics, cfg.run_options());
  const SpaceTimeSeries back =
      snapshots_from_json(nlohmann::json::parse(snapshots_json(r.snapshots, r.resolved.m_s).dump()));
  const DeGiorgiLadder la = build_ladder(r.snapshots, ladder_top(cfg.diagnostics, r), 5, r.resolved.m_s);
  const DeGiorgiLadder lb = build_ladder(back, ladder_top(cfg.diagnostics, r), 5, r.resolved.m_s);
  EXPECT_EQ(ladder_csv(la), ladder_csv(lb));
  EXPECT_EQ(ladder_csv(la).substr(0, 22), "n,K_n,A_n_measure,y_n\n");
}
