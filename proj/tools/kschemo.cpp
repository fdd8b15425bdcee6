// kschemo: run, sweep, sigma-ladder, kernels, ladder.

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "kschemo/kschemo.hpp"

namespace fs = std::filesystem;
using namespace kschemo;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kJobFailure = 2;

int cmd_run(const std::string& path, const std::string& out, std::optional<std::uint64_t> seed) {
  RunConfig cfg;
  try {
    cfg = parse_run_config(read_text(path));
    if (seed) cfg.seed = *seed;
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kConfigError;
  }
  try {
    const InitialData init = make_initial_data(cfg.initial, cfg.grid, cfg.seed);
    const RunResult r = run(init, cfg.model, cfg.step, cfg.diagnostics, cfg.run_options());
    write_run_artifacts(out, cfg, r);
    std::cout << "termination=" << to_string(r.reason) << " t=" << format_real(r.final_state.t)
              << " steps=" << r.steps << " sup_u=" << format_real(r.final_state.u.max()) << "\n";
  } catch (const std::exception& e) {
    std::cerr << "run failed: " << e.what() << "\n";
    return kJobFailure;
  }
  return kOk;
}

int cmd_sweep(const std::string& path, const std::string& out, std::optional<int> workers,
              std::optional<std::uint64_t> seed) {
  SweepConfig cfg;
  try {
    cfg = parse_sweep_config(read_text(path));
    if (seed) cfg.base.seed = *seed;
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kConfigError;
  }
  if (workers && *workers < 1) {
    std::cerr << "--workers must be >= 1\n";
    return kConfigError;
  }
  const SweepResult r = run_sweep(cfg, workers);
  write_sweep_artifacts(out, cfg, r);
  for (const auto& p : r.points) {
    std::cout << "m=" << format_real(p.m) << " q=" << format_real(p.q) << " regime=" << to_string(p.regime) << " ";
    if (p.error) {
      std::cout << "error: " << *p.error << "\n";
    } else {
      std::cout << to_string(p.classification) << " (" << to_string(p.termination) << ")\n";
    }
  }
  return r.failures() > 0 ? kJobFailure : kOk;
}

int cmd_sigma_ladder(const std::string& path, const std::string& out, std::optional<std::uint64_t> seed) {
  RunConfig base;
  try {
    base = parse_run_config(read_text(path));
    if (seed) base.seed = *seed;
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kConfigError;
  }
  // Reported only; nothing is asserted about the sigma -> 0 limit.
  nlohmann::json summary = nlohmann::json::array();
  bool failed = false;
  for (double sigma : {1e-1, 1e-2, 1e-3, 0.0}) {
    nlohmann::json row = {{"sigma", sigma}};
    try {
      RunConfig cfg = base;
      cfg.model.sigma = sigma;
      cfg = parse_run_config(to_json(cfg));
      const RunResult r =
          run(make_initial_data(cfg.initial, cfg.grid, cfg.seed), cfg.model, cfg.step, cfg.diagnostics,
              cfg.run_options());
      write_run_artifacts(fs::path(out) / ("sigma=" + format_real(sigma)), cfg, r);
      double max_sup = 0.0, max_fr1 = 0.0, max_s14 = 0.0;
      for (const auto& rec : r.records) {
        max_sup = std::max(max_sup, rec.sup_u);
        max_fr1 = std::max(max_fr1, rec.ratio_fr1);
        max_s14 = std::max(max_s14, rec.ratio_s14);
      }
      row.update({{"termination", to_string(r.reason)}, {"t_final", r.final_state.t}, {"steps", r.steps},
                  {"max_sup_u", max_sup}, {"max_ratio_fr1", max_fr1}, {"max_ratio_s14", max_s14},
                  {"final_energy_s", r.records.back().energy_s}});
      std::cout << "sigma=" << format_real(sigma) << " termination=" << to_string(r.reason)
                << " max_sup_u=" << format_real(max_sup) << "\n";
    } catch (const std::exception& e) {
      row["error"] = e.what();
      failed = true;
      std::cout << "sigma=" << format_real(sigma) << " error: " << e.what() << "\n";
    }
    summary.push_back(row);
  }
  ensure_dir(out);
  write_text(fs::path(out) / "sigma_ladder.json", summary.dump(2) + "\n");
  return failed ? kJobFailure : kOk;
}

int cmd_kernels(const std::string& out) {
  nlohmann::json report = nlohmann::json::array();
  bool all = true;
  for (const auto& c : kernels::run_kernel_checks()) {
    report.push_back(kernels::to_json(c));
    all = all && c.passed;
  }
  nlohmann::json doc = {{"passed", all}, {"checks", report}};
  if (out.empty()) {
    std::cout << doc.dump(2) << "\n";
  } else {
    ensure_dir(out);
    write_text(fs::path(out) / "kernels.json", doc.dump(2) + "\n");
  }
  return all ? kOk : kJobFailure;
}

int cmd_ladder(const std::string& run_dir, std::optional<double> K, std::optional<int> levels,
               const std::string& out) {
  try {
    const auto meta = nlohmann::json::parse(read_text(fs::path(run_dir) / "metadata.json"));
    const auto snaps = nlohmann::json::parse(read_text(fs::path(run_dir) / "snapshots.json"));
    const SpaceTimeSeries series = snapshots_from_json(snaps);
    const RunConfig cfg = parse_run_config(meta.at("config"));
    double top = 0.0;
    if (K) {
      top = *K;
    } else {
      RunResult r;
      for (const auto& s : series.samples) {
        DiagnosticsRecord rec;
        rec.sup_u = *std::max_element(s.values.begin(), s.values.end());
        r.records.push_back(rec);
      }
      top = ladder_top(cfg.diagnostics, r);
    }
    const DeGiorgiLadder l =
        build_ladder(series, top, levels.value_or(cfg.diagnostics.ladder_levels), snaps.at("m_s").get<double>());
    const std::string csv = ladder_csv(l);
    if (out.empty()) {
      std::cout << csv;
    } else {
      write_text(out, csv);
    }
    const DecayReport d = check_decay(l);
    std::cerr << "monotone=" << (d.monotone ? "true" : "false")
              << " measures_monotone=" << (d.measures_monotone ? "true" : "false") << "\n";
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "ladder failed: " << e.what() << "\n";
    return kJobFailure;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Keller-Segel porous-medium chemotaxis solver and sweep harness"};
  app.require_subcommand(1);
  app.set_version_flag("--version", KSCHEMO_VERSION);

  std::string config, run_out, kernels_out, ladder_out, run_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers, levels;
  std::optional<double> K;

  auto* run_cmd = app.add_subcommand("run", "integrate one configuration");
  run_cmd->add_option("config", config, "run config (JSON)")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--out", run_out, "output directory")->default_val("out");
  run_cmd->add_option("--seed", seed, "override the config seed");

  auto* sweep_cmd = app.add_subcommand("sweep", "run an (m, q) sweep");
  sweep_cmd->add_option("config", config, "sweep config (JSON)")->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--out", run_out, "output directory")->default_val("out");
  sweep_cmd->add_option("--workers", workers, "override the worker count");
  sweep_cmd->add_option("--seed", seed, "override the template seed");

  auto* sigma_cmd = app.add_subcommand("sigma-ladder", "rerun one configuration at sigma = 1e-1, 1e-2, 1e-3, 0");
  sigma_cmd->add_option("config", config, "run config (JSON)")->required()->check(CLI::ExistingFile);
  sigma_cmd->add_option("--out", run_out, "output directory")->default_val("out");
  sigma_cmd->add_option("--seed", seed, "override the config seed");

  auto* kernels_cmd = app.add_subcommand("kernels", "self-verification report for the analytic kernels");
  kernels_cmd->add_option("--out", kernels_out, "directory for kernels.json (default: stdout)");

  auto* ladder_cmd = app.add_subcommand("ladder", "level-set ladder of a saved run");
  ladder_cmd->add_option("run_dir", run_dir, "run output directory")->required()->check(CLI::ExistingDirectory);
  ladder_cmd->add_option("--K", K, "top level (default: the run's ladder_k policy)");
  ladder_cmd->add_option("--levels", levels, "number of levels n_max");
  ladder_cmd->add_option("--out", ladder_out, "CSV path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*run_cmd) return cmd_run(config, run_out, seed);
    if (*sweep_cmd) return cmd_sweep(config, run_out, workers, seed);
    if (*sigma_cmd) return cmd_sigma_ladder(config, run_out, seed);
    if (*kernels_cmd) return cmd_kernels(kernels_out);
    if (*ladder_cmd) return cmd_ladder(run_dir, K, levels, ladder_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kJobFailure;
  }
  return kOk;
}
