#pragma once

// Run artifacts: diagnostics CSV, metadata JSON, snapshot JSON, ladder CSV.
// Reals use the shortest representation that parses back to the same double.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include <nlohmann/json.hpp>

#include "kschemo/config.hpp"
#include "kschemo/diagnostics.hpp"
#include "kschemo/run.hpp"

#define KSCHEMO_VERSION "0.1.0"

namespace kschemo {

inline std::string format_real(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  if (res.ec != std::errc()) throw std::runtime_error("format_real: conversion failed");
  return std::string(buf, res.ptr);
}

inline double parse_real(const std::string& s) {
  double x = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::invalid_argument("parse_real: not a number: '" + s + "'");
  }
  return x;
}

inline std::vector<std::string> diagnostics_header(const std::vector<double>& p_list) {
  std::vector<std::string> h{"t", "mass", "sup_u", "sup_v", "sup_grad_v"};
  for (double p : p_list) h.push_back("lp_u:p=" + format_real(p));
  for (const char* c : {"energy_s", "grad_energy_running", "ratio_fr1", "ratio_s14"}) h.emplace_back(c);
  return h;
}

inline std::string diagnostics_csv(const std::vector<DiagnosticsRecord>& records, const std::vector<double>& p_list) {
  std::string out;
  const auto header = diagnostics_header(p_list);
  for (std::size_t k = 0; k < header.size(); ++k) out += (k ? "," : "") + header[k];
  out += '\n';
  for (const DiagnosticsRecord& r : records) {
    std::vector<double> row{r.t, r.mass, r.sup_u, r.sup_v, r.sup_grad_v};
    for (const auto& [p, norm] : r.lp_u) row.push_back(norm);
    for (double x : {r.energy_s, r.grad_energy_running, r.ratio_fr1, r.ratio_s14}) row.push_back(x);
    for (std::size_t k = 0; k < row.size(); ++k) out += (k ? "," : "") + format_real(row[k]);
    out += '\n';
  }
  return out;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

inline CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  auto split = [](const std::string& l) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(l);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    return cells;
  };
  if (!std::getline(in, line)) throw std::invalid_argument("parse_csv: empty input");
  t.header = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    for (const auto& c : split(line)) row.push_back(parse_real(c));
    if (row.size() != t.header.size()) throw std::invalid_argument("parse_csv: ragged row");
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline std::string ladder_csv(const DeGiorgiLadder& l) {
  std::string out = "n,K_n,A_n_measure,y_n\n";
  for (std::size_t n = 0; n < l.levels.size(); ++n) {
    out += std::to_string(n) + "," + format_real(l.levels[n]) + "," + format_real(l.measures[n]) + "," +
           format_real(l.energies[n]) + "\n";
  }
  return out;
}

inline json grid_to_json(const GridSpec& g) {
  json cells = json::array();
  json extent = json::array();
  for (int a = 0; a < g.dim(); ++a) {
    cells.push_back(g.cells(a));
    extent.push_back(g.extent(a));
  }
  return {{"dim", g.dim()}, {"cells", cells}, {"extent", extent}};
}

inline GridSpec grid_from_json(const json& j) {
  const int dim = j.at("dim").get<int>();
  std::array<int, 2> c{1, 1};
  std::array<double, 2> e{1.0, 1.0};
  for (int a = 0; a < dim; ++a) {
    c[a] = j.at("cells").at(a).get<int>();
    e[a] = j.at("extent").at(a).get<double>();
  }
  return GridSpec(dim, c, e);
}

inline json metadata_json(const RunConfig& cfg, const RunResult& r) {
  const int N = r.resolved.N;
  json j;
  j["version"] = KSCHEMO_VERSION;
  j["config"] = to_json(cfg);
  j["regime"] = to_string(classify_regime(cfg.model, N));
  j["termination"] = to_string(r.reason);
  j["steps"] = r.steps;
  j["t_final"] = r.final_state.t;
  j["initial_sup_u"] = r.initial_sup_u;
  j["resolved_diagnostics"] = {{"N", N},
                               {"s", r.resolved.s},
                               {"fr1_p", r.resolved.fr1_p},
                               {"s14_exponent", r.resolved.s14_exponent},
                               {"m_s", r.resolved.m_s}};
  return j;
}

inline json snapshots_json(const SpaceTimeSeries& s, double m_s) {
  json j;
  j["grid"] = grid_to_json(s.grid);
  j["m_s"] = m_s;
  j["samples"] = json::array();
  for (const auto& smp : s.samples) j["samples"].push_back({{"t", smp.t}, {"weight", smp.weight}, {"values", smp.values}});
  return j;
}

inline SpaceTimeSeries snapshots_from_json(const json& j) {
  SpaceTimeSeries s;
  s.grid = grid_from_json(j.at("grid"));
  for (const auto& smp : j.at("samples")) {
    s.samples.push_back({smp.at("t").get<double>(), smp.at("weight").get<double>(),
                         smp.at("values").get<std::vector<double>>()});
  }
  return s;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
}

// Writes diagnostics.csv, metadata.json and, when kept, snapshots.json.
inline void write_run_artifacts(const std::filesystem::path& dir, const RunConfig& cfg, const RunResult& r) {
  ensure_dir(dir);
  write_text(dir / "diagnostics.csv", diagnostics_csv(r.records, cfg.diagnostics.p_list));
  write_text(dir / "metadata.json", metadata_json(cfg, r).dump(2) + "\n");
  if (cfg.save_snapshots) write_text(dir / "snapshots.json", snapshots_json(r.snapshots, r.resolved.m_s).dump() + "\n");
}

}  // namespace kschemo
