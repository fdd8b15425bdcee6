#pragma once

// JSON run and sweep configurations. Parsing is strict: unknown keys and every
// invariant violation are collected as path-qualified errors, so no invalid
// job is ever started. Serialization writes every resolved field, so a parsed
// config round-trips exactly.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "kschemo/diagnostics.hpp"
#include "kschemo/model.hpp"
#include "kschemo/run.hpp"
#include "kschemo/solver.hpp"

namespace kschemo {

using json = nlohmann::json;

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> issues)
      : std::runtime_error(join(issues)), issues_(std::move(issues)) {}
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  static std::string join(const std::vector<std::string>& xs) {
    std::string s = "invalid configuration:";
    for (const auto& x : xs) s += "\n  " + x;
    return s;
  }
  std::vector<std::string> issues_;
};

struct RunConfig {
  ModelParams model;
  GridSpec grid = GridSpec::line(64, 1.0);
  InitialSpec initial;
  StepControl step;
  double horizon = 1.0;
  int samples = 11;
  DiagnosticsConfig diagnostics;
  std::uint64_t seed = 0;
  long max_steps = 0;
  bool save_snapshots = true;

  RunOptions run_options() const { return RunOptions{horizon, samples, save_snapshots, max_steps}; }
  bool operator==(const RunConfig&) const = default;
};

struct SweepThresholds {
  double sup_multiple = 1e4;
  std::optional<double> dt_min;  // default 1e-12 * horizon
  double bounded_multiple = 50.0;
  bool operator==(const SweepThresholds&) const = default;
};

struct SweepConfig {
  std::vector<double> m_grid;
  std::vector<double> q_grid;
  RunConfig base;
  SweepThresholds thresholds;
  int workers = 1;

  std::size_t job_count() const { return m_grid.size() * q_grid.size(); }

  // The run configuration of grid point (i, j).
  RunConfig job(std::size_t i, std::size_t j) const {
    RunConfig c = base;
    c.model.m = m_grid[i];
    c.model.q = q_grid[j];
    c.step.sup_multiple = thresholds.sup_multiple;
    c.step.dt_min = thresholds.dt_min.value_or(1e-12 * base.horizon);
    return c;
  }
  bool operator==(const SweepConfig&) const = default;
};

namespace detail {

class Reader {
 public:
  Reader(const json& node, std::string path, std::vector<std::string>& errors)
      : node_(node), path_(std::move(path)), errors_(errors) {}

  bool is_object() {
    if (!node_.is_object()) {
      error("", "must be an object");
      return false;
    }
    return true;
  }

  void allow(std::initializer_list<const char*> keys) {
    std::set<std::string> ok(keys.begin(), keys.end());
    for (auto it = node_.begin(); it != node_.end(); ++it) {
      if (!ok.count(it.key())) error(it.key(), "unknown key");
    }
  }

  bool has(const char* key) const { return node_.contains(key) && !node_.at(key).is_null(); }
  const json& at(const char* key) const { return node_.at(key); }
  std::string path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void error(const std::string& key, const std::string& msg) {
    errors_.push_back((key.empty() ? (path_.empty() ? std::string("<root>") : path_) : path(key)) + ": " + msg);
  }

  double number(const char* key, double fallback) {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
      const auto s = v.get<std::string>();
      if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
    }
    error(key, "must be a number");
    return fallback;
  }

  std::optional<double> optional_number(const char* key) {
    if (!has(key)) return std::nullopt;
    return number(key, 0.0);
  }

  long integer(const char* key, long fallback) {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (v.is_number_integer()) return v.get<long>();
    error(key, "must be an integer");
    return fallback;
  }

  bool boolean(const char* key, bool fallback) {
    if (!has(key)) return fallback;
    if (at(key).is_boolean()) return at(key).get<bool>();
    error(key, "must be a boolean");
    return fallback;
  }

  std::string string(const char* key, const std::string& fallback) {
    if (!has(key)) return fallback;
    if (at(key).is_string()) return at(key).get<std::string>();
    error(key, "must be a string");
    return fallback;
  }

  std::vector<double> numbers(const char* key, std::vector<double> fallback) {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_array()) {
      error(key, "must be an array of numbers");
      return fallback;
    }
    std::vector<double> out;
    for (const auto& x : v) {
      if (x.is_number()) {
        out.push_back(x.get<double>());
      } else if (x.is_string() && (x.get<std::string>() == "inf" || x.get<std::string>() == "infinity")) {
        out.push_back(std::numeric_limits<double>::infinity());
      } else {
        error(key, "must be an array of numbers");
        return fallback;
      }
    }
    return out;
  }

  Reader child(const char* key) const { return Reader(at(key), path(key), errors_); }

 private:
  const json& node_;
  std::string path_;
  std::vector<std::string>& errors_;
};

inline json number_or_inf(double x) {
  if (std::isinf(x)) return "inf";
  return x;
}

inline PresetSpec parse_preset(Reader r, const PresetSpec& fallback) {
  PresetSpec p;
  if (!r.is_object()) return fallback;
  const std::string name = r.string("preset", "");
  const auto kind = preset_from_string(name);
  if (!kind) {
    r.error("preset", "must be one of constant, gaussian, two-bumps, random-nonneg");
    return fallback;
  }
  p.kind = *kind;
  switch (p.kind) {
    case Preset::Constant:
      r.allow({"preset", "value"});
      p.value = r.number("value", p.value);
      if (!(p.value >= 0.0) || !std::isfinite(p.value)) r.error("value", "must be >= 0");
      break;
    case Preset::Gaussian:
    case Preset::TwoBumps: {
      r.allow({"preset", "mass", "width", "centers"});
      p.mass = r.number("mass", p.mass);
      p.width = r.number("width", p.width);
      if (!(p.mass > 0.0)) r.error("mass", "must be > 0");
      if (!(p.width > 0.0)) r.error("width", "must be > 0");
      if (r.has("centers")) {
        const json& cs = r.at("centers");
        bool ok = cs.is_array();
        if (ok) {
          for (const auto& c : cs) {
            if (!c.is_array() || c.empty() || c.size() > 2 || !c[0].is_number() ||
                (c.size() == 2 && !c[1].is_number())) {
              ok = false;
              break;
            }
            p.centers.push_back({c[0].get<double>(), c.size() == 2 ? c[1].get<double>() : 0.0});
          }
        }
        if (!ok) r.error("centers", "must be an array of [x] or [x, y] coordinates");
      }
      break;
    }
    case Preset::RandomNonneg:
      r.allow({"preset", "amplitude", "offset", "seed"});
      p.amplitude = r.number("amplitude", p.amplitude);
      p.offset = r.number("offset", p.offset);
      if (!(p.amplitude >= 0.0)) r.error("amplitude", "must be >= 0");
      if (!(p.offset >= 0.0)) r.error("offset", "must be >= 0");
      if (r.has("seed")) {
        if (r.at("seed").is_number_unsigned()) {
          p.seed = r.at("seed").get<std::uint64_t>();
        } else {
          r.error("seed", "must be a nonnegative integer");
        }
      }
      break;
  }
  return p;
}

inline json preset_to_json(const PresetSpec& p) {
  json j;
  j["preset"] = to_string(p.kind);
  switch (p.kind) {
    case Preset::Constant:
      j["value"] = p.value;
      break;
    case Preset::Gaussian:
    case Preset::TwoBumps:
      j["mass"] = p.mass;
      j["width"] = p.width;
      if (!p.centers.empty()) {
        j["centers"] = json::array();
        for (const auto& c : p.centers) j["centers"].push_back({c[0], c[1]});
      }
      break;
    case Preset::RandomNonneg:
      j["amplitude"] = p.amplitude;
      j["offset"] = p.offset;
      if (p.seed) j["seed"] = *p.seed;
      break;
  }
  return j;
}

inline RunConfig parse_run_object(Reader r) {
  RunConfig cfg;
  if (!r.is_object()) return cfg;
  r.allow({"model", "grid", "initial", "step", "horizon", "samples", "diagnostics", "seed", "max_steps",
           "save_snapshots"});

  cfg.horizon = r.number("horizon", cfg.horizon);
  if (!(cfg.horizon > 0.0) || !std::isfinite(cfg.horizon)) r.error("horizon", "must be > 0");
  cfg.samples = static_cast<int>(r.integer("samples", cfg.samples));
  if (cfg.samples < 2) r.error("samples", "must be >= 2");
  if (r.has("seed")) {
    if (r.at("seed").is_number_unsigned()) {
      cfg.seed = r.at("seed").get<std::uint64_t>();
    } else {
      r.error("seed", "must be a nonnegative integer");
    }
  }
  cfg.max_steps = r.integer("max_steps", 0);
  if (cfg.max_steps < 0) r.error("max_steps", "must be >= 0");
  cfg.save_snapshots = r.boolean("save_snapshots", true);

  if (r.has("model")) {
    Reader m = r.child("model");
    if (m.is_object()) {
      m.allow({"m", "q", "sigma", "chemotaxis"});
      cfg.model.m = m.number("m", cfg.model.m);
      cfg.model.q = m.number("q", cfg.model.q);
      cfg.model.sigma = m.number("sigma", cfg.model.sigma);
      cfg.model.chemotaxis = m.boolean("chemotaxis", true);
      if (!(cfg.model.m > 0.0) || !std::isfinite(cfg.model.m)) m.error("m", "must satisfy m > 0");
      if (!(cfg.model.q > 0.0) || !std::isfinite(cfg.model.q)) m.error("q", "must satisfy q > 0");
      if (!(cfg.model.sigma >= 0.0 && cfg.model.sigma < 1.0)) m.error("sigma", "must satisfy 0 <= sigma < 1");
    }
  }

  if (r.has("grid")) {
    Reader g = r.child("grid");
    if (g.is_object()) {
      g.allow({"dim", "cells", "extent"});
      const int dim = static_cast<int>(g.integer("dim", 1));
      const std::vector<double> cells = g.numbers("cells", std::vector<double>(dim, 64.0));
      const std::vector<double> extent = g.numbers("extent", std::vector<double>(dim, 1.0));
      if (dim != 1 && dim != 2) {
        g.error("dim", "must be 1 or 2");
      } else if (static_cast<int>(cells.size()) != dim || static_cast<int>(extent.size()) != dim) {
        g.error("", "cells and extent must have dim entries");
      } else {
        bool ok = true;
        std::array<int, 2> c{1, 1};
        std::array<double, 2> e{1.0, 1.0};
        for (int a = 0; a < dim; ++a) {
          if (!(cells[a] >= 3.0) || cells[a] != std::floor(cells[a]) || cells[a] > 1e6) {
            g.error("cells", "entries must be integers >= 3");
            ok = false;
          }
          if (!(extent[a] > 0.0) || !std::isfinite(extent[a])) {
            g.error("extent", "entries must be > 0");
            ok = false;
          }
          c[a] = static_cast<int>(cells[a]);
          e[a] = extent[a];
        }
        if (ok) cfg.grid = GridSpec(dim, c, e);
      }
    }
  }

  if (r.has("initial")) {
    Reader i = r.child("initial");
    if (i.is_object()) {
      i.allow({"u", "v"});
      if (i.has("u")) cfg.initial.u = parse_preset(i.child("u"), cfg.initial.u);
      if (i.has("v")) cfg.initial.v = parse_preset(i.child("v"), cfg.initial.v);
    }
  }

  cfg.step.dt_min = 1e-12 * cfg.horizon;
  cfg.step.dt_max = 1e-2 * cfg.horizon;
  if (r.has("step")) {
    Reader s = r.child("step");
    if (s.is_object()) {
      s.allow({"scheme", "safety", "dt_min", "dt_max", "v_solve_tol", "v_solve_max_iters", "u_solve_tol",
               "sup_multiple"});
      const std::string scheme = s.string("scheme", "explicit");
      if (scheme == "explicit") {
        cfg.step.scheme = Scheme::Explicit;
      } else if (scheme == "semi-implicit") {
        cfg.step.scheme = Scheme::SemiImplicit;
      } else {
        s.error("scheme", "must be explicit or semi-implicit");
      }
      cfg.step.safety = s.number("safety", cfg.step.safety);
      cfg.step.dt_min = s.number("dt_min", cfg.step.dt_min);
      cfg.step.dt_max = s.number("dt_max", cfg.step.dt_max);
      cfg.step.v_solve_tol = s.number("v_solve_tol", cfg.step.v_solve_tol);
      cfg.step.v_solve_max_iters = static_cast<int>(s.integer("v_solve_max_iters", cfg.step.v_solve_max_iters));
      cfg.step.u_solve_tol = s.number("u_solve_tol", cfg.step.u_solve_tol);
      cfg.step.sup_multiple = s.number("sup_multiple", cfg.step.sup_multiple);
    }
  }
  try {
    cfg.step.validate();
  } catch (const std::invalid_argument& e) {
    r.error("step", e.what());
  }

  if (r.has("diagnostics")) {
    Reader d = r.child("diagnostics");
    if (d.is_object()) {
      d.allow({"p_list", "s", "fr1_p", "analytic_dim", "ladder_k", "ladder_levels"});
      cfg.diagnostics.p_list = d.numbers("p_list", cfg.diagnostics.p_list);
      cfg.diagnostics.s = d.optional_number("s");
      cfg.diagnostics.fr1_p = d.optional_number("fr1_p");
      if (d.has("analytic_dim")) cfg.diagnostics.analytic_dim = static_cast<int>(d.integer("analytic_dim", 2));
      if (d.has("ladder_k")) {
        const json& k = d.at("ladder_k");
        if (k.is_number()) {
          cfg.diagnostics.ladder_k = LadderKPolicy::Fixed;
          cfg.diagnostics.ladder_k_value = k.get<double>();
        } else if (k.is_string() && k.get<std::string>() == "max_sup") {
          cfg.diagnostics.ladder_k = LadderKPolicy::MaxSup;
        } else if (k.is_string() && k.get<std::string>() == "initial") {
          cfg.diagnostics.ladder_k = LadderKPolicy::Initial;
        } else {
          d.error("ladder_k", "must be \"max_sup\", \"initial\" or a positive number");
        }
      }
      cfg.diagnostics.ladder_levels = static_cast<int>(d.integer("ladder_levels", cfg.diagnostics.ladder_levels));
      if (cfg.diagnostics.fr1_p) {
        const int N = cfg.diagnostics.analytic_dim.value_or(std::max(2, cfg.grid.dim()));
        if (!(*cfg.diagnostics.fr1_p > (N + 2.0) / 2.0)) d.error("fr1_p", "must satisfy p > (N+2)/2");
      }
    }
  }
  try {
    cfg.diagnostics.validate();
  } catch (const std::invalid_argument& e) {
    r.error("diagnostics", e.what());
  }
  return cfg;
}

// Checks that need the whole config: initial data must be constructible.
inline void validate_cross(const RunConfig& cfg, const std::string& path, std::vector<std::string>& errors) {
  try {
    (void)make_initial_data(cfg.initial, cfg.grid, cfg.seed);
  } catch (const std::invalid_argument& e) {
    errors.push_back((path.empty() ? std::string("initial") : path + ".initial") + ": " + e.what());
  }
}

inline json parse_json_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("<root>: not valid JSON: ") + e.what()});
  }
}

}  // namespace detail

inline RunConfig parse_run_config(const json& j) {
  std::vector<std::string> errors;
  RunConfig cfg = detail::parse_run_object(detail::Reader(j, "", errors));
  if (errors.empty()) detail::validate_cross(cfg, "", errors);
  if (!errors.empty()) throw ConfigError(errors);
  return cfg;
}

inline RunConfig parse_run_config(const std::string& text) { return parse_run_config(detail::parse_json_text(text)); }

inline SweepConfig parse_sweep_config(const json& j) {
  std::vector<std::string> errors;
  SweepConfig cfg;
  detail::Reader r(j, "", errors);
  if (r.is_object()) {
    r.allow({"m_grid", "q_grid", "template", "thresholds", "workers"});
    auto check_grid = [&](const char* key, std::vector<double>& out, const char* sym) {
      if (!r.has(key)) {
        r.error(key, "is required");
        return;
      }
      out = r.numbers(key, {});
      if (out.empty()) r.error(key, "must be nonempty");
      for (std::size_t k = 0; k < out.size(); ++k) {
        if (!(out[k] > 0.0) || !std::isfinite(out[k])) {
          r.error(key + std::string("[") + std::to_string(k) + "]", std::string("must satisfy ") + sym + " > 0");
        }
        if (k > 0 && !(out[k] > out[k - 1])) r.error(key, "must be strictly increasing");
      }
    };
    check_grid("m_grid", cfg.m_grid, "m");
    check_grid("q_grid", cfg.q_grid, "q");
    if (r.has("template")) cfg.base = detail::parse_run_object(r.child("template"));
    if (r.has("thresholds")) {
      detail::Reader t = r.child("thresholds");
      if (t.is_object()) {
        t.allow({"sup_multiple", "dt_min", "bounded_multiple"});
        cfg.thresholds.sup_multiple = t.number("sup_multiple", cfg.thresholds.sup_multiple);
        cfg.thresholds.dt_min = t.optional_number("dt_min");
        cfg.thresholds.bounded_multiple = t.number("bounded_multiple", cfg.thresholds.bounded_multiple);
        if (!(cfg.thresholds.sup_multiple > 1.0)) t.error("sup_multiple", "must be > 1");
        if (cfg.thresholds.dt_min && !(*cfg.thresholds.dt_min > 0.0)) t.error("dt_min", "must be > 0");
        if (!(cfg.thresholds.bounded_multiple >= 1.0)) t.error("bounded_multiple", "must be >= 1");
      }
    }
    cfg.workers = static_cast<int>(r.integer("workers", 1));
    if (cfg.workers < 1) r.error("workers", "must be >= 1");
  }
  if (errors.empty()) {
    for (std::size_t i = 0; i < cfg.m_grid.size(); ++i) {
      for (std::size_t k = 0; k < cfg.q_grid.size(); ++k) {
        const RunConfig job = cfg.job(i, k);
        try {
          job.step.validate();
        } catch (const std::invalid_argument& e) {
          errors.push_back("thresholds: " + std::string(e.what()));
        }
      }
    }
    if (errors.empty()) detail::validate_cross(cfg.base, "template", errors);
  }
  if (!errors.empty()) throw ConfigError(errors);
  return cfg;
}

inline SweepConfig parse_sweep_config(const std::string& text) {
  return parse_sweep_config(detail::parse_json_text(text));
}

// A document with an m_grid key is a sweep, anything else a single run.
inline std::variant<RunConfig, SweepConfig> parse_config(const std::string& text) {
  const json j = detail::parse_json_text(text);
  if (j.is_object() && j.contains("m_grid")) return parse_sweep_config(j);
  return parse_run_config(j);
}

inline json to_json(const RunConfig& c) {
  json j;
  j["model"] = {{"m", c.model.m}, {"q", c.model.q}, {"sigma", c.model.sigma}, {"chemotaxis", c.model.chemotaxis}};
  json cells = json::array();
  json extent = json::array();
  for (int a = 0; a < c.grid.dim(); ++a) {
    cells.push_back(c.grid.cells(a));
    extent.push_back(c.grid.extent(a));
  }
  j["grid"] = {{"dim", c.grid.dim()}, {"cells", cells}, {"extent", extent}};
  j["initial"] = {{"u", detail::preset_to_json(c.initial.u)}, {"v", detail::preset_to_json(c.initial.v)}};
  j["step"] = {{"scheme", to_string(c.step.scheme)},
               {"safety", c.step.safety},
               {"dt_min", c.step.dt_min},
               {"dt_max", c.step.dt_max},
               {"v_solve_tol", c.step.v_solve_tol},
               {"v_solve_max_iters", c.step.v_solve_max_iters},
               {"u_solve_tol", c.step.u_solve_tol},
               {"sup_multiple", c.step.sup_multiple}};
  j["horizon"] = c.horizon;
  j["samples"] = c.samples;
  json d;
  d["p_list"] = json::array();
  for (double p : c.diagnostics.p_list) d["p_list"].push_back(detail::number_or_inf(p));
  if (c.diagnostics.s) d["s"] = *c.diagnostics.s;
  if (c.diagnostics.fr1_p) d["fr1_p"] = *c.diagnostics.fr1_p;
  if (c.diagnostics.analytic_dim) d["analytic_dim"] = *c.diagnostics.analytic_dim;
  if (c.diagnostics.ladder_k == LadderKPolicy::Fixed) {
    d["ladder_k"] = c.diagnostics.ladder_k_value;
  } else {
    d["ladder_k"] = to_string(c.diagnostics.ladder_k);
  }
  d["ladder_levels"] = c.diagnostics.ladder_levels;
  j["diagnostics"] = d;
  j["seed"] = c.seed;
  j["max_steps"] = c.max_steps;
  j["save_snapshots"] = c.save_snapshots;
  return j;
}

inline json to_json(const SweepConfig& c) {
  json j;
  j["m_grid"] = c.m_grid;
  j["q_grid"] = c.q_grid;
  j["template"] = to_json(c.base);
  json t = {{"sup_multiple", c.thresholds.sup_multiple}, {"bounded_multiple", c.thresholds.bounded_multiple}};
  if (c.thresholds.dt_min) t["dt_min"] = *c.thresholds.dt_min;
  j["thresholds"] = t;
  j["workers"] = c.workers;
  return j;
}

}  // namespace kschemo
