#pragma once

// Model parameters, hypothesis classification of (m, q) and initial data.

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "kschemo/grid.hpp"

namespace kschemo {

// Parameters of the regularized system
//   u_t - m div((u+sigma)^{m-1} grad u) = -div(u^q grad v),  v_t - lap v + v = u.
struct ModelParams {
  double m = 1.0;
  double q = 1.0;
  double sigma = 0.0;
  // Debug switch: drops the chemotactic term (pure porous-medium/heat flow for u).
  bool chemotaxis = true;

  void validate() const {
    if (!(m > 0.0) || !std::isfinite(m)) throw std::invalid_argument("model.m must be > 0");
    if (!(q > 0.0) || !std::isfinite(q)) throw std::invalid_argument("model.q must be > 0");
    if (!(sigma >= 0.0 && sigma < 1.0)) throw std::invalid_argument("model.sigma must be in [0, 1)");
  }

  bool operator==(const ModelParams&) const = default;
};

enum class RegimeLabel { H3, H4, CriticalClassical, Outside };

inline const char* to_string(RegimeLabel r) {
  switch (r) {
    case RegimeLabel::H3: return "H3";
    case RegimeLabel::H4: return "H4";
    case RegimeLabel::CriticalClassical: return "CriticalClassical";
    case RegimeLabel::Outside: return "Outside";
  }
  return "?";
}

struct RegimeFlags {
  bool h3 = false;
  bool h4 = false;
  bool critical_classical = false;
};

inline RegimeFlags regime_flags(double m, double q, int analytic_dim) {
  RegimeFlags f;
  f.h3 = m > q && q > 0.0;
  const double lower = q + (q - 1.0) / (analytic_dim + 1);
  f.h4 = m > 0.0 && q > 0.0 && q <= 1.0 && lower <= m && m <= q;
  f.critical_classical = m == 1.0 && q == 1.0;
  return f;
}

// CriticalClassical wins over H4 when both apply.
inline RegimeLabel classify_regime(const ModelParams& params, int analytic_dim) {
  const RegimeFlags f = regime_flags(params.m, params.q, analytic_dim);
  if (f.critical_classical) return RegimeLabel::CriticalClassical;
  if (f.h3) return RegimeLabel::H3;
  if (f.h4) return RegimeLabel::H4;
  return RegimeLabel::Outside;
}

enum class Preset { Constant, Gaussian, TwoBumps, RandomNonneg };

inline const char* to_string(Preset p) {
  switch (p) {
    case Preset::Constant: return "constant";
    case Preset::Gaussian: return "gaussian";
    case Preset::TwoBumps: return "two-bumps";
    case Preset::RandomNonneg: return "random-nonneg";
  }
  return "?";
}

inline std::optional<Preset> preset_from_string(const std::string& s) {
  if (s == "constant") return Preset::Constant;
  if (s == "gaussian" || s == "gaussian-bump") return Preset::Gaussian;
  if (s == "two-bumps") return Preset::TwoBumps;
  if (s == "random-nonneg") return Preset::RandomNonneg;
  return std::nullopt;
}

// Description of one initial field. Which members matter depends on `kind`:
//   constant       value
//   gaussian       mass, width, centers[0] (default: domain center)
//   two-bumps      mass (split evenly), width, centers[0..1] (default: 0.3/0.7 along x)
//   random-nonneg  offset + amplitude * U[0,1), seed (default: the run seed)
struct PresetSpec {
  Preset kind = Preset::Constant;
  double value = 0.0;
  double mass = 1.0;
  double width = 0.1;
  std::vector<std::array<double, 2>> centers;
  double amplitude = 1.0;
  double offset = 0.0;
  std::optional<std::uint64_t> seed;

  bool operator==(const PresetSpec&) const = default;
};

struct InitialSpec {
  PresetSpec u{Preset::Constant, 1.0};
  PresetSpec v{Preset::Constant, 0.0};

  bool operator==(const InitialSpec&) const = default;
};

struct InitialData {
  Field u0;
  Field v0;
};

namespace detail {

// Uniform double in [0, 1) from the top 53 bits; independent of the standard
// library's distribution implementation.
inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline Field gaussian_bump(const GridSpec& g, double mass, double width, std::array<double, 2> c) {
  Field f(g);
  const double inv = 1.0 / (2.0 * width * width);
  for (int j = 0; j < g.cells(1); ++j) {
    for (int i = 0; i < g.cells(0); ++i) {
      double r2 = 0.0;
      const double dx = g.center(0, i) - c[0];
      r2 += dx * dx;
      if (g.dim() == 2) {
        const double dy = g.center(1, j) - c[1];
        r2 += dy * dy;
      }
      f.at(i, j) = std::exp(-r2 * inv);
    }
  }
  const double raw = integrate(f);
  if (!(raw > 0.0)) throw std::invalid_argument("initial data: gaussian bump vanishes on the grid");
  const double scale = mass / raw;
  for (double& x : f.data()) x *= scale;
  return f;
}

inline double max_spacing(const GridSpec& g) {
  double h = g.spacing(0);
  for (int a = 1; a < g.dim(); ++a) h = std::max(h, g.spacing(a));
  return h;
}

}  // namespace detail

inline Field make_field(const PresetSpec& spec, const GridSpec& grid, std::uint64_t run_seed = 0) {
  switch (spec.kind) {
    case Preset::Constant: {
      if (!(spec.value >= 0.0) || !std::isfinite(spec.value)) {
        throw std::invalid_argument("initial data: constant value must be >= 0");
      }
      return Field(grid, spec.value);
    }
    case Preset::Gaussian:
    case Preset::TwoBumps: {
      if (!(spec.mass > 0.0) || !std::isfinite(spec.mass)) {
        throw std::invalid_argument("initial data: mass must be > 0");
      }
      if (!(spec.width >= 2.0 * detail::max_spacing(grid))) {
        throw std::invalid_argument("initial data: width must be at least 2 cells (under-resolved)");
      }
      const double lx = grid.extent(0);
      const double ly = grid.dim() == 2 ? grid.extent(1) : 0.0;
      if (spec.kind == Preset::Gaussian) {
        const auto c = spec.centers.empty() ? std::array<double, 2>{0.5 * lx, 0.5 * ly} : spec.centers[0];
        return detail::gaussian_bump(grid, spec.mass, spec.width, c);
      }
      const auto c0 = spec.centers.size() > 0 ? spec.centers[0] : std::array<double, 2>{0.3 * lx, 0.5 * ly};
      const auto c1 = spec.centers.size() > 1 ? spec.centers[1] : std::array<double, 2>{0.7 * lx, 0.5 * ly};
      Field a = detail::gaussian_bump(grid, 0.5 * spec.mass, spec.width, c0);
      const Field b = detail::gaussian_bump(grid, 0.5 * spec.mass, spec.width, c1);
      for (std::size_t k = 0; k < a.size(); ++k) a[k] += b[k];
      return a;
    }
    case Preset::RandomNonneg: {
      if (!(spec.amplitude >= 0.0) || !(spec.offset >= 0.0)) {
        throw std::invalid_argument("initial data: amplitude and offset must be >= 0");
      }
      std::mt19937_64 rng(spec.seed.value_or(run_seed));
      Field f(grid);
      for (double& x : f.data()) x = spec.offset + spec.amplitude * detail::unit_uniform(rng);
      return f;
    }
  }
  throw std::invalid_argument("initial data: unknown preset");
}

inline InitialData make_initial_data(const InitialSpec& spec, const GridSpec& grid,
                                     std::uint64_t run_seed = 0) {
  // The v field draws from a different stream than u when both are random.
  InitialData d{make_field(spec.u, grid, run_seed), make_field(spec.v, grid, run_seed + 0x9e3779b97f4a7c15ULL)};
  if (!d.u0.all_finite() || !d.v0.all_finite() || d.u0.min() < 0.0 || d.v0.min() < 0.0) {
    throw std::invalid_argument("initial data: fields must be finite and nonnegative");
  }
  return d;
}

}  // namespace kschemo
