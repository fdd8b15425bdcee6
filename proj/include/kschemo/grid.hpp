#pragma once

// Uniform structured grids on axis-aligned boxes, cell-averaged fields and
// the finite-volume operators used by the solver. Boundary faces always carry
// zero flux (homogeneous Neumann closure).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace kschemo {

class GridSpec {
 public:
  static constexpr int kMaxDim = 2;

  GridSpec() = default;

  GridSpec(int dim, std::array<int, kMaxDim> cells, std::array<double, kMaxDim> extent)
      : dim_(dim), cells_(cells), extent_(extent) {
    if (dim_ < 1 || dim_ > kMaxDim) {
      throw std::invalid_argument("grid: dim must be 1 or 2, got " + std::to_string(dim_));
    }
    for (int a = 0; a < dim_; ++a) {
      if (cells_[a] < 3) {
        throw std::invalid_argument("grid: cells_per_axis[" + std::to_string(a) + "] must be >= 3");
      }
      if (!(extent_[a] > 0.0) || !std::isfinite(extent_[a])) {
        throw std::invalid_argument("grid: extent_per_axis[" + std::to_string(a) + "] must be > 0");
      }
    }
    for (int a = dim_; a < kMaxDim; ++a) {
      cells_[a] = 1;
      extent_[a] = 1.0;
    }
  }

  static GridSpec line(int n, double length) { return GridSpec(1, {n, 1}, {length, 1.0}); }
  static GridSpec rect(int nx, int ny, double lx, double ly) {
    return GridSpec(2, {nx, ny}, {lx, ly});
  }

  int dim() const { return dim_; }
  int cells(int axis) const { return cells_[axis]; }
  double extent(int axis) const { return extent_[axis]; }
  double spacing(int axis) const { return extent_[axis] / cells_[axis]; }
  double min_spacing() const {
    double h = spacing(0);
    for (int a = 1; a < dim_; ++a) h = std::min(h, spacing(a));
    return h;
  }

  std::size_t size() const {
    return static_cast<std::size_t>(cells_[0]) * static_cast<std::size_t>(cells_[1]);
  }
  double cell_volume() const {
    double v = 1.0;
    for (int a = 0; a < dim_; ++a) v *= spacing(a);
    return v;
  }
  double domain_volume() const {
    double v = 1.0;
    for (int a = 0; a < dim_; ++a) v *= extent_[a];
    return v;
  }

  std::size_t index(int i, int j = 0) const {
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(cells_[0]) * static_cast<std::size_t>(j);
  }
  // Cell-center coordinate along an axis.
  double center(int axis, int i) const { return (i + 0.5) * spacing(axis); }

  // Cell-index stride when stepping one cell along `axis`.
  std::size_t stride(int axis) const { return axis == 0 ? 1 : static_cast<std::size_t>(cells_[0]); }

  // Faces normal to `axis`, boundary faces included.
  std::size_t face_count(int axis) const {
    return axis == 0 ? static_cast<std::size_t>(cells_[0] + 1) * cells_[1]
                     : static_cast<std::size_t>(cells_[0]) * (cells_[1] + 1);
  }
  // Face between cell (i-1) and cell i along axis 0 (i = 0..nx), row j.
  std::size_t face_index(int axis, int i, int j) const {
    return axis == 0 ? static_cast<std::size_t>(i) + static_cast<std::size_t>(cells_[0] + 1) * j
                     : static_cast<std::size_t>(i) + static_cast<std::size_t>(cells_[0]) * j;
  }

  bool operator==(const GridSpec&) const = default;

 private:
  int dim_ = 1;
  std::array<int, kMaxDim> cells_{3, 1};
  std::array<double, kMaxDim> extent_{1.0, 1.0};
};

class Field {
 public:
  Field() = default;
  explicit Field(const GridSpec& grid, double fill = 0.0) : grid_(grid), values_(grid.size(), fill) {}
  Field(const GridSpec& grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
      throw std::invalid_argument("field: value count " + std::to_string(values_.size()) +
                                  " does not match grid size " + std::to_string(grid_.size()));
    }
  }

  const GridSpec& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  double& operator[](std::size_t k) { return values_[k]; }
  double operator[](std::size_t k) const { return values_[k]; }
  double& at(int i, int j = 0) { return values_[grid_.index(i, j)]; }
  double at(int i, int j = 0) const { return values_[grid_.index(i, j)]; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  std::vector<double>& data() { return values_; }
  const std::vector<double>& data() const { return values_; }

  double min() const { return *std::min_element(values_.begin(), values_.end()); }
  double max() const { return *std::max_element(values_.begin(), values_.end()); }
  bool all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double x) { return std::isfinite(x); });
  }

 private:
  GridSpec grid_;
  std::vector<double> values_;
};

// One real per face normal to `axis`, boundary faces included. Face f along the
// axis sits between cells f-1 and f; faces 0 and n are boundary faces.
struct FaceValues {
  GridSpec grid;
  int axis = 0;
  std::vector<double> values;

  FaceValues() = default;
  FaceValues(const GridSpec& g, int ax) : grid(g), axis(ax), values(g.face_count(ax), 0.0) {}

  double& at(int i, int j) { return values[grid.face_index(axis, i, j)]; }
  double at(int i, int j) const { return values[grid.face_index(axis, i, j)]; }
};

namespace detail {

inline void check_axis(const GridSpec& g, int axis) {
  if (axis < 0 || axis >= g.dim()) {
    throw std::out_of_range("axis " + std::to_string(axis) + " out of range for dim " +
                            std::to_string(g.dim()));
  }
}

// Visit every interior face normal to `axis` as (face index, left cell, right cell).
template <class Fn>
void for_each_interior_face(const GridSpec& g, int axis, Fn&& fn) {
  const int nx = g.cells(0);
  const int ny = g.cells(1);
  if (axis == 0) {
    for (int j = 0; j < ny; ++j) {
      for (int i = 1; i < nx; ++i) {
        fn(g.face_index(0, i, j), g.index(i - 1, j), g.index(i, j));
      }
    }
  } else {
    for (int j = 1; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        fn(g.face_index(1, i, j), g.index(i, j - 1), g.index(i, j));
      }
    }
  }
}

// Visit each cell with the indices of its low and high faces along `axis`.
template <class Fn>
void for_each_cell_faces(const GridSpec& g, int axis, Fn&& fn) {
  const int nx = g.cells(0);
  const int ny = g.cells(1);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const std::size_t lo = axis == 0 ? g.face_index(0, i, j) : g.face_index(1, i, j);
      const std::size_t hi = axis == 0 ? g.face_index(0, i + 1, j) : g.face_index(1, i, j + 1);
      fn(g.index(i, j), lo, hi);
    }
  }
}

// Neumaier-compensated sum.
inline double compensated_sum(std::span<const double> xs) {
  double sum = 0.0;
  double carry = 0.0;
  for (double x : xs) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      carry += (sum - t) + x;
    } else {
      carry += (x - t) + sum;
    }
    sum = t;
  }
  return sum + carry;
}

}  // namespace detail

inline FaceValues face_gradient(const Field& f, int axis) {
  const GridSpec& g = f.grid();
  detail::check_axis(g, axis);
  FaceValues out(g, axis);
  const double inv_h = 1.0 / g.spacing(axis);
  detail::for_each_interior_face(g, axis, [&](std::size_t face, std::size_t left, std::size_t right) {
    out.values[face] = (f[right] - f[left]) * inv_h;
  });
  return out;
}

// Discrete divergence of face fluxes (one FaceValues per axis), cell-centered.
inline Field divergence(const GridSpec& g, std::span<const FaceValues> fluxes) {
  Field out(g);
  for (int axis = 0; axis < g.dim(); ++axis) {
    const FaceValues& flux = fluxes[axis];
    const double inv_h = 1.0 / g.spacing(axis);
    detail::for_each_cell_faces(g, axis, [&](std::size_t cell, std::size_t lo, std::size_t hi) {
      out[cell] += (flux.values[hi] - flux.values[lo]) * inv_h;
    });
  }
  return out;
}

// f - dt * div(F): the conservative update for a flux F pointing along +axis.
inline Field apply_divergence(const Field& f, std::span<const FaceValues> fluxes, double dt) {
  Field div = divergence(f.grid(), fluxes);
  Field out = f;
  for (std::size_t k = 0; k < out.size(); ++k) out[k] -= dt * div[k];
  return out;
}

inline Field laplacian(const Field& f) {
  const GridSpec& g = f.grid();
  std::vector<FaceValues> grads;
  grads.reserve(g.dim());
  for (int axis = 0; axis < g.dim(); ++axis) grads.push_back(face_gradient(f, axis));
  return divergence(g, grads);
}

inline double integrate(const Field& f) {
  return detail::compensated_sum(f.values()) * f.grid().cell_volume();
}

inline double sup_abs(const Field& f) {
  double m = 0.0;
  for (double x : f.values()) m = std::max(m, std::abs(x));
  return m;
}

inline double lp_norm(const Field& f, double p) {
  if (std::isinf(p) && p > 0) return sup_abs(f);
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1 or infinity");
  if (p == 1.0) {
    double s = 0.0;
    for (double x : f.values()) s += std::abs(x);
    return s * f.grid().cell_volume();
  }
  // Scale by the sup to keep large exponents representable.
  const double scale = sup_abs(f);
  if (scale == 0.0) return 0.0;
  double s = 0.0;
  for (double x : f.values()) s += std::pow(std::abs(x) / scale, p);
  return scale * std::pow(s * f.grid().cell_volume(), 1.0 / p);
}

}  // namespace kschemo
