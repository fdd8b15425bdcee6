#pragma once

// Matrix-free symmetric positive-definite stencil operators and a
// Jacobi-preconditioned conjugate-gradient solver.

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "kschemo/grid.hpp"

namespace kschemo {

class SolveError : public std::runtime_error {
 public:
  SolveError(const std::string& what, int iterations, double residual)
      : std::runtime_error(what + " (iterations=" + std::to_string(iterations) +
                           ", residual=" + std::to_string(residual) + ")"),
        iterations_(iterations),
        residual_(residual) {}
  int iterations() const { return iterations_; }
  double residual() const { return residual_; }

 private:
  int iterations_;
  double residual_;
};

// y = shift * x + scale * L_k x, where L_k is the flux-form Neumann operator
//   (L_k x)_c = sum over faces of k_f (x_c - x_nb) / h_axis^2,
// i.e. -div(k grad x). Empty coefficient vectors mean k = 1 on that axis.
class StencilOperator {
 public:
  StencilOperator(const GridSpec& grid, double shift, double scale,
                  std::array<std::vector<double>, GridSpec::kMaxDim> face_coeff = {})
      : grid_(grid), shift_(shift), scale_(scale), coeff_(std::move(face_coeff)) {}

  const GridSpec& grid() const { return grid_; }

  void apply(std::span<const double> x, std::span<double> y) const {
    for (std::size_t k = 0; k < x.size(); ++k) y[k] = shift_ * x[k];
    for (int axis = 0; axis < grid_.dim(); ++axis) {
      const double w = scale_ / (grid_.spacing(axis) * grid_.spacing(axis));
      const auto& kf = coeff_[axis];
      detail::for_each_interior_face(grid_, axis, [&](std::size_t face, std::size_t l, std::size_t r) {
        const double c = kf.empty() ? w : w * kf[face];
        const double d = c * (x[r] - x[l]);
        y[l] -= d;
        y[r] += d;
      });
    }
  }

  std::vector<double> diagonal() const {
    std::vector<double> d(grid_.size(), shift_);
    for (int axis = 0; axis < grid_.dim(); ++axis) {
      const double w = scale_ / (grid_.spacing(axis) * grid_.spacing(axis));
      const auto& kf = coeff_[axis];
      detail::for_each_interior_face(grid_, axis, [&](std::size_t face, std::size_t l, std::size_t r) {
        const double c = kf.empty() ? w : w * kf[face];
        d[l] += c;
        d[r] += c;
      });
    }
    return d;
  }

 private:
  GridSpec grid_;
  double shift_;
  double scale_;
  std::array<std::vector<double>, GridSpec::kMaxDim> coeff_;
};

struct CgResult {
  int iterations = 0;
  double residual_norm = 0.0;
};

namespace detail {
inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}
}  // namespace detail

// Solves A x = rhs starting from the contents of x, stopping once the residual
// 2-norm is <= tol_abs. Throws SolveError when max_iters is exhausted.
template <class Op>
CgResult conjugate_gradient(const Op& op, std::span<const double> rhs, std::span<double> x,
                            double tol_abs, int max_iters) {
  const std::size_t n = rhs.size();
  const std::vector<double> diag = op.diagonal();
  std::vector<double> r(n), z(n), p(n), ap(n);

  op.apply(x, ap);
  for (std::size_t k = 0; k < n; ++k) r[k] = rhs[k] - ap[k];
  double rnorm = std::sqrt(detail::dot(r, r));
  if (rnorm <= tol_abs) return {0, rnorm};

  for (std::size_t k = 0; k < n; ++k) z[k] = r[k] / diag[k];
  p = z;
  double rz = detail::dot(r, z);

  for (int it = 1; it <= max_iters; ++it) {
    op.apply(p, ap);
    const double pap = detail::dot(p, ap);
    if (!(pap > 0.0)) throw SolveError("cg: operator not positive definite", it, rnorm);
    const double alpha = rz / pap;
    for (std::size_t k = 0; k < n; ++k) {
      x[k] += alpha * p[k];
      r[k] -= alpha * ap[k];
    }
    rnorm = std::sqrt(detail::dot(r, r));
    if (rnorm <= tol_abs) return {it, rnorm};
    for (std::size_t k = 0; k < n; ++k) z[k] = r[k] / diag[k];
    const double rz_next = detail::dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t k = 0; k < n; ++k) p[k] = z[k] + beta * p[k];
  }
  throw SolveError("cg: iteration cap exceeded", max_iters, rnorm);
}

}  // namespace kschemo
