#pragma once

// Independent reference computations for the tests. Nothing here reuses the
// library's stencils or solvers.

#include <cmath>
#include <stdexcept>
#include <vector>

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

// Dense cell-centered Neumann Laplacian on a uniform 1D grid.
inline Matrix neumann_laplacian_1d(int n, double h) {
  Matrix A(n, std::vector<double>(n, 0.0));
  const double w = 1.0 / (h * h);
  for (int i = 0; i < n; ++i) {
    if (i > 0) {
      A[i][i - 1] += w;
      A[i][i] -= w;
    }
    if (i + 1 < n) {
      A[i][i + 1] += w;
      A[i][i] -= w;
    }
  }
  return A;
}

inline std::vector<double> matvec(const Matrix& A, const std::vector<double>& x) {
  std::vector<double> y(A.size(), 0.0);
  for (std::size_t i = 0; i < A.size(); ++i) {
    for (std::size_t j = 0; j < x.size(); ++j) y[i] += A[i][j] * x[j];
  }
  return y;
}

// Gaussian elimination with partial pivoting.
inline std::vector<double> solve(Matrix A, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(A[i][k]) > std::abs(A[piv][k])) piv = i;
    }
    if (A[piv][k] == 0.0) throw std::runtime_error("oracle::solve: singular");
    std::swap(A[k], A[piv]);
    std::swap(b[k], b[piv]);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = A[i][k] / A[k][k];
      for (std::size_t j = k; j < n; ++j) A[i][j] -= f * A[k][j];
      b[i] -= f * b[k];
    }
  }
  std::vector<double> x(n);
  for (std::size_t k = n; k-- > 0;) {
    double s = b[k];
    for (std::size_t j = k + 1; j < n; ++j) s -= A[k][j] * x[j];
    x[k] = s / A[k][k];
  }
  return x;
}

// One step of u' = Lu (forward Euler) and v' = Lv - v + u_old (backward Euler).
struct HeatPair {
  std::vector<double> u;
  std::vector<double> v;
};

inline HeatPair heat_step(const Matrix& L, const HeatPair& s, double dt) {
  const std::size_t n = s.u.size();
  HeatPair out;
  const std::vector<double> Lu = matvec(L, s.u);
  out.u.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.u[i] = s.u[i] + dt * Lu[i];
  Matrix M(n, std::vector<double>(n, 0.0));
  std::vector<double> rhs(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) M[i][j] = -dt * L[i][j];
    M[i][i] += 1.0 + dt;
    rhs[i] = s.v[i] + dt * s.u[i];
  }
  out.v = solve(M, rhs);
  return out;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Space-time truncation energy sum_k w_k * vol * sum_c [(u - level)^+]^ms,
// accumulated in long double in reverse order.
inline long double truncation_energy(const std::vector<std::vector<double>>& samples,
                                     const std::vector<double>& weights, double cell_volume, double K, int n,
                                     double ms) {
  const long double level = static_cast<long double>(K) - static_cast<long double>(K) / std::pow(2.0L, n + 1);
  long double total = 0.0L;
  for (std::size_t k = samples.size(); k-- > 0;) {
    long double per = 0.0L;
    for (std::size_t c = samples[k].size(); c-- > 0;) {
      const long double d = samples[k][c] - level;
      if (d >= 0.0L) per += std::pow(d, static_cast<long double>(ms));
    }
    total += per * weights[k] * cell_volume;
  }
  return total;
}

}  // namespace oracle
