#pragma once

// Independent reference computations used only by the test suites. Nothing
// here calls into the library's expm, Frechet or eigenvalue kernels.

#include "transop/numerics.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <vector>

namespace transop::oracle {

/// Truncated Taylor series sum_{k < terms} A^k / k!.
inline Matrix taylor_expm(const Matrix& a, int terms = 60) {
  const Eigen::Index n = a.rows();
  Matrix sum = Matrix::Identity(n, n);
  Matrix term = Matrix::Identity(n, n);
  for (int k = 1; k < terms; ++k) {
    term = term * a / static_cast<double>(k);
    sum += term;
  }
  return sum;
}

/// Cyclic Jacobi rotations for a symmetric matrix; eigenvalues sorted ascending.
inline std::vector<double> jacobi_eigenvalues(Matrix a, int sweeps = 100) {
  const Eigen::Index n = a.rows();
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-30) break;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> out(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = a(i, i);
  std::sort(out.begin(), out.end());
  return out;
}

/// Eigen's own real Schur based solver, used as an independent reference for
/// non-symmetric spectra.
inline std::vector<std::complex<double>> reference_eigenvalues(const Matrix& a) {
  Eigen::EigenSolver<Matrix> solver(a, false);
  const auto& ev = solver.eigenvalues();
  return std::vector<std::complex<double>>(ev.data(), ev.data() + ev.size());
}

inline double reference_max_abs_real(const Matrix& a) {
  double out = 0.0;
  for (const auto& l : reference_eigenvalues(a)) out = std::max(out, std::abs(l.real()));
  return out;
}

/// Greedy matching distance between two eigenvalue multisets.
inline double spectrum_distance(std::vector<std::complex<double>> a, std::vector<std::complex<double>> b) {
  double worst = 0.0;
  for (const auto& x : a) {
    auto best = b.begin();
    for (auto it = b.begin(); it != b.end(); ++it) {
      if (std::abs(*it - x) < std::abs(*best - x)) best = it;
    }
    worst = std::max(worst, std::abs(*best - x));
    b.erase(best);
  }
  return worst;
}

/// argmin over a uniform grid of f on [lo, hi] with the given resolution.
inline double grid_argmin(const std::function<double(double)>& f, double lo, double hi, double resolution) {
  const long steps = static_cast<long>(std::llround((hi - lo) / resolution));
  double best_x = lo;
  double best_f = f(lo);
  for (long i = 1; i <= steps; ++i) {
    const double x = lo + static_cast<double>(i) * resolution;
    const double v = f(x);
    if (v < best_f) {
      best_f = v;
      best_x = x;
    }
  }
  return best_x;
}

/// 2x2 rotation by theta, written out in closed form.
inline Matrix rotation(double theta) {
  Matrix r(2, 2);
  r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return r;
}

inline Matrix random_matrix(std::mt19937_64& gen, int n, double scale = 1.0) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = scale * dist(gen);
  return m;
}

inline Vector random_vector(std::mt19937_64& gen, int n, double scale = 1.0) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = scale * dist(gen);
  return v;
}

}  // namespace transop::oracle
