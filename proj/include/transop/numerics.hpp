#pragma once

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <string_view>
#include <utility>
#include <vector>

namespace transop {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Default tolerances used by the numerics checks and the test suite.
struct NumericsConfig {
  int series_terms = 60;              // Taylor oracle length
  double series_rel_tol = 1e-12;      // expm vs. series, ||A|| <= 2
  double fd_step = 1e-6;              // central-difference step
  double frechet_fd_rel_tol = 1e-6;   // Frechet vs. central differences
  double adjoint_rel_tol = 1e-10;     // <L(A,E),G> == <E,L*(A,G)>
  double linearity_tol = 1e-10;       // L(A, aE1 + bE2) == aL(A,E1) + bL(A,E2)
  double group_rel_tol = 1e-8;        // expm(A) expm(-A) == I, ||A|| <= 5
  double trace_tol = 1e-8;            // sum of eigenvalues vs. trace, per unit norm
  int qr_max_iterations = 30;         // per eigenvalue
};

/// Throws DimensionMismatch unless `a` is square and non-empty, NonFinite
/// unless every entry is finite.
void require_square_finite(const Matrix& a, std::string_view what);
bool all_finite(const Matrix& a);

double norm_1(const Matrix& a);

/// e^A by scaling and squaring with a diagonal Pade approximant of order
/// 3, 5, 7, 9 or 13 chosen from the 1-norm.
Matrix expm(const Matrix& a);

/// (e^A, L(A, E)) where L is the Frechet derivative of expm at A in
/// direction E, read off expm([[A, E], [0, A]]).
std::pair<Matrix, Matrix> expm_frechet(const Matrix& a, const Matrix& e);

/// L*(A, G), the Frobenius adjoint of E -> L(A, E). Equal to L(A^T, G).
Matrix expm_adjoint(const Matrix& a, const Matrix& g);

/// All eigenvalues with multiplicity. Householder reduction to upper
/// Hessenberg form followed by Francis double-shift QR.
std::vector<std::complex<double>> eigenvalues(const Matrix& a, const NumericsConfig& cfg = {});

/// Householder reduction Q^T A Q = H; only H is returned.
Matrix hessenberg(const Matrix& a);

double frobenius_inner(const Matrix& a, const Matrix& b);

/// ||a - b||_F / ||b||_F, falling back to the absolute error when b == 0.
double relative_error(const Matrix& a, const Matrix& b);

// Finite-difference checkers shared by the test suites.

using ScalarFn = std::function<double(const Vector&)>;
using MatrixScalarFn = std::function<double(const Matrix&)>;

/// Central-difference gradient of f at x with step h in every coordinate.
Vector central_difference_gradient(const ScalarFn& f, const Vector& x, double h);

/// Central-difference gradient of a scalar function of a matrix argument.
Matrix central_difference_gradient(const MatrixScalarFn& f, const Matrix& x, double h);

/// (F(x + hE) - F(x - hE)) / 2h for a matrix-valued map F.
Matrix central_difference_directional(const std::function<Matrix(const Matrix&)>& f,
                                      const Matrix& x, const Matrix& direction, double h);

}  // namespace transop
