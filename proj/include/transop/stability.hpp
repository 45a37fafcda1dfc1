#pragma once

#include "transop/operators.hpp"

#include <string>
#include <vector>

namespace transop {

/// max_i |Re(lambda_i(A))|; zero for a marginally stable generator.
double max_abs_real_eigenvalue(const Matrix& a);

/// max |Re lambda| for every operator in the dictionary.
std::vector<double> stability_metric(const OperatorDictionary& dict);

/// ||A A^T - A^T A||_F < tol.
bool is_normal(const Matrix& a, double tol = 1e-10);

/// `samples` uniform values over [-pi, pi] divided by ||Psi_m||_F (undivided
/// for a zero operator).
std::vector<double> default_c_range(const OperatorDictionary& dict, int m, int samples = 101);

struct PathTrace {
  std::vector<double> c;
  std::vector<Vector> z;  // z(c) = expm(Psi_m c) z0, one per entry of c
};

PathTrace path_trace(const OperatorDictionary& dict, int m, const Vector& z0, const std::vector<double>& c_range);

/// max_c ||z(c)|| / ||z0||; transient growth shows up here even when the
/// spectrum is purely imaginary.
double trace_growth(const PathTrace& trace, const Vector& z0);

/// Header "c,z0,...,z{d-1}".
std::string path_trace_to_csv(const PathTrace& trace);

/// Header "operator_index,metric,magnitude".
std::string stability_to_csv(const std::vector<double>& metrics, const std::vector<double>& magnitudes);

}  // namespace transop
