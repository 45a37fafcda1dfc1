#include "transop/stability.hpp"

#include "transop/errors.hpp"
#include "transop/io.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace transop {

double max_abs_real_eigenvalue(const Matrix& a) {
  double out = 0.0;
  for (const auto& lambda : eigenvalues(a)) out = std::max(out, std::abs(lambda.real()));
  return out;
}

std::vector<double> stability_metric(const OperatorDictionary& dict) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(dict.count()));
  for (const auto& p : dict.operators()) out.push_back(max_abs_real_eigenvalue(p));
  return out;
}

bool is_normal(const Matrix& a, double tol) {
  return (a * a.transpose() - a.transpose() * a).norm() < tol;
}

std::vector<double> default_c_range(const OperatorDictionary& dict, int m, int samples) {
  if (samples < 2) throw Error(ErrorKind::InvalidArgument, "c range needs at least two samples");
  const double magnitude = dict.op(m).norm();
  const double reach = magnitude > 0.0 ? std::numbers::pi / magnitude : std::numbers::pi;
  std::vector<double> out(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) {
    out[static_cast<std::size_t>(i)] = -reach + 2.0 * reach * static_cast<double>(i) / (samples - 1);
  }
  return out;
}

PathTrace path_trace(const OperatorDictionary& dict, int m, const Vector& z0, const std::vector<double>& c_range) {
  const Matrix& psi = dict.op(m);
  if (z0.size() != dict.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "trace start point does not match dictionary dimension");
  }
  PathTrace trace;
  trace.c = c_range;
  trace.z.reserve(c_range.size());
  for (double c : c_range) {
    if (!std::isfinite(c)) throw Error(ErrorKind::NonFinite, "trace coefficient must be finite");
    trace.z.push_back(c == 0.0 ? z0 : Vector(expm(c * psi) * z0));
  }
  return trace;
}

double trace_growth(const PathTrace& trace, const Vector& z0) {
  const double base = z0.norm();
  double out = 0.0;
  for (const auto& z : trace.z) out = std::max(out, z.norm() / base);
  return out;
}

std::string path_trace_to_csv(const PathTrace& trace) {
  std::ostringstream os;
  os << "c";
  const Eigen::Index d = trace.z.empty() ? 0 : trace.z.front().size();
  for (Eigen::Index i = 0; i < d; ++i) os << ",z" << i;
  os << "\n";
  for (std::size_t r = 0; r < trace.c.size(); ++r) {
    os << format_double(trace.c[r]);
    for (Eigen::Index i = 0; i < d; ++i) os << "," << format_double(trace.z[r](i));
    os << "\n";
  }
  return os.str();
}

std::string stability_to_csv(const std::vector<double>& metrics, const std::vector<double>& magnitudes) {
  std::ostringstream os;
  os << "operator_index,metric,magnitude\n";
  for (std::size_t m = 0; m < metrics.size(); ++m) {
    os << m << "," << format_double(metrics[m]) << "," << format_double(magnitudes.at(m)) << "\n";
  }
  return os.str();
}

}  // namespace transop
