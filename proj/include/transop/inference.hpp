#pragma once

#include "transop/operators.hpp"

#include <cstdint>
#include <vector>

namespace transop {

/// Proximal coefficient inference settings. Default
/// schedule: alpha_k = 0.985^k * 1e-2, 800 iterations, tolerance 1e-5 on
/// ||c_{k+1} - c_k||, Gaussian start with variance 4e-4, one restart.
struct InferenceConfig {
  double zeta = 0.1;
  double alpha0 = 1e-2;
  double decay = 0.985;
  int max_iters = 800;
  double tol = 1e-5;
  double init_variance = 4e-4;
  int restarts = 1;
  /// FISTA momentum. Off by default; plain forward-backward is preferred.
  bool accelerate = false;

  void validate() const;
};

struct InferenceReport {
  CoefficientVector coefficients;
  double objective = 0.0;
  double recon_error = 0.0;
  int iterations = 0;
  bool converged = false;
  bool all_zero = false;
};

/// 1/2 ||z1 - T(c) z0||^2 + (gamma/2) Sum ||Psi_m||_F^2 + zeta ||c||_1.
double objective(const OperatorDictionary& dict, const CoefficientVector& c, const Vector& z0,
                 const Vector& z1, double zeta);

/// 1/2 ||z1 - T(c) z0||^2.
double reconstruction_error(const OperatorDictionary& dict, const CoefficientVector& c,
                            const Vector& z0, const Vector& z1);

/// Gradient in c of the smooth term 1/2 ||z1 - e^{A(c)} z0||^2. Component m is
/// -r^T L(A, Psi_m) z0 = -<Psi_m, L*(A, r z0^T)>, so one adjoint evaluation
/// serves every operator.
Vector coefficient_gradient(const OperatorDictionary& dict, const CoefficientVector& c,
                            const Vector& z0, const Vector& z1);

/// sign(c) * max(|c| - lambda, 0), elementwise.
Vector soft_threshold(const Vector& c, double lambda);

/// Gaussian starting point shared by infer and infer_subgradient.
Vector initial_coefficients(const InferenceConfig& cfg, int count, std::uint64_t seed, int restart);

/// Forward-backward splitting: c_{k+1} = T_{zeta a_k}(c_k - a_k grad f(c_k)).
/// When `objective_trace` is given it receives the objective at every iterate
/// of the returned restart, starting with c_0.
InferenceReport infer(const OperatorDictionary& dict, const Vector& z0, const Vector& z1,
                      const InferenceConfig& cfg, std::uint64_t seed,
                      std::vector<double>* objective_trace = nullptr);

/// Baseline: c_{k+1} = c_k - a_k (grad f(c_k) + zeta sign(c_k)), same schedule,
/// same start.
InferenceReport infer_subgradient(const OperatorDictionary& dict, const Vector& z0,
                                  const Vector& z1, const InferenceConfig& cfg, std::uint64_t seed,
                                  std::vector<double>* objective_trace = nullptr);

/// Seed used for one pair inside infer_batch. Keyed on the pair's values so a
/// permuted batch yields identically permuted reports.
std::uint64_t pair_seed(std::uint64_t seed, const Vector& z0, const Vector& z1);

/// infer on every pair with pair_seed(seed, z0, z1). Pairs are independent;
/// `threads` > 1 evaluates them concurrently with identical results.
std::vector<InferenceReport> infer_batch(const OperatorDictionary& dict,
                                         const std::vector<PointPair>& pairs,
                                         const InferenceConfig& cfg, std::uint64_t seed,
                                         int threads = 1);

}  // namespace transop
