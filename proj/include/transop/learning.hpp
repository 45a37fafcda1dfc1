#pragma once

#include "transop/inference.hpp"
#include "transop/operators.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace transop {

struct TrainerConfig {
  double lr_psi = 1e-3;
  int epochs = 50;
  int batch_size = 250;
  double gamma = 2e-6;
  double zeta = 0.1;
  double init_variance_psi = 0.05;
  /// Multiplier applied to every latent vector once, before training.
  double latent_scale = 1.0;
  std::uint64_t seed = 0;
  /// Schedule for the per-batch coefficient inference; its zeta is replaced
  /// by `zeta` above.
  InferenceConfig inference;
  int threads = 1;

  void validate() const;
  InferenceConfig inference_config() const;
};

/// One record per dictionary gradient step. Terms are batch means taken
/// before the step; magnitudes are taken after it.
struct TrainStep {
  int epoch = 0;
  int step = 0;
  double objective = 0.0;
  double recon = 0.0;
  double frobenius = 0.0;
  double l1 = 0.0;
  /// Mean reconstruction term before the step minus after it, with the
  /// batch coefficients held fixed. Positive for an effective step.
  double e_psi_diff = 0.0;
  /// Fraction of the batch whose inferred coefficients were all zero.
  double zero_fraction = 0.0;
  std::vector<double> magnitudes;
};

struct TrainLog {
  std::vector<TrainStep> steps;
};

struct TrainResult {
  OperatorDictionary dict;
  TrainLog log;
};

/// Gradient of the transport objective in each Psi_m at fixed c:
/// c_m L*(A, -r z0^T) + gamma Psi_m.
std::vector<Matrix> dictionary_gradient(const OperatorDictionary& dict, const CoefficientVector& c,
                                        const Vector& z0, const Vector& z1);

/// Entrywise N(0, init_variance_psi) operators.
OperatorDictionary initial_dictionary(int dim, int count, const TrainerConfig& cfg);

/// Alternating minimization: per batch, infer coefficients for every pair,
/// then take one gradient step on every operator using the batch-mean gradient.
TrainResult train_dictionary(const std::vector<PointPair>& pairs, int count, const TrainerConfig& cfg);

/// Same, starting from a given dictionary instead of a random one.
TrainResult train_dictionary(const std::vector<PointPair>& pairs, const OperatorDictionary& initial,
                             const TrainerConfig& cfg);

std::vector<PointPair> scale_pairs(const std::vector<PointPair>& pairs, double latent_scale);

struct HealthThresholds {
  double decayed_magnitude = 1e-6;
  double divergence_magnitude = 1e6;
};

/// Failure checklist for a training run.
struct HealthReport {
  double negative_diff_fraction = 0.0;
  bool all_magnitudes_decayed = false;
  bool all_coefficients_zero = false;
  bool diverged = false;
};

HealthReport health_report(const TrainLog& log, const HealthThresholds& thresholds = {});

/// CSV: step,epoch,objective,recon,frobenius,l1,e_psi_diff,zero_fraction,mag_0..mag_{M-1}
void write_train_log_csv(std::ostream& os, const TrainLog& log);

}  // namespace transop
