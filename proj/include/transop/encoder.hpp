#pragma once

#include "transop/mlp.hpp"
#include "transop/operators.hpp"

#include <cstdint>
#include <vector>

namespace transop {

/// Multinomial classifier r(z): a network with identity output followed by a
/// softmax. With no hidden layers it is plain logistic regression.
class Classifier {
 public:
  Classifier() = default;
  explicit Classifier(Mlp net);

  int classes() const { return net_.output_dim(); }
  int input_dim() const { return net_.input_dim(); }
  const Mlp& net() const { return net_; }

  Vector logits(const Vector& z) const;
  Vector probabilities(const Vector& z) const;
  int predict(const Vector& z) const;

  /// -log r_y(z) and, when requested, its gradient in z.
  double cross_entropy(const Vector& z, int label, Vector* grad_z = nullptr) const;

 private:
  Mlp net_;
};

struct ClassifierConfig {
  std::vector<int> hidden;  // empty: logistic regression
  double lr = 0.05;
  int epochs = 500;
  double weight_decay = 0.0;
  std::uint64_t seed = 0;
};

struct ClassifierFit {
  Classifier classifier;
  double train_accuracy = 0.0;
};

/// Full-batch cross-entropy descent (Adam). Labels must cover >= 2 classes.
ClassifierFit train_classifier(const std::vector<LatentPoint>& points, const ClassifierConfig& cfg);

/// Network z -> per-operator Laplace scales, softplus output so every scale
/// is positive.
class ScaleEncoder {
 public:
  ScaleEncoder() = default;
  explicit ScaleEncoder(Mlp net);

  /// Hidden widths default to two layers of 64. The output bias starts at
  /// softplus^{-1}(initial_scale) and output weights are shrunk so the
  /// initial scales sit near `initial_scale` everywhere.
  static ScaleEncoder create(int dim, int count, double initial_scale, std::uint64_t seed,
                             const std::vector<int>& hidden = {64, 64});

  /// A network whose output is exactly `scale` for every input.
  static ScaleEncoder constant(int dim, int count, double scale);

  int dim() const { return net_.input_dim(); }
  int count() const { return net_.output_dim(); }
  const Mlp& net() const { return net_; }
  Mlp& net() { return net_; }

  Vector scales(const Vector& z) const;

 private:
  Mlp net_;
};

/// Smallest scale the encoder can emit; keeps h > 0 when softplus underflows.
inline constexpr double kMinScale = 1e-12;

struct EncoderConfig {
  double zeta_prior = 0.1;
  double kl_weight = 0.5;
  int samples_j = 1;
  double lr = 1e-3;
  int epochs = 300;
  int batch_size = 250;
  /// Multiplier on encoded scales when sampling coefficients.
  double spread_scale = 0.1;
  std::uint64_t seed = 0;

  void validate() const;
};

/// log(h) - log(zeta) + zeta/h - 1. Nonnegative, zero iff h == zeta.
double kl_laplace(double h, double zeta);

struct EncoderLoss {
  double loss = 0.0;
  double cross_entropy = 0.0;
  double kl = 0.0;
  Vector scales;
  Vector gradient;  // flat encoder parameters
};

/// Consistency loss at one labeled point: draw u ~ U(-1/2, 1/2)^M, set
/// c_m = spread * h_m(z) * l(u_m) with l the unit Laplace map, form
/// z_hat = T(c) z, and score -log r_y(z_hat) + kl_weight * Sum_m KL(h_m, zeta).
/// The gradient flows through the reparameterized draw and the transform.
EncoderLoss encoder_loss(const ScaleEncoder& enc, const Classifier& clf, const OperatorDictionary& dict,
                         const LatentPoint& point, const EncoderConfig& cfg, std::uint64_t seed);

struct EncoderTraining {
  ScaleEncoder encoder;
  std::vector<double> loss_curve;        // mean minibatch loss per epoch
  std::vector<double> mean_scale_curve;  // mean encoded scale over all points, per epoch
};

/// Minibatch Adam on encoder_loss with the classifier and dictionary frozen.
EncoderTraining train_encoder(const ScaleEncoder& enc, const Classifier& clf, const OperatorDictionary& dict,
                              const std::vector<LatentPoint>& points, const EncoderConfig& cfg);

/// Mean encoded scale over every point and operator.
double mean_scale(const ScaleEncoder& enc, const std::vector<LatentPoint>& points);

/// classes x M matrix; entry (y, m) is the mean of h_m(z) over points labeled y.
/// `classes` < 0 infers the class count from the largest label.
Matrix spread_matrix(const ScaleEncoder& enc, const std::vector<LatentPoint>& points, int classes = -1);

/// CSV with header "class,op_0,..." and one row per class.
std::string spread_matrix_to_csv(const Matrix& spread);

std::string classifier_to_json(const Classifier& clf);
Classifier classifier_from_json(const std::string& text);
std::string encoder_to_json(const ScaleEncoder& enc);
ScaleEncoder encoder_from_json(const std::string& text);

}  // namespace transop
