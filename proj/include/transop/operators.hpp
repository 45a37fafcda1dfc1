#pragma once

#include "transop/numerics.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace transop {

/// M square generators over a d-dimensional latent space plus the Frobenius
/// weight gamma. Immutable once built; the trainer assembles new instances.
class OperatorDictionary {
 public:
  OperatorDictionary(std::vector<Matrix> psi, double gamma);

  /// M zero generators of size d x d.
  static OperatorDictionary zeros(int dim, int count, double gamma = 0.0);

  int dim() const { return dim_; }
  int count() const { return static_cast<int>(psi_.size()); }
  double gamma() const { return gamma_; }
  const std::vector<Matrix>& operators() const { return psi_; }
  const Matrix& op(int m) const;

  /// Sum_m Psi_m c_m.
  Matrix generator(const Vector& c) const;

  /// (gamma / 2) Sum_m ||Psi_m||_F^2.
  double frobenius_penalty() const;

 private:
  std::vector<Matrix> psi_;
  double gamma_;
  int dim_;
};

/// Coefficients c parameterizing one transformation T(c) = expm(Sum Psi_m c_m).
class CoefficientVector {
 public:
  CoefficientVector() = default;
  explicit CoefficientVector(Vector values);
  static CoefficientVector zeros(int count) { return CoefficientVector(Vector::Zero(count)); }

  int size() const { return static_cast<int>(values_.size()); }
  const Vector& values() const { return values_; }
  double operator[](int m) const { return values_(m); }

  /// Number of entries with |c_m| > 0.
  int sparsity() const;
  double l1() const { return values_.lpNorm<1>(); }

 private:
  Vector values_;
};

struct LatentPoint {
  Vector z;
  std::optional<int> label;
};

/// Source/target latent pair, with the dataset rows they came from when known.
struct PointPair {
  Vector z0;
  Vector z1;
  std::optional<int> label0;
  std::optional<int> label1;
  int anchor_index = -1;
  int neighbor_index = -1;
};

struct LaplacePrior {
  explicit LaplacePrior(double zeta);
  double zeta;
};

/// T(c) z. Throws DimensionMismatch on size disagreement.
LatentPoint transform(const OperatorDictionary& dict, const CoefficientVector& c,
                      const LatentPoint& z);

/// Reparameterized Laplace draw: -scale * sgn(u) * log(1 - 2|u|) for
/// u in (-1/2, 1/2).
double sample_laplace(double scale, double u);

/// Draws c_m ~ Laplace(0, scales_m) and returns T(c) z + n, n ~ N(0, sigma^2 I).
LatentPoint sample_transform(const OperatorDictionary& dict, const LatentPoint& z,
                             const Vector& scales, double noise_sigma, std::uint64_t seed);

/// Same draw as sample_transform, also reporting the sampled coefficients.
LatentPoint sample_transform(const OperatorDictionary& dict, const LatentPoint& z,
                             const Vector& scales, double noise_sigma, std::uint64_t seed,
                             CoefficientVector* drawn);

/// z_t = expm(t Sum Psi_m c*_m) z0 for each multiplier t.
std::vector<LatentPoint> generate_path(const OperatorDictionary& dict,
                                       const CoefficientVector& c_star, const LatentPoint& z0,
                                       const std::vector<double>& t_values);

/// ||Psi_m||_F for each operator.
std::vector<double> operator_magnitudes(const OperatorDictionary& dict);

// Model JSON: {"dim", "count", "gamma", "operators": [row-major d*d arrays]}
// plus an optional "latent_scale" written by the trainer.

struct StoredModel {
  OperatorDictionary dict;
  double latent_scale = 1.0;
};

std::string dictionary_to_json(const OperatorDictionary& dict,
                               std::optional<double> latent_scale = std::nullopt);
StoredModel dictionary_from_json(const std::string& text);

}  // namespace transop
