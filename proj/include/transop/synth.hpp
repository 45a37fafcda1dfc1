#pragma once

#include "transop/operators.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace transop {

/// [[0, -1], [1, 0]].
Matrix so2_generator();

/// Rotation generator acting on coordinates (2 block, 2 block + 1) of a
/// `dim`-dimensional space, zero elsewhere.
Matrix block_rotation_generator(int dim, int block);

struct RotationDataset {
  std::vector<LatentPoint> points;
  Matrix generator;  // ground truth, so2_generator()
  double radius = 1.0;
  double angle_spread = 0.0;
};

/// n points R(phi_i) (radius, 0) + noise with phi_i ~ U(0, 2 pi).
RotationDataset make_rotation_dataset(int n, double radius, double angle_spread, double noise,
                                      std::uint64_t seed);

struct RotationPair {
  PointPair pair;
  double angle = 0.0;  // z1 = R(angle) z0
};

/// `count` pairs with z0 drawn from the dataset and z1 = R(theta) z0,
/// theta ~ U(-angle_spread, angle_spread).
std::vector<RotationPair> make_rotation_pairs(const RotationDataset& data, int count, std::uint64_t seed);

/// Inference benchmark on two commuting SO(2) blocks in d = 4. Each pair uses
/// exactly one of the two generators with a coefficient drawn from U(-1, 1);
/// both blocks of z0 sit at `radius` with uniform phases.
struct SparseBenchmark {
  OperatorDictionary dict = OperatorDictionary::zeros(4, 2);
  std::vector<PointPair> pairs;
  std::vector<CoefficientVector> truth;
};
SparseBenchmark make_sparse_benchmark(int count, double radius, std::uint64_t seed);

struct ClassSpecificGenerator {
  Matrix generator;
  int owner_class = 0;
};

struct MulticlassOptions {
  /// Explicit base point per class; when empty, class k sits at
  /// separation * (k + 1) along coordinate k mod d, plus 1 on every coordinate.
  std::vector<Vector> bases;
  double separation = 3.0;
  /// Within-class coefficients are U(-coefficient_spread, coefficient_spread).
  double coefficient_spread = 0.5;
  /// Largest |c| probed when locating breaking intervals.
  double search_limit = 10.0;
  double search_step = 1e-3;
};

/// |c| range over which applying a class-specific generator to another
/// class's base point moves it at least half the distance between the two
/// class bases.
struct BreakingInterval {
  int generator = 0;   // index into the catalog
  int from_class = 0;  // class whose base point is moved
  int owner_class = 0;
  double half_distance = 0.0;
  std::optional<double> lower;  // first |c| that breaks, if any within the search limit
  double upper = 0.0;           // end of that first breaking run
};

struct MulticlassDataset {
  std::vector<LatentPoint> points;
  std::vector<Matrix> generators;             // shared first, then class-specific
  std::vector<std::vector<int>> admissible;   // per class, indices into generators
  std::vector<Vector> bases;
  std::vector<BreakingInterval> breaking;
};

MulticlassDataset make_multiclass_dataset(int classes, const std::vector<Matrix>& shared_generators,
                                          const std::vector<ClassSpecificGenerator>& class_specific,
                                          int n_per_class, std::uint64_t seed,
                                          const MulticlassOptions& options = {});

/// Two classes in d = 4. Operator 0 rotates block 0 and is shared; operator 1
/// rotates block 1 and belongs to class 0, whose block-1 coordinates sit near
/// the origin. Class 1 sits at radius 2 in block 1, so operator 1 pushes it
/// across the class boundary. Bases: (1, 0, 0.1, 0) and (-1, 0, 2, 0).
struct TwoClassTask {
  MulticlassDataset data;
  OperatorDictionary dict = OperatorDictionary::zeros(4, 2);
};
TwoClassTask make_two_class_task(int n_per_class, std::uint64_t seed);

}  // namespace transop
