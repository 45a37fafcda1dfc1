#pragma once

#include "transop/operators.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace transop {

/// Where neighbor distances are measured. `Identity` uses the latent vectors
/// themselves; `Precomputed` reads one feature row per point from a CSV file
/// (for example features exported from a pretrained classifier).
struct FeatureSource {
  enum class Kind { Identity, Precomputed };
  Kind kind = Kind::Identity;
  std::optional<std::string> feature_file;
  int k = 5;
};

/// Feature rows for `points` according to `src`.
std::vector<Vector> resolve_features(const std::vector<LatentPoint>& points, const FeatureSource& src);

/// Indices of the k nearest rows to each row by Euclidean distance, self
/// excluded, ties broken by lower index. Result[i] is sorted nearest first.
std::vector<std::vector<int>> nearest_neighbors(const std::vector<Vector>& features, int k);

/// One pair per anchor: z0 = anchor, z1 = a neighbor drawn uniformly from the
/// anchor's k nearest in feature space.
std::vector<PointPair> select_pairs(const std::vector<LatentPoint>& points, const FeatureSource& src,
                                    std::uint64_t seed);

/// Same, with the feature rows supplied directly.
std::vector<PointPair> select_pairs(const std::vector<LatentPoint>& points,
                                    const std::vector<Vector>& features, int k, std::uint64_t seed);

}  // namespace transop
