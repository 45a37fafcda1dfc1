#include "transop/pairing.hpp"

#include "transop/errors.hpp"
#include "transop/inference.hpp"
#include "transop/io.hpp"
#include "transop/rng.hpp"

#include <algorithm>
#include <numeric>

namespace transop {

std::vector<Vector> resolve_features(const std::vector<LatentPoint>& points, const FeatureSource& src) {
  if (src.kind == FeatureSource::Kind::Identity) {
    std::vector<Vector> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back(p.z);
    return out;
  }
  if (!src.feature_file) {
    throw Error(ErrorKind::InvalidArgument, "precomputed features need a feature file");
  }
  auto rows = parse_numeric_rows(parse_csv(read_file(*src.feature_file), false));
  if (rows.size() != points.size()) {
    throw Error(ErrorKind::FeatureMismatch, *src.feature_file + " has " + std::to_string(rows.size()) +
                                                " rows for " + std::to_string(points.size()) + " points");
  }
  return rows;
}

std::vector<std::vector<int>> nearest_neighbors(const std::vector<Vector>& features, int k) {
  const int n = static_cast<int>(features.size());
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "neighbor count k must be >= 1");
  if (k >= n) {
    throw Error(ErrorKind::InvalidArgument,
                "neighbor count k=" + std::to_string(k) + " needs more than " + std::to_string(n) + " points");
  }
  const Eigen::Index width = features.front().size();
  for (const auto& f : features) {
    if (f.size() != width) throw Error(ErrorKind::FeatureMismatch, "feature rows differ in width");
  }
  bool all_same = true;
  for (int i = 1; i < n && all_same; ++i) all_same = features[static_cast<std::size_t>(i)] == features.front();
  if (all_same) throw Error(ErrorKind::DegenerateData, "all points have identical features");

  std::vector<std::vector<int>> out(static_cast<std::size_t>(n));
  std::vector<std::pair<double, int>> dist(static_cast<std::size_t>(n - 1));
  for (int i = 0; i < n; ++i) {
    std::size_t w = 0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      dist[w++] = {(features[static_cast<std::size_t>(i)] - features[static_cast<std::size_t>(j)]).squaredNorm(), j};
    }
    std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
    auto& nn = out[static_cast<std::size_t>(i)];
    nn.reserve(static_cast<std::size_t>(k));
    for (int q = 0; q < k; ++q) nn.push_back(dist[static_cast<std::size_t>(q)].second);
  }
  return out;
}

std::vector<PointPair> select_pairs(const std::vector<LatentPoint>& points, const FeatureSource& src,
                                    std::uint64_t seed) {
  return select_pairs(points, resolve_features(points, src), src.k, seed);
}

std::vector<PointPair> select_pairs(const std::vector<LatentPoint>& points,
                                    const std::vector<Vector>& features, int k, std::uint64_t seed) {
  if (features.size() != points.size()) {
    throw Error(ErrorKind::FeatureMismatch, std::to_string(features.size()) + " feature rows for " +
                                                std::to_string(points.size()) + " points");
  }
  const auto neighbors = nearest_neighbors(features, k);
  std::vector<PointPair> pairs;
  pairs.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    // Keyed on the anchor's values so relabeling the points relabels the pairs.
    CounterRng rng(pair_seed(seed, points[i].z, features[i]));
    const int j = neighbors[i][static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(k)))];
    const auto& a = points[i];
    const auto& b = points[static_cast<std::size_t>(j)];
    pairs.push_back({a.z, b.z, a.label, b.label, static_cast<int>(i), j});
  }
  return pairs;
}

}  // namespace transop
