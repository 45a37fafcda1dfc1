#include "transop/synth.hpp"

#include "transop/errors.hpp"
#include "transop/rng.hpp"

#include <cmath>
#include <numbers>

namespace transop {

Matrix so2_generator() {
  Matrix g(2, 2);
  g << 0.0, -1.0, 1.0, 0.0;
  return g;
}

Matrix block_rotation_generator(int dim, int block) {
  if (block < 0 || 2 * block + 1 >= dim) {
    throw Error(ErrorKind::IndexOutOfRange, "rotation block " + std::to_string(block) +
                                                " does not fit dimension " + std::to_string(dim));
  }
  Matrix g = Matrix::Zero(dim, dim);
  g(2 * block, 2 * block + 1) = -1.0;
  g(2 * block + 1, 2 * block) = 1.0;
  return g;
}

RotationDataset make_rotation_dataset(int n, double radius, double angle_spread, double noise,
                                      std::uint64_t seed) {
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "rotation dataset needs n >= 2");
  if (!(radius > 0.0)) throw Error(ErrorKind::InvalidArgument, "radius must be > 0");
  if (!(noise >= 0.0)) throw Error(ErrorKind::InvalidArgument, "noise must be >= 0");
  if (!(angle_spread >= 0.0)) throw Error(ErrorKind::InvalidArgument, "angle spread must be >= 0");
  RotationDataset out;
  out.generator = so2_generator();
  out.radius = radius;
  out.angle_spread = angle_spread;
  CounterRng rng(seed);
  out.points.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double phi = 2.0 * std::numbers::pi * rng.uniform();
    Vector z(2);
    z << radius * std::cos(phi), radius * std::sin(phi);
    if (noise > 0.0) {
      z(0) += noise * rng.normal();
      z(1) += noise * rng.normal();
    }
    out.points.push_back({z, std::nullopt});
  }
  return out;
}

std::vector<RotationPair> make_rotation_pairs(const RotationDataset& data, int count, std::uint64_t seed) {
  if (count < 0) throw Error(ErrorKind::InvalidArgument, "pair count must be >= 0");
  CounterRng rng(seed);
  std::vector<RotationPair> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const int index = static_cast<int>(rng.below(data.points.size()));
    const double theta = data.angle_spread > 0.0 ? rng.uniform_open(-data.angle_spread, data.angle_spread) : 0.0;
    const Vector& z0 = data.points[static_cast<std::size_t>(index)].z;
    Matrix rot(2, 2);
    rot << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    RotationPair rp;
    rp.pair.z0 = z0;
    rp.pair.z1 = rot * z0;
    rp.pair.anchor_index = index;
    rp.angle = theta;
    out.push_back(std::move(rp));
  }
  return out;
}

SparseBenchmark make_sparse_benchmark(int count, double radius, std::uint64_t seed) {
  if (count < 0) throw Error(ErrorKind::InvalidArgument, "pair count must be >= 0");
  if (!(radius > 0.0)) throw Error(ErrorKind::InvalidArgument, "radius must be > 0");
  SparseBenchmark out;
  out.dict = OperatorDictionary({block_rotation_generator(4, 0), block_rotation_generator(4, 1)}, 0.0);
  CounterRng rng(seed);
  for (int i = 0; i < count; ++i) {
    Vector z0(4);
    for (int b = 0; b < 2; ++b) {
      const double phi = 2.0 * std::numbers::pi * rng.uniform();
      z0(2 * b) = radius * std::cos(phi);
      z0(2 * b + 1) = radius * std::sin(phi);
    }
    Vector c = Vector::Zero(2);
    c(static_cast<Eigen::Index>(rng.below(2))) = rng.uniform_open(-1.0, 1.0);
    PointPair p;
    p.z1 = expm(out.dict.generator(c)) * z0;
    p.z0 = std::move(z0);
    p.anchor_index = i;
    p.neighbor_index = i;
    out.pairs.push_back(std::move(p));
    out.truth.emplace_back(std::move(c));
  }
  return out;
}

namespace {

// Smallest displacement of `base` under expm(+c G) and expm(-c G).
double displacement(const Matrix& g, const Vector& base, double c) {
  const double up = (expm(c * g) * base - base).norm();
  const double down = (expm(-c * g) * base - base).norm();
  return std::min(up, down);
}

}  // namespace

MulticlassDataset make_multiclass_dataset(int classes, const std::vector<Matrix>& shared_generators,
                                          const std::vector<ClassSpecificGenerator>& class_specific,
                                          int n_per_class, std::uint64_t seed,
                                          const MulticlassOptions& options) {
  if (classes < 1) throw Error(ErrorKind::InvalidArgument, "need at least one class");
  if (n_per_class < 1) throw Error(ErrorKind::InvalidArgument, "n_per_class must be >= 1");
  if (shared_generators.empty() && class_specific.empty()) {
    throw Error(ErrorKind::InvalidArgument, "need at least one generator");
  }
  MulticlassDataset out;
  for (const auto& g : shared_generators) out.generators.push_back(g);
  for (const auto& g : class_specific) {
    if (g.owner_class < 0 || g.owner_class >= classes) {
      throw Error(ErrorKind::IndexOutOfRange, "class-specific generator owner outside class range");
    }
    out.generators.push_back(g.generator);
  }
  const Eigen::Index dim = out.generators.front().rows();
  for (std::size_t i = 0; i < out.generators.size(); ++i) {
    const auto& g = out.generators[i];
    if (g.rows() != dim || g.cols() != dim) {
      throw Error(ErrorKind::DimensionMismatch, "generator " + std::to_string(i) + " is not " +
                                                    std::to_string(dim) + "x" + std::to_string(dim));
    }
    require_square_finite(g, "generator");
  }

  out.admissible.assign(static_cast<std::size_t>(classes), {});
  const int shared_count = static_cast<int>(shared_generators.size());
  for (int k = 0; k < classes; ++k) {
    for (int g = 0; g < shared_count; ++g) out.admissible[static_cast<std::size_t>(k)].push_back(g);
  }
  for (std::size_t s = 0; s < class_specific.size(); ++s) {
    out.admissible[static_cast<std::size_t>(class_specific[s].owner_class)].push_back(shared_count +
                                                                                    static_cast<int>(s));
  }

  if (!options.bases.empty()) {
    if (static_cast<int>(options.bases.size()) != classes) {
      throw Error(ErrorKind::DimensionMismatch, "need one base point per class");
    }
    for (const auto& b : options.bases) {
      if (b.size() != dim) throw Error(ErrorKind::DimensionMismatch, "base point dimension mismatch");
    }
    out.bases = options.bases;
  } else {
    for (int k = 0; k < classes; ++k) {
      Vector b = Vector::Ones(dim);
      b(k % dim) += options.separation * (k + 1);
      out.bases.push_back(std::move(b));
    }
  }

  CounterRng rng(seed);
  for (int k = 0; k < classes; ++k) {
    const auto& allowed = out.admissible[static_cast<std::size_t>(k)];
    for (int i = 0; i < n_per_class; ++i) {
      Matrix a = Matrix::Zero(dim, dim);
      for (int g : allowed) {
        const double c = options.coefficient_spread > 0.0
                             ? rng.uniform_open(-options.coefficient_spread, options.coefficient_spread)
                             : 0.0;
        a += c * out.generators[static_cast<std::size_t>(g)];
      }
      out.points.push_back({expm(a) * out.bases[static_cast<std::size_t>(k)], k});
    }
  }

  // Breaking intervals for every class-specific generator against every other class.
  for (std::size_t s = 0; s < class_specific.size(); ++s) {
    const int gi = shared_count + static_cast<int>(s);
    const Matrix& g = out.generators[static_cast<std::size_t>(gi)];
    const int owner = class_specific[s].owner_class;
    for (int k = 0; k < classes; ++k) {
      if (k == owner) continue;
      BreakingInterval iv;
      iv.generator = gi;
      iv.from_class = k;
      iv.owner_class = owner;
      const Vector& base = out.bases[static_cast<std::size_t>(k)];
      iv.half_distance = 0.5 * (base - out.bases[static_cast<std::size_t>(owner)]).norm();
      const int steps = static_cast<int>(std::ceil(options.search_limit / options.search_step));
      for (int t = 1; t <= steps; ++t) {
        const double c = t * options.search_step;
        const bool breaks = displacement(g, base, c) >= iv.half_distance;
        if (breaks && !iv.lower) iv.lower = c;
        if (iv.lower) {
          if (!breaks) break;
          iv.upper = c;
        }
      }
      out.breaking.push_back(iv);
    }
  }
  return out;
}

TwoClassTask make_two_class_task(int n_per_class, std::uint64_t seed) {
  MulticlassOptions opts;
  opts.bases = {Vector(4), Vector(4)};
  opts.bases[0] << 1.0, 0.0, 0.1, 0.0;
  opts.bases[1] << -1.0, 0.0, 2.0, 0.0;
  opts.coefficient_spread = 0.5;
  const Matrix shared = block_rotation_generator(4, 0);
  const Matrix specific = block_rotation_generator(4, 1);
  TwoClassTask out;
  out.data = make_multiclass_dataset(2, {shared}, {{specific, 0}}, n_per_class, seed, opts);
  out.dict = OperatorDictionary({shared, specific}, 0.0);
  return out;
}

}  // namespace transop
