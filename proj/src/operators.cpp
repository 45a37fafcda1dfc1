#include "transop/operators.hpp"

#include "transop/errors.hpp"
#include "transop/rng.hpp"

#include <json.hpp>

#include <cmath>
#include <sstream>

namespace transop {

namespace {

void require_dims(const OperatorDictionary& dict, Eigen::Index c_len, Eigen::Index z_len) {
  if (c_len != dict.count()) {
    std::ostringstream os;
    os << "coefficient length " << c_len << " does not match operator count " << dict.count();
    throw Error(ErrorKind::DimensionMismatch, os.str());
  }
  if (z_len != dict.dim()) {
    std::ostringstream os;
    os << "latent dimension " << z_len << " does not match dictionary dimension " << dict.dim();
    throw Error(ErrorKind::DimensionMismatch, os.str());
  }
}

}  // namespace

OperatorDictionary::OperatorDictionary(std::vector<Matrix> psi, double gamma)
    : psi_(std::move(psi)), gamma_(gamma), dim_(0) {
  if (psi_.empty()) throw Error(ErrorKind::InvalidArgument, "dictionary needs at least one operator");
  if (!(gamma_ >= 0.0) || !std::isfinite(gamma_)) {
    throw Error(ErrorKind::InvalidArgument, "gamma must be finite and >= 0");
  }
  dim_ = static_cast<int>(psi_.front().rows());
  for (std::size_t m = 0; m < psi_.size(); ++m) {
    require_square_finite(psi_[m], "operator " + std::to_string(m));
    if (psi_[m].rows() != dim_) {
      throw Error(ErrorKind::DimensionMismatch,
                  "operator " + std::to_string(m) + " is not " + std::to_string(dim_) + "x" +
                      std::to_string(dim_));
    }
  }
}

OperatorDictionary OperatorDictionary::zeros(int dim, int count, double gamma) {
  if (dim < 1 || count < 1) throw Error(ErrorKind::InvalidArgument, "dim and count must be >= 1");
  return OperatorDictionary(std::vector<Matrix>(static_cast<std::size_t>(count), Matrix::Zero(dim, dim)),
                            gamma);
}

const Matrix& OperatorDictionary::op(int m) const {
  if (m < 0 || m >= count()) {
    throw Error(ErrorKind::IndexOutOfRange,
                "operator index " + std::to_string(m) + " outside [0, " + std::to_string(count()) + ")");
  }
  return psi_[static_cast<std::size_t>(m)];
}

Matrix OperatorDictionary::generator(const Vector& c) const {
  if (c.size() != count()) {
    throw Error(ErrorKind::DimensionMismatch, "coefficient length " + std::to_string(c.size()) +
                                                  " does not match operator count " +
                                                  std::to_string(count()));
  }
  Matrix a = Matrix::Zero(dim_, dim_);
  for (int m = 0; m < count(); ++m) {
    if (c(m) != 0.0) a += c(m) * psi_[static_cast<std::size_t>(m)];
  }
  return a;
}

double OperatorDictionary::frobenius_penalty() const {
  double total = 0.0;
  for (const auto& p : psi_) total += p.squaredNorm();
  return 0.5 * gamma_ * total;
}

CoefficientVector::CoefficientVector(Vector values) : values_(std::move(values)) {
  if (!values_.allFinite()) throw Error(ErrorKind::NonFinite, "coefficients must be finite");
}

int CoefficientVector::sparsity() const {
  int count = 0;
  for (Eigen::Index i = 0; i < values_.size(); ++i) count += values_(i) != 0.0 ? 1 : 0;
  return count;
}

LaplacePrior::LaplacePrior(double zeta_in) : zeta(zeta_in) {
  if (!(zeta > 0.0) || !std::isfinite(zeta)) {
    throw Error(ErrorKind::InvalidScale, "Laplace prior scale must be > 0");
  }
}

LatentPoint transform(const OperatorDictionary& dict, const CoefficientVector& c,
                      const LatentPoint& z) {
  require_dims(dict, c.size(), z.z.size());
  return {expm(dict.generator(c.values())) * z.z, z.label};
}

double sample_laplace(double scale, double u) {
  if (u == 0.0) return 0.0;
  const double sign = u > 0.0 ? 1.0 : -1.0;
  return -scale * sign * std::log1p(-2.0 * std::abs(u));
}

LatentPoint sample_transform(const OperatorDictionary& dict, const LatentPoint& z,
                             const Vector& scales, double noise_sigma, std::uint64_t seed) {
  return sample_transform(dict, z, scales, noise_sigma, seed, nullptr);
}

LatentPoint sample_transform(const OperatorDictionary& dict, const LatentPoint& z,
                             const Vector& scales, double noise_sigma, std::uint64_t seed,
                             CoefficientVector* drawn) {
  require_dims(dict, scales.size(), z.z.size());
  for (Eigen::Index m = 0; m < scales.size(); ++m) {
    if (!(scales(m) > 0.0) || !std::isfinite(scales(m))) {
      throw Error(ErrorKind::InvalidScale, "scale " + std::to_string(m) + " must be > 0");
    }
  }
  if (!(noise_sigma >= 0.0)) throw Error(ErrorKind::InvalidArgument, "noise sigma must be >= 0");
  CounterRng rng(seed);
  Vector c(scales.size());
  for (Eigen::Index m = 0; m < scales.size(); ++m) {
    c(m) = sample_laplace(scales(m), rng.uniform_open(-0.5, 0.5));
  }
  Vector out = expm(dict.generator(c)) * z.z;
  if (noise_sigma > 0.0) {
    for (Eigen::Index i = 0; i < out.size(); ++i) out(i) += noise_sigma * rng.normal();
  }
  if (drawn) *drawn = CoefficientVector(c);
  return {out, z.label};
}

std::vector<LatentPoint> generate_path(const OperatorDictionary& dict,
                                       const CoefficientVector& c_star, const LatentPoint& z0,
                                       const std::vector<double>& t_values) {
  require_dims(dict, c_star.size(), z0.z.size());
  const Matrix a = dict.generator(c_star.values());
  std::vector<LatentPoint> path;
  path.reserve(t_values.size());
  for (double t : t_values) {
    if (!std::isfinite(t)) throw Error(ErrorKind::NonFinite, "path multiplier must be finite");
    if (t == 0.0) {
      path.push_back(z0);
    } else {
      path.push_back({expm(t * a) * z0.z, z0.label});
    }
  }
  return path;
}

std::vector<double> operator_magnitudes(const OperatorDictionary& dict) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(dict.count()));
  for (const auto& p : dict.operators()) out.push_back(p.norm());
  return out;
}

std::string dictionary_to_json(const OperatorDictionary& dict, std::optional<double> latent_scale) {
  nlohmann::ordered_json j;
  j["dim"] = dict.dim();
  j["count"] = dict.count();
  j["gamma"] = dict.gamma();
  if (latent_scale) j["latent_scale"] = *latent_scale;
  auto ops = nlohmann::ordered_json::array();
  for (const auto& p : dict.operators()) {
    auto flat = nlohmann::ordered_json::array();
    for (Eigen::Index r = 0; r < p.rows(); ++r)
      for (Eigen::Index c = 0; c < p.cols(); ++c) flat.push_back(p(r, c));
    ops.push_back(std::move(flat));
  }
  j["operators"] = std::move(ops);
  return j.dump(2) + "\n";
}

StoredModel dictionary_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("model JSON: ") + e.what());
  }
  try {
    const int dim = j.at("dim").get<int>();
    const int count = j.at("count").get<int>();
    const double gamma = j.at("gamma").get<double>();
    const auto& ops = j.at("operators");
    if (dim < 1 || count < 1 || !ops.is_array() || static_cast<int>(ops.size()) != count) {
      throw Error(ErrorKind::Parse, "model JSON: operator count does not match \"count\"");
    }
    std::vector<Matrix> psi;
    for (const auto& flat : ops) {
      if (!flat.is_array() || static_cast<int>(flat.size()) != dim * dim) {
        throw Error(ErrorKind::Parse, "model JSON: operator does not have dim*dim entries");
      }
      Matrix p(dim, dim);
      for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) p(r, c) = flat[static_cast<std::size_t>(r * dim + c)].get<double>();
      psi.push_back(std::move(p));
    }
    StoredModel out{OperatorDictionary(std::move(psi), gamma), 1.0};
    if (j.contains("latent_scale")) out.latent_scale = j.at("latent_scale").get<double>();
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("model JSON: ") + e.what());
  }
}

}  // namespace transop
