#include "transop/learning.hpp"

#include "transop/errors.hpp"
#include "transop/io.hpp"
#include "transop/rng.hpp"

#include <cmath>
#include <numeric>
#include <ostream>

namespace transop {

void TrainerConfig::validate() const {
  auto fail = [](const char* what) { throw Error(ErrorKind::InvalidArgument, what); };
  if (!(lr_psi >= 0.0)) fail("lr_psi must be >= 0");
  if (epochs < 1) fail("epochs must be >= 1");
  if (batch_size < 1) fail("batch_size must be >= 1");
  if (!(gamma >= 0.0)) fail("gamma must be >= 0");
  if (!(zeta >= 0.0)) fail("zeta must be >= 0");
  if (!(init_variance_psi >= 0.0)) fail("init_variance_psi must be >= 0");
  if (!(latent_scale > 0.0)) fail("latent_scale must be > 0");
  inference_config().validate();
}

InferenceConfig TrainerConfig::inference_config() const {
  InferenceConfig out = inference;
  out.zeta = zeta;
  return out;
}

std::vector<Matrix> dictionary_gradient(const OperatorDictionary& dict, const CoefficientVector& c,
                                        const Vector& z0, const Vector& z1) {
  if (c.size() != dict.count() || z0.size() != dict.dim() || z1.size() != dict.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "dictionary_gradient: pair or coefficients do not match dictionary");
  }
  const Matrix a = dict.generator(c.values());
  const Vector r = z1 - expm(a) * z0;
  const Matrix back = expm_adjoint(a, -r * z0.transpose());
  std::vector<Matrix> grads;
  grads.reserve(static_cast<std::size_t>(dict.count()));
  for (int m = 0; m < dict.count(); ++m) grads.push_back(c[m] * back + dict.gamma() * dict.op(m));
  return grads;
}

OperatorDictionary initial_dictionary(int dim, int count, const TrainerConfig& cfg) {
  if (dim < 1 || count < 1) throw Error(ErrorKind::InvalidArgument, "dim and operator count must be >= 1");
  CounterRng rng(derive_seed(cfg.seed, 0x1417));
  const double sd = std::sqrt(cfg.init_variance_psi);
  std::vector<Matrix> psi;
  for (int m = 0; m < count; ++m) {
    Matrix p(dim, dim);
    for (int r = 0; r < dim; ++r)
      for (int c = 0; c < dim; ++c) p(r, c) = sd * rng.normal();
    psi.push_back(std::move(p));
  }
  return OperatorDictionary(std::move(psi), cfg.gamma);
}

std::vector<PointPair> scale_pairs(const std::vector<PointPair>& pairs, double latent_scale) {
  std::vector<PointPair> out = pairs;
  for (auto& p : out) {
    p.z0 *= latent_scale;
    p.z1 *= latent_scale;
  }
  return out;
}

TrainResult train_dictionary(const std::vector<PointPair>& pairs, int count, const TrainerConfig& cfg) {
  if (pairs.empty()) throw Error(ErrorKind::InvalidArgument, "training needs at least one pair");
  return train_dictionary(pairs, initial_dictionary(static_cast<int>(pairs.front().z0.size()), count, cfg),
                          cfg);
}

TrainResult train_dictionary(const std::vector<PointPair>& raw_pairs, const OperatorDictionary& initial,
                             const TrainerConfig& cfg) {
  cfg.validate();
  if (raw_pairs.empty()) throw Error(ErrorKind::InvalidArgument, "training needs at least one pair");
  for (std::size_t i = 0; i < raw_pairs.size(); ++i) {
    if (raw_pairs[i].z0.size() != initial.dim() || raw_pairs[i].z1.size() != initial.dim()) {
      throw Error(ErrorKind::DimensionMismatch,
                  "pair " + std::to_string(i) + " does not match dimension " + std::to_string(initial.dim()));
    }
  }
  const std::vector<PointPair> pairs = scale_pairs(raw_pairs, cfg.latent_scale);
  const InferenceConfig inf = cfg.inference_config();
  const double batch_limit = 1e6;

  std::vector<Matrix> psi = initial.operators();
  TrainLog log;
  const std::size_t n = pairs.size();
  const std::size_t batch = std::min<std::size_t>(static_cast<std::size_t>(cfg.batch_size), n);
  std::vector<std::size_t> order(n);
  int step = 0;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    CounterRng shuffle(derive_seed(cfg.seed, 0x5000 + static_cast<std::uint64_t>(epoch)));
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[shuffle.below(i)]);

    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t stop = std::min(n, start + batch);
      std::vector<PointPair> chunk;
      chunk.reserve(stop - start);
      for (std::size_t i = start; i < stop; ++i) chunk.push_back(pairs[order[i]]);

      const OperatorDictionary dict(psi, cfg.gamma);
      const auto reports =
          infer_batch(dict, chunk, inf, derive_seed(cfg.seed, 0x10000 + static_cast<std::uint64_t>(step)),
                      cfg.threads);

      const double inv = 1.0 / static_cast<double>(chunk.size());
      TrainStep rec;
      rec.epoch = epoch;
      rec.step = step;
      rec.frobenius = dict.frobenius_penalty();
      std::vector<Matrix> grad(psi.size(), Matrix::Zero(dict.dim(), dict.dim()));
      std::size_t zero_count = 0;
      for (std::size_t i = 0; i < chunk.size(); ++i) {
        const auto& rep = reports[i];
        rec.recon += inv * rep.recon_error;
        rec.l1 += inv * cfg.zeta * rep.coefficients.l1();
        if (rep.all_zero) {
          ++zero_count;
          continue;
        }
        const Matrix a = dict.generator(rep.coefficients.values());
        const Vector r = chunk[i].z1 - expm(a) * chunk[i].z0;
        const Matrix back = expm_adjoint(a, -r * chunk[i].z0.transpose());
        for (std::size_t m = 0; m < psi.size(); ++m) {
          const double cm = rep.coefficients[static_cast<int>(m)];
          if (cm != 0.0) grad[m] += (inv * cm) * back;
        }
      }
      rec.zero_fraction = static_cast<double>(zero_count) / static_cast<double>(chunk.size());
      rec.objective = rec.recon + rec.frobenius + rec.l1;

      for (std::size_t m = 0; m < psi.size(); ++m) {
        psi[m] -= cfg.lr_psi * (grad[m] + cfg.gamma * psi[m]);
      }

      double after = 0.0;
      if (cfg.lr_psi == 0.0) {
        after = rec.recon;
      } else {
        const OperatorDictionary updated(psi, cfg.gamma);
        for (std::size_t i = 0; i < chunk.size(); ++i) {
          after += inv * reconstruction_error(updated, reports[i].coefficients, chunk[i].z0, chunk[i].z1);
        }
      }
      rec.e_psi_diff = rec.recon - after;

      rec.magnitudes.reserve(psi.size());
      for (std::size_t m = 0; m < psi.size(); ++m) {
        const double mag = psi[m].norm();
        if (!std::isfinite(mag) || mag > batch_limit) {
          throw Error(ErrorKind::Diverged, "operator " + std::to_string(m) + " magnitude " +
                                               format_double(mag) + " at step " + std::to_string(step) +
                                               "; lower zeta or raise gamma");
        }
        rec.magnitudes.push_back(mag);
      }
      log.steps.push_back(std::move(rec));
      ++step;
    }
  }
  return {OperatorDictionary(std::move(psi), cfg.gamma), std::move(log)};
}

HealthReport health_report(const TrainLog& log, const HealthThresholds& thresholds) {
  HealthReport out;
  if (log.steps.empty()) throw Error(ErrorKind::InvalidArgument, "health report needs a non-empty log");
  int negative = 0;
  for (const auto& s : log.steps) {
    if (s.e_psi_diff < 0.0) ++negative;
    if (!std::isfinite(s.objective)) out.diverged = true;
    for (double mag : s.magnitudes) {
      if (!std::isfinite(mag) || mag > thresholds.divergence_magnitude) out.diverged = true;
    }
  }
  out.negative_diff_fraction = static_cast<double>(negative) / static_cast<double>(log.steps.size());
  const auto& last = log.steps.back();
  out.all_magnitudes_decayed = !last.magnitudes.empty();
  for (double mag : last.magnitudes) {
    if (!(mag < thresholds.decayed_magnitude)) out.all_magnitudes_decayed = false;
  }
  out.all_coefficients_zero = last.zero_fraction >= 1.0;
  return out;
}

void write_train_log_csv(std::ostream& os, const TrainLog& log) {
  os << "step,epoch,objective,recon,frobenius,l1,e_psi_diff,zero_fraction";
  const std::size_t m = log.steps.empty() ? 0 : log.steps.front().magnitudes.size();
  for (std::size_t i = 0; i < m; ++i) os << ",mag_" << i;
  os << "\n";
  for (const auto& s : log.steps) {
    os << s.step << "," << s.epoch << "," << format_double(s.objective) << "," << format_double(s.recon)
       << "," << format_double(s.frobenius) << "," << format_double(s.l1) << ","
       << format_double(s.e_psi_diff) << "," << format_double(s.zero_fraction);
    for (double mag : s.magnitudes) os << "," << format_double(mag);
    os << "\n";
  }
}

}  // namespace transop
