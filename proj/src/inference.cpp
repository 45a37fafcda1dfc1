#include "transop/inference.hpp"

#include "transop/errors.hpp"
#include "transop/rng.hpp"

#include <bit>
#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <sstream>
#include <thread>

namespace transop {

void InferenceConfig::validate() const {
  auto fail = [](const char* what) { throw Error(ErrorKind::InvalidArgument, what); };
  if (!(zeta >= 0.0)) fail("inference zeta must be >= 0");
  if (!(alpha0 > 0.0)) fail("inference alpha0 must be > 0");
  if (!(decay > 0.0 && decay <= 1.0)) fail("inference decay must be in (0, 1]");
  if (max_iters < 1) fail("inference max_iters must be >= 1");
  if (!(tol > 0.0)) fail("inference tol must be > 0");
  if (!(init_variance >= 0.0)) fail("inference init_variance must be >= 0");
  if (restarts < 1) fail("inference restarts must be >= 1");
}

namespace {

void require_pair(const OperatorDictionary& dict, Eigen::Index c_len, const Vector& z0,
                  const Vector& z1) {
  if (c_len != dict.count() || z0.size() != dict.dim() || z1.size() != dict.dim()) {
    std::ostringstream os;
    os << "expected " << dict.count() << " coefficients and latent dimension " << dict.dim()
       << ", got " << c_len << ", " << z0.size() << ", " << z1.size();
    throw Error(ErrorKind::DimensionMismatch, os.str());
  }
}

struct SmoothTerm {
  double value = 0.0;
  Vector gradient;
};

// Smooth term and its gradient at c.
SmoothTerm smooth_term(const OperatorDictionary& dict, const Vector& c, const Vector& z0,
                       const Vector& z1) {
  const Matrix a = dict.generator(c);
  const Vector r = z1 - expm(a) * z0;
  const Matrix back = expm_adjoint(a, r * z0.transpose());
  SmoothTerm out;
  out.value = 0.5 * r.squaredNorm();
  out.gradient.resize(dict.count());
  for (int m = 0; m < dict.count(); ++m) out.gradient(m) = -frobenius_inner(dict.op(m), back);
  return out;
}

double recon_at(const OperatorDictionary& dict, const Vector& c, const Vector& z0,
                const Vector& z1) {
  return 0.5 * (z1 - expm(dict.generator(c)) * z0).squaredNorm();
}

enum class Method { Proximal, Subgradient };

struct RunResult {
  Vector c;
  double objective = 0.0;
  double recon = 0.0;
  int iterations = 0;
  bool converged = false;
  bool aborted = false;
  int abort_iteration = 0;
  std::vector<double> trace;
};

constexpr double kDivergenceFactor = 1e6;

RunResult run_once(const OperatorDictionary& dict, const Vector& z0, const Vector& z1,
                   const InferenceConfig& cfg, Vector c, Method method, bool keep_trace) {
  const double penalty = dict.frobenius_penalty();
  RunResult out;
  Vector previous = c;  // for momentum
  double momentum_t = 1.0;

  SmoothTerm current = smooth_term(dict, c, z0, z1);
  double obj = current.value + penalty + cfg.zeta * c.lpNorm<1>();
  // Divergence is judged against the larger of the starting objective and the
  // pair's own energy, so a near-perfect start does not flag tiny increases.
  const double reference =
      std::max({obj, z0.squaredNorm() + z1.squaredNorm(), std::numeric_limits<double>::min()});
  if (keep_trace) out.trace.push_back(obj);

  double alpha = cfg.alpha0;
  for (int k = 0; k < cfg.max_iters; ++k) {
    Vector next;
    if (method == Method::Proximal) {
      if (cfg.accelerate && k > 0) {
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum_t * momentum_t));
        const Vector y = c + ((momentum_t - 1.0) / t_next) * (c - previous);
        momentum_t = t_next;
        const SmoothTerm at_y = smooth_term(dict, y, z0, z1);
        next = soft_threshold(y - alpha * at_y.gradient, cfg.zeta * alpha);
      } else {
        next = soft_threshold(c - alpha * current.gradient, cfg.zeta * alpha);
      }
    } else {
      const Vector sign = c.unaryExpr([](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); });
      next = c - alpha * (current.gradient + cfg.zeta * sign);
    }
    const double step = (next - c).norm();
    previous = c;
    c = std::move(next);
    out.iterations = k + 1;

    bool overflow = false;
    try {
      current = smooth_term(dict, c, z0, z1);
      obj = current.value + penalty + cfg.zeta * c.lpNorm<1>();
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NonFinite) throw;
      overflow = true;
      obj = std::numeric_limits<double>::infinity();
    }
    if (keep_trace) out.trace.push_back(obj);
    if (overflow || !std::isfinite(obj) || obj > kDivergenceFactor * reference) {
      out.aborted = true;
      out.abort_iteration = k + 1;
      break;
    }
    if (step < cfg.tol) {
      out.converged = true;
      break;
    }
    alpha *= cfg.decay;
  }
  out.c = std::move(c);
  out.objective = obj;
  out.recon = current.value;
  return out;
}

InferenceReport run_restarts(const OperatorDictionary& dict, const Vector& z0, const Vector& z1,
                             const InferenceConfig& cfg, std::uint64_t seed, Method method,
                             std::vector<double>* trace) {
  cfg.validate();
  require_pair(dict, dict.count(), z0, z1);
  if (!z0.allFinite() || !z1.allFinite()) throw Error(ErrorKind::NonFinite, "latent pair is not finite");

  bool have_best = false;
  RunResult best;
  int last_abort = 0;
  for (int restart = 0; restart < cfg.restarts; ++restart) {
    RunResult run = run_once(dict, z0, z1, cfg, initial_coefficients(cfg, dict.count(), seed, restart),
                             method, trace != nullptr);
    if (run.aborted) {
      last_abort = run.abort_iteration;
      continue;
    }
    bool better = !have_best;
    if (!better) {
      if (run.objective < best.objective) {
        better = true;
      } else if (run.objective == best.objective) {
        better = run.c.lpNorm<1>() < best.c.lpNorm<1>();
      }
    }
    if (better) {
      best = std::move(run);
      have_best = true;
    }
  }
  if (!have_best) {
    std::ostringstream os;
    os << "coefficient inference diverged at iteration " << last_abort
       << " (step size too large for this dictionary/latent scale)";
    throw Error(ErrorKind::NonFinite, os.str());
  }
  InferenceReport report;
  report.coefficients = CoefficientVector(best.c);
  report.objective = best.objective;
  report.recon_error = best.recon;
  report.iterations = best.iterations;
  report.converged = best.converged;
  report.all_zero = report.coefficients.sparsity() == 0;
  if (trace) *trace = std::move(best.trace);
  return report;
}

}  // namespace

double reconstruction_error(const OperatorDictionary& dict, const CoefficientVector& c,
                            const Vector& z0, const Vector& z1) {
  require_pair(dict, c.size(), z0, z1);
  return recon_at(dict, c.values(), z0, z1);
}

double objective(const OperatorDictionary& dict, const CoefficientVector& c, const Vector& z0,
                 const Vector& z1, double zeta) {
  return reconstruction_error(dict, c, z0, z1) + dict.frobenius_penalty() + zeta * c.l1();
}

Vector coefficient_gradient(const OperatorDictionary& dict, const CoefficientVector& c,
                            const Vector& z0, const Vector& z1) {
  require_pair(dict, c.size(), z0, z1);
  return smooth_term(dict, c.values(), z0, z1).gradient;
}

Vector soft_threshold(const Vector& c, double lambda) {
  if (!(lambda >= 0.0)) throw Error(ErrorKind::InvalidArgument, "threshold must be >= 0");
  return c.unaryExpr([lambda](double v) {
    const double shrunk = std::abs(v) - lambda;
    if (shrunk <= 0.0) return 0.0;
    return v > 0.0 ? shrunk : -shrunk;
  });
}

Vector initial_coefficients(const InferenceConfig& cfg, int count, std::uint64_t seed, int restart) {
  CounterRng rng(derive_seed(seed, static_cast<std::uint64_t>(restart)));
  const double sd = std::sqrt(cfg.init_variance);
  Vector c(count);
  for (int m = 0; m < count; ++m) c(m) = sd * rng.normal();
  return c;
}

InferenceReport infer(const OperatorDictionary& dict, const Vector& z0, const Vector& z1,
                      const InferenceConfig& cfg, std::uint64_t seed,
                      std::vector<double>* objective_trace) {
  return run_restarts(dict, z0, z1, cfg, seed, Method::Proximal, objective_trace);
}

InferenceReport infer_subgradient(const OperatorDictionary& dict, const Vector& z0,
                                  const Vector& z1, const InferenceConfig& cfg, std::uint64_t seed,
                                  std::vector<double>* objective_trace) {
  return run_restarts(dict, z0, z1, cfg, seed, Method::Subgradient, objective_trace);
}

std::uint64_t pair_seed(std::uint64_t seed, const Vector& z0, const Vector& z1) {
  std::uint64_t h = splitmix64_mix(seed ^ 0xA5A5A5A5DEADBEEFULL);
  auto absorb = [&h](const Vector& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      h = splitmix64_mix(h ^ std::bit_cast<std::uint64_t>(v(i)));
    }
    h = splitmix64_mix(h + static_cast<std::uint64_t>(v.size()));
  };
  absorb(z0);
  absorb(z1);
  return h;
}

std::vector<InferenceReport> infer_batch(const OperatorDictionary& dict,
                                         const std::vector<PointPair>& pairs,
                                         const InferenceConfig& cfg, std::uint64_t seed,
                                         int threads) {
  cfg.validate();
  const std::size_t n = pairs.size();
  std::vector<InferenceReport> out(n);
  std::vector<std::exception_ptr> errors(n);
  auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t i = begin; i < n; i += stride) {
      try {
        const auto& p = pairs[i];
        out[i] = infer(dict, p.z0, p.z1, cfg, pair_seed(seed, p.z0, p.z1));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t workers = threads > 1 ? std::min<std::size_t>(static_cast<std::size_t>(threads), n) : 1;
  if (workers <= 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const Error& e) {
      throw Error(e.kind(), "pair " + std::to_string(i) + ": " + e.detail());
    }
  }
  return out;
}

}  // namespace transop
