// End-to-end checks, one PASS/FAIL line per numbered criterion. Exit status is
// nonzero when any line fails.

#include "oracles.hpp"

#include "transop/cli.hpp"
#include "transop/encoder.hpp"
#include "transop/errors.hpp"
#include "transop/inference.hpp"
#include "transop/io.hpp"
#include "transop/learning.hpp"
#include "transop/numerics.hpp"
#include "transop/rng.hpp"
#include "transop/stability.hpp"
#include "transop/synth.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using namespace transop;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& check) {
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::printf("%s %d %s: %s\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---------------------------------------------------------------------------

Outcome numerics_suite() {
  const auto t0 = Clock::now();
  std::mt19937_64 gen(20);
  std::uniform_int_distribution<int> dim(1, 8);
  std::uniform_real_distribution<double> norm(0.01, 2.0);
  double worst_expm = 0.0;
  double worst_frechet = 0.0;
  double worst_adjoint = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const int d = dim(gen);
    Matrix a = oracle::random_matrix(gen, d);
    a *= norm(gen) / a.norm();  // 2-norm <= Frobenius norm <= 2
    const Matrix e = oracle::random_matrix(gen, d);
    const Matrix g = oracle::random_matrix(gen, d);

    const Matrix ref = oracle::taylor_expm(a, 60);
    worst_expm = std::max(worst_expm, (expm(a) - ref).norm() / ref.norm());

    const double h = 1e-6;
    const Matrix fd = (oracle::taylor_expm(a + h * e) - oracle::taylor_expm(a - h * e)) / (2.0 * h);
    const Matrix l = expm_frechet(a, e).second;
    worst_frechet = std::max(worst_frechet, (l - fd).norm() / fd.norm());

    const double lhs = (l.array() * g.array()).sum();
    const double rhs = (e.array() * expm_adjoint(a, g).array()).sum();
    worst_adjoint = std::max(worst_adjoint, std::abs(lhs - rhs) / std::max(std::abs(lhs), 1e-300));
  }
  const double secs = seconds_since(t0);
  return {worst_expm < 1e-12 && worst_frechet < 1e-6 && worst_adjoint < 1e-10 && secs < 10.0,
          fmt("expm %.2e, frechet %.2e, adjoint %.2e, %.2f s", worst_expm, worst_frechet, worst_adjoint, secs)};
}

Outcome inference_correctness() {
  const auto t0 = Clock::now();
  auto data = make_rotation_dataset(200, 5.0, 1.0, 0.0, 1);
  const auto pairs = make_rotation_pairs(data, 100, 2);
  const OperatorDictionary dict({so2_generator()}, 0.0);
  InferenceConfig cfg;
  cfg.zeta = 1e-3;
  double worst = 0.0;
  int non_monotone = 0;
  for (const auto& rp : pairs) {
    const auto& p = rp.pair;
    std::vector<double> trace;
    const auto r = infer(dict, p.z0, p.z1, cfg, pair_seed(5, p.z0, p.z1), &trace);
    // Grid oracle over the scalar objective, with a closed-form rotation.
    const auto f = [&](double c) {
      const Vector resid = p.z1 - oracle::rotation(c) * p.z0;
      return 0.5 * resid.squaredNorm() + cfg.zeta * std::abs(c);
    };
    const double best = oracle::grid_argmin(f, -1.5, 1.5, 1e-4);
    worst = std::max(worst, std::abs(r.coefficients[0] - best));
    for (std::size_t k = 1; k < trace.size(); ++k) non_monotone += trace[k] > trace[k - 1] + 1e-10;
  }
  const double secs = seconds_since(t0);
  return {worst < 5e-3 && non_monotone == 0 && secs < 30.0,
          fmt("max |c - grid| %.2e, objective increases %d, %.2f s", worst, non_monotone, secs)};
}

Outcome proximal_vs_subgradient() {
  std::ostringstream out;
  std::ostringstream err;
  const int rc = cli::run({"bench", "--pairs", "100", "--seed", "0", "--zeta", "0.1", "--methods", "prox,subgrad"},
                          out, err);
  if (rc != 0) return {false, "bench exited " + std::to_string(rc) + ": " + err.str()};
  const auto table = parse_csv(out.str(), true);
  std::map<int, std::map<std::string, std::pair<int, double>>> rows;
  for (const auto& row : table.rows) {
    rows[static_cast<int>(parse_int(row[0]))][row[1]] = {static_cast<int>(parse_int(row[2])), parse_double(row[3])};
  }
  int no_worse = 0;
  int fewer = 0;
  for (const auto& [i, m] : rows) {
    if (!m.contains("prox") || !m.contains("subgrad")) return {false, fmt("pair %d lacks a method row", i)};
    no_worse += m.at("prox").second <= m.at("subgrad").second + 1e-8;
    fewer += m.at("prox").first <= m.at("subgrad").first;
  }
  const bool ok = rows.size() == 100 && no_worse >= 95 && fewer >= 80;
  return {ok, fmt("%zu pairs; objective <= subgradient + 1e-8 on %d, iterations <= on %d", rows.size(), no_worse,
                  fewer)};
}

std::vector<PointPair> rotation_training_pairs() {
  const auto data = make_rotation_dataset(2000, 1.0, 0.5, 0.0, 1);
  std::vector<PointPair> pairs;
  for (auto& rp : make_rotation_pairs(data, 2000, 2)) pairs.push_back(rp.pair);
  return pairs;
}

double alignment(const Matrix& psi) {
  const Matrix g = so2_generator();
  return std::abs((psi.array() * g.array()).sum()) / (psi.norm() * g.norm());
}

Outcome dictionary_recovery() {
  const auto t0 = Clock::now();
  TrainerConfig cfg;
  cfg.gamma = 1e-6;
  cfg.latent_scale = 10.0;
  cfg.zeta = 0.1;
  cfg.lr_psi = 1e-3;
  cfg.epochs = 50;
  const auto result = train_dictionary(rotation_training_pairs(), 1, cfg);
  const double align = alignment(result.dict.op(0));
  const double secs = seconds_since(t0);
  return {align > 0.99 && secs < 300.0, fmt("alignment %.6f, %.1f s", align, secs)};
}

Outcome model_order_selection() {
  TrainerConfig cfg;
  cfg.gamma = 1e-4;
  cfg.latent_scale = 1.0;
  cfg.zeta = 0.1;
  cfg.lr_psi = 3.0;
  cfg.batch_size = 5;
  cfg.epochs = 10;
  cfg.inference.alpha0 = 0.1;
  const auto result = train_dictionary(rotation_training_pairs(), 4, cfg);
  const auto mags = operator_magnitudes(result.dict);
  const double top = *std::max_element(mags.begin(), mags.end());
  int pruned = 0;
  std::string list;
  for (double m : mags) {
    pruned += m < 0.05 * top;
    list += fmt(" %.4f", m);
  }
  return {pruned >= 2, fmt("magnitudes%s; %d below 5%% of max", list.c_str(), pruned)};
}

Outcome sparsity_trend() {
  std::vector<Matrix> ops{block_rotation_generator(4, 0), block_rotation_generator(4, 1)};
  CounterRng rng(77);
  Matrix a(4, 4);
  Matrix b(4, 4);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      a(i, j) = rng.normal();
      b(i, j) = rng.normal();
    }
  }
  const Matrix skew = a - a.transpose();
  ops.push_back(skew * (std::sqrt(2.0) * 0.5 / skew.norm()));
  ops.push_back(b * (std::sqrt(2.0) * 0.5 / b.norm()));
  const OperatorDictionary dict(ops, 0.0);

  std::vector<PointPair> pairs;
  for (int s = 0; s < 50; ++s) {
    CounterRng r(derive_seed(9, static_cast<std::uint64_t>(s)));
    Vector z0(4);
    for (int i = 0; i < 4; ++i) z0(i) = 1.5 * r.normal();
    const auto z1 = sample_transform(dict, LatentPoint{z0, {}}, Vector::Constant(4, 0.3), 0.0,
                                     derive_seed(10, static_cast<std::uint64_t>(s)));
    pairs.push_back(PointPair{z0, z1.z, {}, {}, s, s});
  }
  std::vector<double> means;
  std::string list;
  for (double zeta : {0.005, 0.05, 0.5, 2.0}) {
    InferenceConfig cfg;
    cfg.zeta = zeta;
    double total = 0.0;
    for (int s = 0; s < 50; ++s) {
      total += infer(dict, pairs[static_cast<std::size_t>(s)].z0, pairs[static_cast<std::size_t>(s)].z1, cfg,
                     static_cast<std::uint64_t>(s))
                   .coefficients.sparsity();
    }
    means.push_back(total / 50.0);
    list += fmt(" %.2f", means.back());
  }
  bool monotone = true;
  for (std::size_t k = 1; k < means.size(); ++k) monotone = monotone && means[k] <= means[k - 1];
  InferenceConfig huge;
  huge.zeta = 1e6;
  int all_zero = 0;
  for (int s = 0; s < 50; ++s) {
    all_zero += infer(dict, pairs[static_cast<std::size_t>(s)].z0, pairs[static_cast<std::size_t>(s)].z1, huge,
                      static_cast<std::uint64_t>(s))
                    .all_zero;
  }
  return {monotone && all_zero == 50,
          fmt("mean nonzeros%s; zeta 1e6 all_zero on %d/50", list.c_str(), all_zero)};
}

Outcome encoder_behavior() {
  const auto task = make_two_class_task(200, 1);
  ClassifierConfig cc;
  cc.epochs = 300;
  const auto clf = train_classifier(task.data.points, cc).classifier;
  EncoderConfig ec;
  ec.spread_scale = 20.0;
  ec.lr = 1e-2;
  ec.batch_size = 50;
  ec.epochs = 300;
  ec.seed = 2;
  const auto start = ScaleEncoder::create(4, 2, ec.zeta_prior, 3, {16, 16});

  ec.kl_weight = 0.5;
  const auto regular = train_encoder(start, clf, task.dict, task.data.points, ec);
  const Matrix spread = spread_matrix(regular.encoder, task.data.points);
  const double ratio = spread(0, 1) / spread(1, 1);
  const double kept = mean_scale(regular.encoder, task.data.points);

  ec.kl_weight = 0.0;
  const auto ablation = train_encoder(start, clf, task.dict, task.data.points, ec);
  const double collapsed = mean_scale(ablation.encoder, task.data.points);

  const bool ok = ratio >= 2.0 && collapsed < 0.1 * ec.zeta_prior && kept > 0.25 * ec.zeta_prior;
  return {ok, fmt("breaking-operator scale A/B %.2f; mean scale %.4f with kl 0.5, %.4f with kl 0", ratio, kept,
                  collapsed)};
}

Outcome closed_form_kl() {
  // Samples c ~ Laplace(0, zeta) by inverse CDF and averages
  // log p_zeta(c) - log p_h(c), which equals log(h/zeta) + zeta/h - 1.
  // The estimator's standard deviation is |zeta/h - 1| / sqrt(n), so the grid
  // spans a factor of four to keep it well under the tolerance.
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> unif(-0.5, 0.5);
  const std::vector<double> grid{0.05, 0.05 * std::sqrt(2.0), 0.1, 0.1 * std::sqrt(2.0), 0.2};
  const int n = 1000000;
  double worst = 0.0;
  bool sign_ok = true;
  for (double h : grid) {
    for (double zeta : grid) {
      double total = 0.0;
      for (int i = 0; i < n; ++i) {
        const double u = unif(gen);
        const double c = -zeta * std::copysign(1.0, u) * std::log(1.0 - 2.0 * std::abs(u));
        total += (-std::log(2.0 * zeta) - std::abs(c) / zeta) - (-std::log(2.0 * h) - std::abs(c) / h);
      }
      const double kl = kl_laplace(h, zeta);
      worst = std::max(worst, std::abs(kl - total / n));
      sign_ok = sign_ok && (h == zeta ? kl == 0.0 : kl > 0.0);
    }
  }
  for (double h = 1e-3; h < 1e3; h *= 1.07) sign_ok = sign_ok && kl_laplace(h, 0.7) >= 0.0;
  return {worst < 1e-2 && sign_ok, fmt("max |closed form - MC| %.2e; nonnegative, zero only at h = zeta: %s", worst,
                                       sign_ok ? "yes" : "no")};
}

Outcome stability() {
  std::mt19937_64 gen(30);
  double worst_skew = 0.0;
  for (int t = 0; t < 100; ++t) {
    const Matrix a = oracle::random_matrix(gen, 6);
    worst_skew = std::max(worst_skew, max_abs_real_eigenvalue(a - a.transpose()));
  }
  double worst_ref = 0.0;
  for (int t = 0; t < 100; ++t) {
    const Matrix a = oracle::random_matrix(gen, 6);
    worst_ref = std::max(worst_ref, std::abs(max_abs_real_eigenvalue(a) - oracle::reference_max_abs_real(a)));
  }
  const OperatorDictionary so2({so2_generator()}, 0.0);
  Vector z0(2);
  z0 << 0.6, -0.8;
  const auto trace = path_trace(so2, 0, z0, default_c_range(so2, 0));
  double spread = 0.0;
  for (const auto& z : trace.z) spread = std::max(spread, std::abs(z.norm() - z0.norm()));
  return {worst_skew <= 1e-8 && worst_ref <= 1e-8 && spread <= 1e-8,
          fmt("skew %.2e, vs reference %.2e, SO(2) norm drift %.2e", worst_skew, worst_ref, spread)};
}

// Runs every CLI command twice in separate directories and compares all bytes
// written, to stdout or to files.
Outcome determinism_and_serialization() {
  const fs::path root = fs::temp_directory_path() / "transop_acceptance";
  fs::remove_all(root);
  const std::vector<std::vector<std::string>> script{
      {"synth", "--n", "60", "--seed", "4", "--truth", "rot_truth.json", "--out", "rot.csv"},
      {"synth", "--kind", "two_class", "--n", "30", "--seed", "4", "--truth", "two_truth.json", "--out", "two.csv"},
      {"pair", "--data", "rot.csv", "--k", "3", "--seed", "4", "--out", "pairs.csv"},
      {"train", "--data", "rot.csv", "--pairs", "pairs.csv", "--epochs", "2", "--batch_size", "30", "--latent_scale",
       "10", "--seed", "4", "--log", "log.csv", "--out", "model.json"},
      {"infer", "--model", "model.json", "--data", "rot.csv", "--pairs", "pairs.csv", "--threads", "2", "--seed", "4"},
      {"sample", "--model", "model.json", "--data", "rot.csv", "--samples", "2", "--seed", "4"},
      {"paths", "--model", "model.json", "--data", "rot.csv", "--pairs", "pairs.csv", "--pair_index", "3", "--seed",
       "4"},
      {"stability", "--model", "model.json", "--trace_op", "0", "--trace_out", "trace.csv", "--seed", "4"},
      {"classifier", "--data", "two.csv", "--epochs", "50", "--seed", "4", "--out", "clf.json"},
      {"encoder", "--data", "two.csv", "--model", "two_truth.json", "--classifier", "clf.json", "--hidden", "8",
       "--epochs", "3", "--batch_size", "20", "--curve", "curve.csv", "--seed", "4", "--out", "enc.json"},
      {"spread", "--encoder", "enc.json", "--data", "two.csv", "--seed", "4"},
      {"bench", "--pairs", "5", "--seed", "4"},
  };
  std::vector<std::map<std::string, std::string>> runs(2);
  const fs::path cwd = fs::current_path();
  for (int r = 0; r < 2; ++r) {
    const fs::path dir = root / std::to_string(r);
    fs::create_directories(dir);
    fs::current_path(dir);
    for (std::size_t k = 0; k < script.size(); ++k) {
      std::ostringstream out;
      std::ostringstream err;
      const int rc = cli::run(script[k], out, err);
      if (rc != 0) {
        fs::current_path(cwd);
        return {false, script[k][0] + " exited " + std::to_string(rc) + ": " + err.str()};
      }
      runs[static_cast<std::size_t>(r)]["stdout:" + std::to_string(k) + ":" + script[k][0]] = out.str();
    }
    for (const auto& entry : fs::directory_iterator(dir)) {
      runs[static_cast<std::size_t>(r)]["file:" + entry.path().filename().string()] = read_file(entry.path().string());
    }
    fs::current_path(cwd);
  }
  int differing = 0;
  std::string which;
  for (const auto& [key, text] : runs[0]) {
    if (!runs[1].contains(key) || runs[1].at(key) != text) {
      ++differing;
      which += " " + key;
    }
  }
  differing += static_cast<int>(runs[1].size() != runs[0].size());
  fs::remove_all(root);

  // Value-exact model round trip on awkward doubles.
  std::mt19937_64 gen(40);
  std::vector<Matrix> ops;
  for (int m = 0; m < 3; ++m) {
    Matrix a = oracle::random_matrix(gen, 3);
    a(0, 0) = std::numeric_limits<double>::denorm_min();
    a(1, 1) = 1.0 / 3.0;
    a(2, 2) = -std::numeric_limits<double>::max();
    ops.push_back(a);
  }
  const OperatorDictionary dict(ops, 1e-7);
  const StoredModel back = dictionary_from_json(dictionary_to_json(dict, 0.1));
  bool round_trip = back.latent_scale == 0.1 && back.dict.gamma() == dict.gamma();
  for (int m = 0; m < 3; ++m) round_trip = round_trip && (back.dict.op(m).array() == dict.op(m).array()).all();

  // train -> infer versus train -> save -> load -> infer.
  const auto data = make_rotation_dataset(100, 1.0, 0.3, 0.0, 6);
  std::vector<PointPair> pairs;
  for (auto& rp : make_rotation_pairs(data, 100, 7)) pairs.push_back(rp.pair);
  TrainerConfig tc;
  tc.epochs = 3;
  tc.batch_size = 25;
  tc.latent_scale = 10.0;
  const auto trained = train_dictionary(pairs, 2, tc);
  const auto direct = infer_batch(trained.dict, scale_pairs(pairs, tc.latent_scale), tc.inference_config(), 11);
  const StoredModel loaded = dictionary_from_json(dictionary_to_json(trained.dict, tc.latent_scale));
  const auto reloaded =
      infer_batch(loaded.dict, scale_pairs(pairs, loaded.latent_scale), tc.inference_config(), 11);
  bool bitwise = direct.size() == reloaded.size();
  for (std::size_t i = 0; bitwise && i < direct.size(); ++i) {
    bitwise = direct[i].objective == reloaded[i].objective && direct[i].iterations == reloaded[i].iterations &&
              (direct[i].coefficients.values().array() == reloaded[i].coefficients.values().array()).all();
  }
  return {differing == 0 && round_trip && bitwise,
          fmt("%zu outputs compared, %d differ%s; JSON round trip exact: %s; reload inference bitwise equal: %s",
              runs[0].size(), differing, which.c_str(), round_trip ? "yes" : "no", bitwise ? "yes" : "no")};
}

}  // namespace

int main() {
  report(1, "numerics suite", numerics_suite);
  report(2, "inference correctness", inference_correctness);
  report(3, "proximal vs subgradient", proximal_vs_subgradient);
  report(4, "dictionary learning recovery", dictionary_recovery);
  report(5, "model-order selection", model_order_selection);
  report(6, "sparsity trend", sparsity_trend);
  report(7, "encoder behavior", encoder_behavior);
  report(8, "closed-form KL", closed_form_kl);
  report(9, "stability metric", stability);
  report(10, "determinism and serialization", determinism_and_serialization);
  return failures == 0 ? 0 : 1;
}
