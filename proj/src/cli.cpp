#include "transop/cli.hpp"

#include "transop/encoder.hpp"
#include "transop/errors.hpp"
#include "transop/inference.hpp"
#include "transop/io.hpp"
#include "transop/learning.hpp"
#include "transop/pairing.hpp"
#include "transop/rng.hpp"
#include "transop/stability.hpp"
#include "transop/synth.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <ostream>
#include <sstream>

namespace transop::cli {

namespace {

// Thrown for problems with the command line itself (exit code 1).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::uint64_t seed = 0;
  std::string config;
  std::string out;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--seed", c.seed, "Random seed");
  sub->add_option("--config", c.config, "key = value file; command-line flags take precedence");
  sub->add_option("--out", c.out, "Output path (stdout when omitted)");
}

void emit(const Common& c, std::ostream& out, const std::string& text) {
  if (c.out.empty()) {
    out << text;
  } else {
    write_file_atomic(c.out, text);
  }
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  if (text.empty()) return out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(static_cast<int>(parse_int(cell)));
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(parse_double(cell));
  return out;
}

std::vector<LatentPoint> load_points(const std::string& path) { return points_from_csv(read_file(path)); }

std::vector<PointPair> load_pairs(const std::vector<LatentPoint>& points, const std::string& path) {
  std::vector<PointPair> pairs;
  const auto idx = pair_indices_from_csv(read_file(path));
  for (std::size_t r = 0; r < idx.size(); ++r) {
    const auto [a, b] = idx[r];
    const int n = static_cast<int>(points.size());
    if (a < 0 || a >= n || b < 0 || b >= n) {
      throw Error(ErrorKind::IndexOutOfRange, path + " row " + std::to_string(r) + " references a point outside [0, " +
                                                  std::to_string(n) + ")");
    }
    const auto& p0 = points[static_cast<std::size_t>(a)];
    const auto& p1 = points[static_cast<std::size_t>(b)];
    pairs.push_back({p0.z, p1.z, p0.label, p1.label, a, b});
  }
  return pairs;
}

void add_inference_options(CLI::App* sub, InferenceConfig& cfg, bool with_zeta) {
  if (with_zeta) sub->add_option("--zeta", cfg.zeta, "Coefficient sparsity weight");
  sub->add_option("--alpha0", cfg.alpha0, "Initial step size");
  sub->add_option("--decay", cfg.decay, "Step size decay per iteration");
  sub->add_option("--max_iters", cfg.max_iters, "Iteration cap");
  sub->add_option("--tol", cfg.tol, "Stop when ||c_{k+1} - c_k|| falls below this");
  sub->add_option("--init_variance", cfg.init_variance, "Variance of the Gaussian starting point");
  sub->add_option("--restarts", cfg.restarts, "Random restarts");
  sub->add_flag("--accelerate", cfg.accelerate, "FISTA momentum");
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
  std::string kind = "rotation";
  int n = 500;
  double radius = 1.0;
  double noise = 0.0;
  std::string truth;
};

void run_synth(const Common& c, const SynthArgs& a, std::ostream& out) {
  std::string points;
  std::optional<OperatorDictionary> truth;
  if (a.kind == "rotation") {
    const auto data = make_rotation_dataset(a.n, a.radius, 0.0, a.noise, c.seed);
    points = points_to_csv(data.points);
    truth = OperatorDictionary({data.generator}, 0.0);
  } else if (a.kind == "two_class") {
    auto task = make_two_class_task(a.n, c.seed);
    points = points_to_csv(task.data.points);
    truth = std::move(task.dict);
  } else {
    throw UsageError("--kind must be rotation or two_class, got '" + a.kind + "'");
  }
  if (!a.truth.empty()) write_file_atomic(a.truth, dictionary_to_json(*truth, 1.0));
  emit(c, out, points);
}

// ---------------------------------------------------------------- pair

struct PairArgs {
  std::string data;
  std::string features;
  int k = 5;
};

void run_pair(const Common& c, const PairArgs& a, std::ostream& out) {
  const auto points = load_points(a.data);
  FeatureSource src;
  src.k = a.k;
  if (!a.features.empty()) {
    src.kind = FeatureSource::Kind::Precomputed;
    src.feature_file = a.features;
  }
  emit(c, out, pair_indices_to_csv(select_pairs(points, src, c.seed)));
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  std::string data;
  std::string pairs;
  std::string log;
  int count = 1;
  TrainerConfig cfg;
};

void run_train(const Common& c, TrainArgs a, std::ostream& out) {
  a.cfg.seed = c.seed;
  const auto pairs = load_pairs(load_points(a.data), a.pairs);
  const auto result = train_dictionary(pairs, a.count, a.cfg);
  if (!a.log.empty()) {
    std::ostringstream os;
    write_train_log_csv(os, result.log);
    write_file_atomic(a.log, os.str());
  }
  emit(c, out, dictionary_to_json(result.dict, a.cfg.latent_scale));
}

// ---------------------------------------------------------------- infer

struct InferArgs {
  std::string model;
  std::string data;
  std::string pairs;
  int threads = 1;
  InferenceConfig cfg;
};

std::string reports_to_csv(const std::vector<PointPair>& pairs, const std::vector<InferenceReport>& reports,
                           int count) {
  std::ostringstream os;
  os << "pair_index,anchor_index,neighbor_index,objective,recon_error,iterations,converged";
  for (int m = 0; m < count; ++m) os << ",c_" << m;
  os << "\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    os << i << "," << pairs[i].anchor_index << "," << pairs[i].neighbor_index << "," << format_double(r.objective)
       << "," << format_double(r.recon_error) << "," << r.iterations << "," << (r.converged ? 1 : 0);
    for (int m = 0; m < count; ++m) os << "," << format_double(r.coefficients[m]);
    os << "\n";
  }
  return os.str();
}

void run_infer(const Common& c, const InferArgs& a, std::ostream& out) {
  const StoredModel model = dictionary_from_json(read_file(a.model));
  const auto pairs = scale_pairs(load_pairs(load_points(a.data), a.pairs), model.latent_scale);
  const auto reports = infer_batch(model.dict, pairs, a.cfg, c.seed, a.threads);
  emit(c, out, reports_to_csv(pairs, reports, model.dict.count()));
}

// ---------------------------------------------------------------- sample

struct SampleArgs {
  std::string model;
  std::string data;
  std::string encoder;
  double scale = 0.1;
  double noise = 0.0;
  int samples = 1;
};

void run_sample(const Common& c, const SampleArgs& a, std::ostream& out) {
  const StoredModel model = dictionary_from_json(read_file(a.model));
  const auto points = load_points(a.data);
  std::optional<ScaleEncoder> enc;
  if (!a.encoder.empty()) enc = encoder_from_json(read_file(a.encoder));
  if (a.samples < 1) throw UsageError("--samples must be >= 1");
  std::vector<LatentPoint> sampled;
  std::uint64_t draw = 0;
  for (const auto& p : points) {
    const Vector scales = enc ? enc->scales(p.z) : Vector::Constant(model.dict.count(), a.scale);
    for (int s = 0; s < a.samples; ++s) {
      sampled.push_back(sample_transform(model.dict, p, scales, a.noise, derive_seed(c.seed, draw++)));
    }
  }
  emit(c, out, points_to_csv(sampled));
}

// ---------------------------------------------------------------- paths

struct PathArgs {
  std::string model;
  std::string data;
  std::string pairs;
  int pair_index = 0;
  std::string t = "0,0.25,0.5,0.75,1,1.25,1.5,2";
  InferenceConfig cfg;
};

void run_paths(const Common& c, const PathArgs& a, std::ostream& out) {
  const StoredModel model = dictionary_from_json(read_file(a.model));
  const auto pairs = load_pairs(load_points(a.data), a.pairs);
  if (a.pair_index < 0 || a.pair_index >= static_cast<int>(pairs.size())) {
    throw Error(ErrorKind::IndexOutOfRange, "pair index " + std::to_string(a.pair_index) + " outside [0, " +
                                                std::to_string(pairs.size()) + ")");
  }
  const PointPair& raw = pairs[static_cast<std::size_t>(a.pair_index)];
  const Vector z0 = model.latent_scale * raw.z0;
  const Vector z1 = model.latent_scale * raw.z1;
  const auto report = infer(model.dict, z0, z1, a.cfg, pair_seed(c.seed, z0, z1));
  // T(c) is linear, so the path can be traced on the unscaled start point.
  const auto t = parse_double_list(a.t);
  const auto path = generate_path(model.dict, report.coefficients, LatentPoint{raw.z0, raw.label0}, t);
  std::ostringstream os;
  os << "t";
  for (Eigen::Index i = 0; i < raw.z0.size(); ++i) os << ",z" << i;
  os << "\n";
  for (std::size_t k = 0; k < t.size(); ++k) {
    os << format_double(t[k]);
    for (Eigen::Index i = 0; i < raw.z0.size(); ++i) os << "," << format_double(path[k].z(i));
    os << "\n";
  }
  emit(c, out, os.str());
}

// ---------------------------------------------------------------- stability

struct StabilityArgs {
  std::string model;
  int trace_op = -1;
  std::string trace_point;
  int samples = 101;
  std::string trace_out;
};

void run_stability(const Common& c, const StabilityArgs& a, std::ostream& out) {
  const StoredModel model = dictionary_from_json(read_file(a.model));
  if (a.trace_op >= 0) {
    if (a.trace_out.empty()) throw UsageError("--trace_op needs --trace_out");
    Vector z0 = Vector::Zero(model.dict.dim());
    if (a.trace_point.empty()) {
      z0(0) = 1.0;
    } else {
      const auto values = parse_double_list(a.trace_point);
      if (static_cast<int>(values.size()) != model.dict.dim()) {
        throw Error(ErrorKind::DimensionMismatch, "--trace_point needs " + std::to_string(model.dict.dim()) + " values");
      }
      for (std::size_t i = 0; i < values.size(); ++i) z0(static_cast<Eigen::Index>(i)) = values[i];
    }
    const auto trace = path_trace(model.dict, a.trace_op, z0, default_c_range(model.dict, a.trace_op, a.samples));
    write_file_atomic(a.trace_out, path_trace_to_csv(trace));
  }
  emit(c, out, stability_to_csv(stability_metric(model.dict), operator_magnitudes(model.dict)));
}

// ---------------------------------------------------------------- classifier

struct ClassifierArgs {
  std::string data;
  std::string hidden;
  ClassifierConfig cfg;
};

void run_classifier(const Common& c, ClassifierArgs a, std::ostream& out, std::ostream& err) {
  a.cfg.seed = c.seed;
  a.cfg.hidden = parse_int_list(a.hidden);
  const auto fit = train_classifier(load_points(a.data), a.cfg);
  err << "train_accuracy " << format_double(fit.train_accuracy) << "\n";
  emit(c, out, classifier_to_json(fit.classifier));
}

// ---------------------------------------------------------------- encoder

struct EncoderArgs {
  std::string data;
  std::string model;
  std::string classifier;
  std::string hidden = "64,64";
  std::string curve;
  double initial_scale = 0.0;  // 0: start at zeta_prior
  EncoderConfig cfg;
};

void run_encoder(const Common& c, EncoderArgs a, std::ostream& out) {
  a.cfg.seed = c.seed;
  const StoredModel model = dictionary_from_json(read_file(a.model));
  const Classifier clf = classifier_from_json(read_file(a.classifier));
  const auto points = load_points(a.data);
  if (points.empty()) throw Error(ErrorKind::InvalidArgument, a.data + " has no points");
  a.cfg.validate();
  const double init = a.initial_scale > 0.0 ? a.initial_scale : a.cfg.zeta_prior;
  const auto enc = ScaleEncoder::create(model.dict.dim(), model.dict.count(), init, derive_seed(c.seed, 0xE1),
                                        parse_int_list(a.hidden));
  const auto trained = train_encoder(enc, clf, model.dict, points, a.cfg);
  if (!a.curve.empty()) {
    std::ostringstream os;
    os << "epoch,loss,mean_scale\n";
    for (std::size_t e = 0; e < trained.loss_curve.size(); ++e) {
      os << e << "," << format_double(trained.loss_curve[e]) << "," << format_double(trained.mean_scale_curve[e])
         << "\n";
    }
    write_file_atomic(a.curve, os.str());
  }
  emit(c, out, encoder_to_json(trained.encoder));
}

// ---------------------------------------------------------------- spread

struct SpreadArgs {
  std::string encoder;
  std::string data;
};

void run_spread(const Common& c, const SpreadArgs& a, std::ostream& out) {
  const ScaleEncoder enc = encoder_from_json(read_file(a.encoder));
  emit(c, out, spread_matrix_to_csv(spread_matrix(enc, load_points(a.data))));
}

// ---------------------------------------------------------------- bench

struct BenchArgs {
  int pairs = 100;
  std::string methods = "prox,subgrad";
  std::string model;
  std::string data;
  std::string pair_file;
  double radius = 5.0;
  bool timing = false;
  InferenceConfig cfg;
};

void run_bench(const Common& c, const BenchArgs& a, std::ostream& out) {
  std::vector<std::string> methods;
  {
    std::stringstream ss(a.methods);
    std::string m;
    while (std::getline(ss, m, ',')) {
      if (m != "prox" && m != "subgrad") throw UsageError("unknown method '" + m + "' (prox, subgrad)");
      methods.push_back(m);
    }
  }
  if (methods.empty()) throw UsageError("--methods is empty");

  std::optional<OperatorDictionary> dict;
  std::vector<PointPair> pairs;
  if (!a.model.empty()) {
    if (a.data.empty() || a.pair_file.empty()) throw UsageError("--model needs --data and --pair_file");
    const StoredModel model = dictionary_from_json(read_file(a.model));
    dict = model.dict;
    pairs = scale_pairs(load_pairs(load_points(a.data), a.pair_file), model.latent_scale);
    if (a.pairs >= 0 && static_cast<std::size_t>(a.pairs) < pairs.size()) pairs.resize(static_cast<std::size_t>(a.pairs));
  } else {
    if (a.pairs < 0) throw UsageError("--pairs must be >= 0");
    auto bench = make_sparse_benchmark(a.pairs, a.radius, c.seed);
    dict = bench.dict;
    pairs = std::move(bench.pairs);
  }

  std::ostringstream os;
  os << "pair_index,method,iterations,final_objective,recon_error,wall_time_ns\n";
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& p = pairs[i];
    const std::uint64_t seed = pair_seed(c.seed, p.z0, p.z1);
    for (const auto& m : methods) {
      const auto start = std::chrono::steady_clock::now();
      const auto r = m == "prox" ? infer(*dict, p.z0, p.z1, a.cfg, seed) : infer_subgradient(*dict, p.z0, p.z1, a.cfg, seed);
      const auto ns = std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - start);
      os << i << "," << m << "," << r.iterations << "," << format_double(r.objective) << ","
         << format_double(r.recon_error) << "," << (a.timing ? ns.count() : 0) << "\n";
    }
  }
  emit(c, out, os.str());
}

// Appends `--key=value` for every config entry not already given on the
// command line. Keys must name an option of the subcommand.
std::vector<std::string> merge_config(CLI::App* sub, const std::vector<std::string>& args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  const auto entries = parse_key_values(read_file(path));
  std::vector<std::string> merged = args;
  for (const auto& [key, value] : entries) {
    if (key == "config" || key == "help") throw UsageError(path + ": key '" + key + "' is not allowed in a config file");
    if (sub->get_option_no_throw("--" + key) == nullptr) {
      throw UsageError(path + ": '" + key + "' is not an option of " + sub->get_name());
    }
    bool given = false;
    for (const auto& a : args) given = given || a == "--" + key || a.rfind("--" + key + "=", 0) == 0;
    if (!given) merged.push_back("--" + key + "=" + value);
  }
  return merged;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Transport operator toolkit", "transop"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  Common common;
  SynthArgs synth;
  PairArgs pair;
  TrainArgs train;
  InferArgs inf;
  SampleArgs sample;
  PathArgs paths;
  StabilityArgs stab;
  ClassifierArgs clf;
  EncoderArgs enc;
  SpreadArgs spread;
  BenchArgs bench;

  auto* s = app.add_subcommand("synth", "Generate a synthetic dataset CSV");
  s->add_option("--kind", synth.kind, "rotation or two_class");
  s->add_option("--n", synth.n, "Points (per class for two_class)");
  s->add_option("--radius", synth.radius, "Rotation radius");
  s->add_option("--noise", synth.noise, "Gaussian noise added to rotation points");
  s->add_option("--truth", synth.truth, "Write the ground-truth generators as model JSON");

  auto* p = app.add_subcommand("pair", "Select nearest-neighbor point pairs");
  p->add_option("--data", pair.data, "Dataset CSV")->required();
  p->add_option("--features", pair.features, "Precomputed feature CSV, one row per point");
  p->add_option("--k", pair.k, "Neighbor count");

  auto* t = app.add_subcommand("train", "Learn a transport operator dictionary");
  t->add_option("--data", train.data, "Dataset CSV")->required();
  t->add_option("--pairs", train.pairs, "Pair index CSV")->required();
  t->add_option("--count", train.count, "Number of operators M");
  t->add_option("--log", train.log, "Training log CSV");
  t->add_option("--lr_psi", train.cfg.lr_psi, "Dictionary learning rate");
  t->add_option("--epochs", train.cfg.epochs, "Epochs");
  t->add_option("--batch_size", train.cfg.batch_size, "Pairs per gradient step");
  t->add_option("--gamma", train.cfg.gamma, "Frobenius weight");
  t->add_option("--zeta", train.cfg.zeta, "Coefficient sparsity weight");
  t->add_option("--init_variance_psi", train.cfg.init_variance_psi, "Variance of initial operator entries");
  t->add_option("--latent_scale", train.cfg.latent_scale, "Multiplier applied to latent vectors");
  t->add_option("--threads", train.cfg.threads, "Inference threads");
  add_inference_options(t, train.cfg.inference, false);

  auto* i = app.add_subcommand("infer", "Infer coefficients for point pairs");
  i->add_option("--model", inf.model, "Model JSON")->required();
  i->add_option("--data", inf.data, "Dataset CSV")->required();
  i->add_option("--pairs", inf.pairs, "Pair index CSV")->required();
  i->add_option("--threads", inf.threads, "Worker threads");
  add_inference_options(i, inf.cfg, true);

  auto* sm = app.add_subcommand("sample", "Apply randomly sampled transformations to points");
  sm->add_option("--model", sample.model, "Model JSON")->required();
  sm->add_option("--data", sample.data, "Dataset CSV")->required();
  sm->add_option("--encoder", sample.encoder, "Scale encoder JSON (overrides --scale)");
  sm->add_option("--scale", sample.scale, "Laplace scale for every operator");
  sm->add_option("--noise", sample.noise, "Gaussian noise sigma");
  sm->add_option("--samples", sample.samples, "Samples per point");

  auto* pa = app.add_subcommand("paths", "Trace the inferred path of one pair at multipliers t");
  pa->add_option("--model", paths.model, "Model JSON")->required();
  pa->add_option("--data", paths.data, "Dataset CSV")->required();
  pa->add_option("--pairs", paths.pairs, "Pair index CSV")->required();
  pa->add_option("--pair_index", paths.pair_index, "Row of the pair file");
  pa->add_option("--t", paths.t, "Comma-separated multipliers");
  add_inference_options(pa, paths.cfg, true);

  auto* st = app.add_subcommand("stability", "Eigenvalue stability metrics per operator");
  st->add_option("--model", stab.model, "Model JSON")->required();
  st->add_option("--trace_op", stab.trace_op, "Operator to trace");
  st->add_option("--trace_point", stab.trace_point, "Comma-separated start point (default e_0)");
  st->add_option("--samples", stab.samples, "Trace samples");
  st->add_option("--trace_out", stab.trace_out, "Trace CSV path");

  auto* cl = app.add_subcommand("classifier", "Train the latent-space classifier");
  cl->add_option("--data", clf.data, "Labeled dataset CSV")->required();
  cl->add_option("--hidden", clf.hidden, "Comma-separated hidden widths (empty: logistic regression)");
  cl->add_option("--lr", clf.cfg.lr, "Adam learning rate");
  cl->add_option("--epochs", clf.cfg.epochs, "Full-batch epochs");
  cl->add_option("--weight_decay", clf.cfg.weight_decay, "L2 weight decay");

  auto* en = app.add_subcommand("encoder", "Train the coefficient scale encoder");
  en->add_option("--data", enc.data, "Labeled dataset CSV")->required();
  en->add_option("--model", enc.model, "Model JSON")->required();
  en->add_option("--classifier", enc.classifier, "Classifier JSON")->required();
  en->add_option("--hidden", enc.hidden, "Comma-separated hidden widths");
  en->add_option("--curve", enc.curve, "Loss curve CSV");
  en->add_option("--initial_scale", enc.initial_scale, "Initial encoded scale (default zeta_prior)");
  en->add_option("--zeta_prior", enc.cfg.zeta_prior, "Laplace prior scale");
  en->add_option("--kl_weight", enc.cfg.kl_weight, "Weight on the KL term");
  en->add_option("--samples_j", enc.cfg.samples_j, "Coefficient samples per point");
  en->add_option("--lr", enc.cfg.lr, "Adam learning rate");
  en->add_option("--epochs", enc.cfg.epochs, "Epochs");
  en->add_option("--batch_size", enc.cfg.batch_size, "Points per step");
  en->add_option("--spread_scale", enc.cfg.spread_scale, "Multiplier on encoded scales when sampling");

  auto* sp = app.add_subcommand("spread", "Per-class mean encoded scales");
  sp->add_option("--encoder", spread.encoder, "Scale encoder JSON")->required();
  sp->add_option("--data", spread.data, "Labeled dataset CSV")->required();

  auto* b = app.add_subcommand("bench", "Proximal vs subgradient inference benchmark");
  b->add_option("--pairs", bench.pairs, "Number of pairs");
  b->add_option("--methods", bench.methods, "Comma-separated: prox, subgrad");
  b->add_option("--model", bench.model, "Model JSON (default: built-in sparse benchmark)");
  b->add_option("--data", bench.data, "Dataset CSV for --model");
  b->add_option("--pair_file", bench.pair_file, "Pair index CSV for --model");
  b->add_option("--radius", bench.radius, "Block radius of the built-in benchmark");
  b->add_flag("--timing", bench.timing, "Record wall_time_ns (otherwise 0, keeping output reproducible)");
  add_inference_options(b, bench.cfg, true);

  for (auto* sub : app.get_subcommands([](const CLI::App*) { return true; })) add_common(sub, common);

  try {
    std::vector<std::string> argv = args;
    if (!argv.empty()) {
      if (auto* sub = app.get_subcommand_no_throw(argv.front())) argv = merge_config(sub, argv);
    }
    std::vector<std::string> reversed(argv.rbegin(), argv.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (s->parsed()) run_synth(common, synth, out);
    if (p->parsed()) run_pair(common, pair, out);
    if (t->parsed()) run_train(common, train, out);
    if (i->parsed()) run_infer(common, inf, out);
    if (sm->parsed()) run_sample(common, sample, out);
    if (pa->parsed()) run_paths(common, paths, out);
    if (st->parsed()) run_stability(common, stab, out);
    if (cl->parsed()) run_classifier(common, clf, out, err);
    if (en->parsed()) run_encoder(common, enc, out);
    if (sp->parsed()) run_spread(common, spread, out);
    if (b->parsed()) run_bench(common, bench, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace transop::cli
