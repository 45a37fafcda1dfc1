#include "transop/encoder.hpp"

#include "transop/errors.hpp"
#include "transop/io.hpp"
#include "transop/rng.hpp"

#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace transop {

namespace {

double inverse_softplus(double y) {
  return y > 20.0 ? y + std::log1p(-std::exp(-y)) : std::log(std::expm1(y));
}

Vector softmax(const Vector& logits) {
  const double top = logits.maxCoeff();
  Vector e = (logits.array() - top).exp();
  return e / e.sum();
}

int require_label(const LatentPoint& p, int classes) {
  if (!p.label) throw Error(ErrorKind::UnlabeledPoint, "point has no class label");
  if (*p.label < 0 || (classes > 0 && *p.label >= classes)) {
    throw Error(ErrorKind::IndexOutOfRange, "label " + std::to_string(*p.label) + " outside [0, " +
                                                std::to_string(classes) + ")");
  }
  return *p.label;
}

}  // namespace

Classifier::Classifier(Mlp net) : net_(std::move(net)) {
  if (net_.output_activation() != Activation::Identity) {
    throw Error(ErrorKind::InvalidArgument, "classifier network must have an identity output layer");
  }
}

Vector Classifier::logits(const Vector& z) const { return net_.forward(z); }

Vector Classifier::probabilities(const Vector& z) const { return softmax(logits(z)); }

int Classifier::predict(const Vector& z) const {
  Eigen::Index best = 0;
  logits(z).maxCoeff(&best);
  return static_cast<int>(best);
}

double Classifier::cross_entropy(const Vector& z, int label, Vector* grad_z) const {
  Mlp::Tape tape;
  const Vector out = net_.forward(z, tape);
  const double top = out.maxCoeff();
  const double log_norm = top + std::log((out.array() - top).exp().sum());
  const double ce = log_norm - out(label);
  if (grad_z) {
    Vector delta = softmax(out);
    delta(label) -= 1.0;
    net_.backward(tape, delta, grad_z);
  }
  return ce;
}

ClassifierFit train_classifier(const std::vector<LatentPoint>& points, const ClassifierConfig& cfg) {
  if (points.empty()) throw Error(ErrorKind::DegenerateLabels, "no training points");
  std::set<int> labels;
  int classes = 0;
  for (const auto& p : points) {
    const int y = require_label(p, -1);
    labels.insert(y);
    classes = std::max(classes, y + 1);
  }
  if (labels.size() < 2) throw Error(ErrorKind::DegenerateLabels, "classifier needs at least two classes");
  if (cfg.epochs < 1 || !(cfg.lr > 0.0)) throw Error(ErrorKind::InvalidArgument, "classifier lr/epochs invalid");

  std::vector<int> widths{static_cast<int>(points.front().z.size())};
  widths.insert(widths.end(), cfg.hidden.begin(), cfg.hidden.end());
  widths.push_back(classes);
  Mlp net = Mlp::random(widths, Activation::Tanh, Activation::Identity, derive_seed(cfg.seed, 0xC1A5));
  if (cfg.hidden.empty()) net.layers().front().weights.setZero();

  Vector params = net.parameters();
  AdamState adam;
  const double inv = 1.0 / static_cast<double>(points.size());
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    net.set_parameters(params);
    Vector grad = Vector::Zero(params.size());
    Mlp::Tape tape;
    for (const auto& p : points) {
      const Vector out = net.forward(p.z, tape);
      Vector delta = softmax(out);
      delta(*p.label) -= 1.0;
      grad += inv * net.backward(tape, delta);
    }
    if (cfg.weight_decay > 0.0) grad += cfg.weight_decay * params;
    adam.step(params, grad, cfg.lr);
  }
  net.set_parameters(params);
  ClassifierFit fit{Classifier(std::move(net)), 0.0};
  int correct = 0;
  for (const auto& p : points) correct += fit.classifier.predict(p.z) == *p.label ? 1 : 0;
  fit.train_accuracy = static_cast<double>(correct) * inv;
  return fit;
}

ScaleEncoder::ScaleEncoder(Mlp net) : net_(std::move(net)) {
  if (net_.output_activation() != Activation::Softplus) {
    throw Error(ErrorKind::InvalidArgument, "scale encoder needs a softplus output layer");
  }
}

ScaleEncoder ScaleEncoder::create(int dim, int count, double initial_scale, std::uint64_t seed,
                                  const std::vector<int>& hidden) {
  if (!(initial_scale > kMinScale)) throw Error(ErrorKind::InvalidScale, "initial scale must be positive");
  std::vector<int> widths{dim};
  widths.insert(widths.end(), hidden.begin(), hidden.end());
  widths.push_back(count);
  Mlp net = Mlp::random(widths, Activation::Tanh, Activation::Softplus, seed);
  auto& out = net.layers().back();
  out.weights *= 0.1;
  out.bias.setConstant(inverse_softplus(initial_scale - kMinScale));
  return ScaleEncoder(std::move(net));
}

ScaleEncoder ScaleEncoder::constant(int dim, int count, double scale) {
  if (!(scale > kMinScale)) throw Error(ErrorKind::InvalidScale, "scale must be positive");
  DenseLayer layer{Matrix::Zero(count, dim), Vector::Constant(count, inverse_softplus(scale - kMinScale))};
  return ScaleEncoder(Mlp({std::move(layer)}, Activation::Tanh, Activation::Softplus));
}

Vector ScaleEncoder::scales(const Vector& z) const { return net_.forward(z).array() + kMinScale; }

void EncoderConfig::validate() const {
  if (!(zeta_prior > 0.0)) throw Error(ErrorKind::InvalidScale, "zeta_prior must be > 0");
  if (!(kl_weight >= 0.0)) throw Error(ErrorKind::InvalidArgument, "kl_weight must be >= 0");
  if (samples_j < 1) throw Error(ErrorKind::InvalidArgument, "samples_j must be >= 1");
  if (!(lr > 0.0) || epochs < 1 || batch_size < 1) {
    throw Error(ErrorKind::InvalidArgument, "encoder lr, epochs and batch_size must be positive");
  }
  if (!(spread_scale > 0.0)) throw Error(ErrorKind::InvalidScale, "spread_scale must be > 0");
}

double kl_laplace(double h, double zeta) {
  if (!(h > 0.0) || !(zeta > 0.0)) throw Error(ErrorKind::InvalidScale, "KL needs positive scales");
  return std::log(h) - std::log(zeta) + zeta / h - 1.0;
}

EncoderLoss encoder_loss(const ScaleEncoder& enc, const Classifier& clf, const OperatorDictionary& dict,
                         const LatentPoint& point, const EncoderConfig& cfg, std::uint64_t seed) {
  const int label = require_label(point, clf.classes());
  if (enc.count() != dict.count()) {
    throw Error(ErrorKind::DimensionMismatch, "encoder emits " + std::to_string(enc.count()) +
                                                  " scales for " + std::to_string(dict.count()) + " operators");
  }
  if (point.z.size() != dict.dim() || enc.dim() != dict.dim() || clf.input_dim() != dict.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "encoder, classifier, dictionary and point dimensions differ");
  }
  const int count = dict.count();
  Mlp::Tape tape;
  const Vector h = enc.net().forward(point.z, tape).array() + kMinScale;

  EncoderLoss out;
  out.scales = h;
  Vector grad_h = Vector::Zero(count);
  CounterRng rng(seed);
  const double inv_j = 1.0 / static_cast<double>(cfg.samples_j);
  for (int j = 0; j < cfg.samples_j; ++j) {
    Vector unit(count);
    for (int m = 0; m < count; ++m) unit(m) = sample_laplace(1.0, rng.uniform_open(-0.5, 0.5));
    const Vector c = cfg.spread_scale * h.cwiseProduct(unit);
    const Matrix a = dict.generator(c);
    const Vector z_hat = expm(a) * point.z;
    Vector grad_z;
    out.cross_entropy += inv_j * clf.cross_entropy(z_hat, label, &grad_z);
    // d CE / d c_m = grad_z^T L(A, Psi_m) z = <Psi_m, L*(A, grad_z z^T)>.
    const Matrix back = expm_adjoint(a, grad_z * point.z.transpose());
    for (int m = 0; m < count; ++m) {
      grad_h(m) += inv_j * cfg.spread_scale * unit(m) * frobenius_inner(dict.op(m), back);
    }
  }
  for (int m = 0; m < count; ++m) {
    out.kl += kl_laplace(h(m), cfg.zeta_prior);
    grad_h(m) += cfg.kl_weight * (1.0 / h(m) - cfg.zeta_prior / (h(m) * h(m)));
  }
  out.loss = out.cross_entropy + cfg.kl_weight * out.kl;
  out.gradient = enc.net().backward(tape, grad_h);
  if (!std::isfinite(out.loss) || !out.gradient.allFinite()) {
    throw Error(ErrorKind::NonFinite, "encoder loss is not finite");
  }
  return out;
}

double mean_scale(const ScaleEncoder& enc, const std::vector<LatentPoint>& points) {
  if (points.empty()) return 0.0;
  double total = 0.0;
  for (const auto& p : points) total += enc.scales(p.z).mean();
  return total / static_cast<double>(points.size());
}

EncoderTraining train_encoder(const ScaleEncoder& enc, const Classifier& clf, const OperatorDictionary& dict,
                              const std::vector<LatentPoint>& points, const EncoderConfig& cfg) {
  cfg.validate();
  if (points.empty()) throw Error(ErrorKind::InvalidArgument, "encoder training needs points");
  for (const auto& p : points) require_label(p, clf.classes());

  EncoderTraining result{enc, {}, {}};
  Vector params = enc.net().parameters();
  AdamState adam;
  const std::size_t n = points.size();
  const std::size_t batch = std::min<std::size_t>(static_cast<std::size_t>(cfg.batch_size), n);
  std::vector<std::size_t> order(n);
  std::uint64_t draw = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    CounterRng shuffle(derive_seed(cfg.seed, 0xE000 + static_cast<std::uint64_t>(epoch)));
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[shuffle.below(i)]);

    double epoch_loss = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t stop = std::min(n, start + batch);
      const double inv = 1.0 / static_cast<double>(stop - start);
      Vector grad = Vector::Zero(params.size());
      double batch_loss = 0.0;
      for (std::size_t i = start; i < stop; ++i) {
        const auto loss = encoder_loss(result.encoder, clf, dict, points[order[i]], cfg,
                                       derive_seed(cfg.seed, 0x100000 + draw++));
        grad += inv * loss.gradient;
        batch_loss += inv * loss.loss;
      }
      adam.step(params, grad, cfg.lr);
      result.encoder.net().set_parameters(params);
      epoch_loss += batch_loss;
      ++batches;
    }
    const double mean_loss = epoch_loss / static_cast<double>(batches);
    if (!std::isfinite(mean_loss) || !params.allFinite()) {
      throw Error(ErrorKind::Diverged, "encoder training produced a non-finite loss at epoch " +
                                           std::to_string(epoch));
    }
    result.loss_curve.push_back(mean_loss);
    result.mean_scale_curve.push_back(mean_scale(result.encoder, points));
  }
  return result;
}

Matrix spread_matrix(const ScaleEncoder& enc, const std::vector<LatentPoint>& points, int classes) {
  int inferred = 0;
  for (const auto& p : points) inferred = std::max(inferred, require_label(p, -1) + 1);
  if (classes < 0) classes = inferred;
  if (inferred > classes) {
    throw Error(ErrorKind::IndexOutOfRange, "label exceeds the requested class count");
  }
  Matrix sums = Matrix::Zero(classes, enc.count());
  std::vector<int> counts(static_cast<std::size_t>(classes), 0);
  for (const auto& p : points) {
    sums.row(*p.label) += enc.scales(p.z).transpose();
    ++counts[static_cast<std::size_t>(*p.label)];
  }
  for (int y = 0; y < classes; ++y) {
    if (counts[static_cast<std::size_t>(y)] == 0) {
      throw Error(ErrorKind::EmptyClass, "class " + std::to_string(y) + " has no points");
    }
    sums.row(y) /= static_cast<double>(counts[static_cast<std::size_t>(y)]);
  }
  return sums;
}

std::string spread_matrix_to_csv(const Matrix& spread) {
  std::ostringstream os;
  os << "class";
  for (Eigen::Index m = 0; m < spread.cols(); ++m) os << ",op_" << m;
  os << "\n";
  for (Eigen::Index y = 0; y < spread.rows(); ++y) {
    os << y;
    for (Eigen::Index m = 0; m < spread.cols(); ++m) os << "," << format_double(spread(y, m));
    os << "\n";
  }
  return os.str();
}

std::string classifier_to_json(const Classifier& clf) { return mlp_to_json(clf.net(), "classifier"); }
Classifier classifier_from_json(const std::string& text) {
  return Classifier(mlp_from_json(text, "classifier"));
}
std::string encoder_to_json(const ScaleEncoder& enc) { return mlp_to_json(enc.net(), "scale_encoder"); }
ScaleEncoder encoder_from_json(const std::string& text) {
  return ScaleEncoder(mlp_from_json(text, "scale_encoder"));
}

}  // namespace transop
