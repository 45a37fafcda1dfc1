#include "transop/mlp.hpp"

#include "transop/errors.hpp"
#include "transop/rng.hpp"

#include <json.hpp>

#include <cmath>

namespace transop {

std::string to_string(Activation a) {
  switch (a) {
    case Activation::Identity: return "identity";
    case Activation::Tanh: return "tanh";
    case Activation::Softplus: return "softplus";
  }
  return "identity";
}

Activation activation_from_string(const std::string& name) {
  if (name == "identity") return Activation::Identity;
  if (name == "tanh") return Activation::Tanh;
  if (name == "softplus") return Activation::Softplus;
  throw Error(ErrorKind::Parse, "unknown activation '" + name + "'");
}

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

namespace {

double apply(Activation a, double x) {
  switch (a) {
    case Activation::Identity: return x;
    case Activation::Tanh: return std::tanh(x);
    case Activation::Softplus: return softplus(x);
  }
  return x;
}

double derivative(Activation a, double x) {
  switch (a) {
    case Activation::Identity: return 1.0;
    case Activation::Tanh: {
      const double t = std::tanh(x);
      return 1.0 - t * t;
    }
    case Activation::Softplus: return sigmoid(x);
  }
  return 1.0;
}

}  // namespace

Mlp::Mlp(std::vector<DenseLayer> layers, Activation hidden, Activation output)
    : layers_(std::move(layers)), hidden_(hidden), output_(output) {
  if (layers_.empty()) throw Error(ErrorKind::InvalidArgument, "network needs at least one layer");
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const auto& l = layers_[i];
    if (l.bias.size() != l.weights.rows()) {
      throw Error(ErrorKind::DimensionMismatch, "layer " + std::to_string(i) + " bias/weight mismatch");
    }
    if (i > 0 && l.weights.cols() != layers_[i - 1].weights.rows()) {
      throw Error(ErrorKind::DimensionMismatch, "layer " + std::to_string(i) + " input width mismatch");
    }
  }
}

Mlp Mlp::random(const std::vector<int>& widths, Activation hidden, Activation output,
                std::uint64_t seed) {
  if (widths.size() < 2) throw Error(ErrorKind::InvalidArgument, "network needs input and output widths");
  CounterRng rng(seed);
  std::vector<DenseLayer> layers;
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    const int in = widths[i];
    const int out = widths[i + 1];
    if (in < 1 || out < 1) throw Error(ErrorKind::InvalidArgument, "layer widths must be >= 1");
    const double sd = std::sqrt(2.0 / static_cast<double>(in + out));
    DenseLayer layer{Matrix(out, in), Vector::Zero(out)};
    for (int c = 0; c < in; ++c)
      for (int r = 0; r < out; ++r) layer.weights(r, c) = sd * rng.normal();
    layers.push_back(std::move(layer));
  }
  return Mlp(std::move(layers), hidden, output);
}

int Mlp::input_dim() const { return static_cast<int>(layers_.front().weights.cols()); }
int Mlp::output_dim() const { return static_cast<int>(layers_.back().weights.rows()); }

Vector Mlp::forward(const Vector& x) const {
  Tape tape;
  return forward(x, tape);
}

Vector Mlp::forward(const Vector& x, Tape& tape) const {
  if (x.size() != input_dim()) {
    throw Error(ErrorKind::DimensionMismatch, "network input has " + std::to_string(x.size()) +
                                                  " entries, expected " + std::to_string(input_dim()));
  }
  tape.inputs.clear();
  tape.pre.clear();
  Vector h = x;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    tape.inputs.push_back(h);
    Vector pre = layers_[i].weights * h + layers_[i].bias;
    const Activation act = i + 1 == layers_.size() ? output_ : hidden_;
    h = pre.unaryExpr([act](double v) { return apply(act, v); });
    tape.pre.push_back(std::move(pre));
  }
  return h;
}

Vector Mlp::backward(const Tape& tape, const Vector& grad_output, Vector* grad_input) const {
  Vector flat(parameter_count());
  // Offsets of each layer's block in the flat vector.
  std::vector<Eigen::Index> offset(layers_.size());
  Eigen::Index pos = 0;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    offset[i] = pos;
    pos += layers_[i].weights.size() + layers_[i].bias.size();
  }
  Vector delta = grad_output;
  for (std::size_t step = layers_.size(); step-- > 0;) {
    const Activation act = step + 1 == layers_.size() ? output_ : hidden_;
    const Vector& pre = tape.pre[step];
    for (Eigen::Index j = 0; j < delta.size(); ++j) delta(j) *= derivative(act, pre(j));
    const auto& layer = layers_[step];
    const Matrix gw = delta * tape.inputs[step].transpose();
    flat.segment(offset[step], gw.size()) = Eigen::Map<const Vector>(gw.data(), gw.size());
    flat.segment(offset[step] + gw.size(), delta.size()) = delta;
    delta = layer.weights.transpose() * delta;
  }
  if (grad_input) *grad_input = delta;
  return flat;
}

Eigen::Index Mlp::parameter_count() const {
  Eigen::Index n = 0;
  for (const auto& l : layers_) n += l.weights.size() + l.bias.size();
  return n;
}

Vector Mlp::parameters() const {
  Vector flat(parameter_count());
  Eigen::Index pos = 0;
  for (const auto& l : layers_) {
    flat.segment(pos, l.weights.size()) = Eigen::Map<const Vector>(l.weights.data(), l.weights.size());
    pos += l.weights.size();
    flat.segment(pos, l.bias.size()) = l.bias;
    pos += l.bias.size();
  }
  return flat;
}

void Mlp::set_parameters(const Vector& flat) {
  if (flat.size() != parameter_count()) {
    throw Error(ErrorKind::DimensionMismatch, "parameter vector has wrong length");
  }
  Eigen::Index pos = 0;
  for (auto& l : layers_) {
    l.weights = Eigen::Map<const Matrix>(flat.data() + pos, l.weights.rows(), l.weights.cols());
    pos += l.weights.size();
    l.bias = flat.segment(pos, l.bias.size());
    pos += l.bias.size();
  }
}

void AdamState::step(Vector& params, const Vector& grad, double lr, double beta1, double beta2,
                     double eps) {
  if (m.size() != params.size()) {
    m = Vector::Zero(params.size());
    v = Vector::Zero(params.size());
    t = 0;
  }
  ++t;
  m = beta1 * m + (1.0 - beta1) * grad;
  v = beta2 * v + (1.0 - beta2) * grad.cwiseProduct(grad);
  const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t));
  params.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
}

std::string mlp_to_json(const Mlp& net, const std::string& kind) {
  nlohmann::ordered_json j;
  j["kind"] = kind;
  j["hidden_activation"] = to_string(net.hidden_activation());
  j["output_activation"] = to_string(net.output_activation());
  auto layers = nlohmann::ordered_json::array();
  for (const auto& l : net.layers()) {
    nlohmann::ordered_json lj;
    lj["in"] = l.weights.cols();
    lj["out"] = l.weights.rows();
    auto w = nlohmann::ordered_json::array();
    for (Eigen::Index r = 0; r < l.weights.rows(); ++r)
      for (Eigen::Index c = 0; c < l.weights.cols(); ++c) w.push_back(l.weights(r, c));
    lj["weights"] = std::move(w);
    auto b = nlohmann::ordered_json::array();
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) b.push_back(l.bias(r));
    lj["bias"] = std::move(b);
    layers.push_back(std::move(lj));
  }
  j["layers"] = std::move(layers);
  return j.dump(2) + "\n";
}

Mlp mlp_from_json(const std::string& text, const std::string& expected_kind) {
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.at("kind").get<std::string>() != expected_kind) {
      throw Error(ErrorKind::Parse, "expected a " + expected_kind + " file, got " + j.at("kind").get<std::string>());
    }
    std::vector<DenseLayer> layers;
    for (const auto& lj : j.at("layers")) {
      const int in = lj.at("in").get<int>();
      const int out = lj.at("out").get<int>();
      const auto& w = lj.at("weights");
      const auto& b = lj.at("bias");
      if (in < 1 || out < 1 || static_cast<int>(w.size()) != in * out || static_cast<int>(b.size()) != out) {
        throw Error(ErrorKind::Parse, "layer shape metadata does not match weights");
      }
      DenseLayer layer{Matrix(out, in), Vector(out)};
      for (int r = 0; r < out; ++r) {
        for (int c = 0; c < in; ++c) layer.weights(r, c) = w[static_cast<std::size_t>(r * in + c)].get<double>();
        layer.bias(r) = b[static_cast<std::size_t>(r)].get<double>();
      }
      layers.push_back(std::move(layer));
    }
    return Mlp(std::move(layers), activation_from_string(j.at("hidden_activation").get<std::string>()),
               activation_from_string(j.at("output_activation").get<std::string>()));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, std::string(expected_kind) + " JSON: " + e.what());
  }
}

}  // namespace transop
