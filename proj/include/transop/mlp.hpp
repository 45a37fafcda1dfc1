#pragma once

#include "transop/numerics.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace transop {

enum class Activation { Identity, Tanh, Softplus };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& name);

struct DenseLayer {
  Matrix weights;  // out x in
  Vector bias;
};

/// Fully connected network with one activation for hidden layers and one for
/// the output layer. Parameters flatten layer by layer as
/// [W_0 (column-major), b_0, W_1, b_1, ...].
class Mlp {
 public:
  struct Tape {
    std::vector<Vector> inputs;  // input to each layer
    std::vector<Vector> pre;     // pre-activation of each layer
  };

  Mlp() = default;
  Mlp(std::vector<DenseLayer> layers, Activation hidden, Activation output);

  /// Glorot-normal weights, zero biases. widths = {in, hidden..., out}.
  static Mlp random(const std::vector<int>& widths, Activation hidden, Activation output,
                    std::uint64_t seed);

  int input_dim() const;
  int output_dim() const;
  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::vector<DenseLayer>& layers() { return layers_; }
  Activation hidden_activation() const { return hidden_; }
  Activation output_activation() const { return output_; }

  Vector forward(const Vector& x) const;
  Vector forward(const Vector& x, Tape& tape) const;

  /// Gradient of a scalar loss with respect to the flat parameters, given the
  /// loss gradient at the network output. Writes dL/dx when `grad_input` is set.
  Vector backward(const Tape& tape, const Vector& grad_output, Vector* grad_input = nullptr) const;

  Eigen::Index parameter_count() const;
  Vector parameters() const;
  void set_parameters(const Vector& flat);

 private:
  std::vector<DenseLayer> layers_;
  Activation hidden_ = Activation::Tanh;
  Activation output_ = Activation::Identity;
};

/// Adam on a flat parameter vector.
struct AdamState {
  Vector m;
  Vector v;
  long long t = 0;

  void step(Vector& params, const Vector& grad, double lr, double beta1 = 0.9, double beta2 = 0.999,
            double eps = 1e-8);
};

double softplus(double x);
double sigmoid(double x);

/// {"kind", "hidden_activation", "output_activation", "layers": [{"in", "out",
/// "weights" (row-major), "bias"}]}. Loading checks "kind".
std::string mlp_to_json(const Mlp& net, const std::string& kind);
Mlp mlp_from_json(const std::string& text, const std::string& expected_kind);

}  // namespace transop
