#pragma once

#include <vector>

#include <Eigen/Core>

#include "dronesafe/world.hpp"

namespace dronesafe {

// Dense feed-forward network: tanh hidden layers, linear output. Parameters
// live in one flat vector, layer by layer, each layer as W (out x in,
// column-major) followed by b.
class Mlp {
 public:
  Mlp() = default;
  explicit Mlp(std::vector<int> layer_sizes);

  const std::vector<int>& layer_sizes() const { return sizes_; }
  int input_size() const { return sizes_.front(); }
  int output_size() const { return sizes_.back(); }
  Eigen::Index parameter_count() const { return params_.size(); }
  Eigen::VectorXd& parameters() { return params_; }
  const Eigen::VectorXd& parameters() const { return params_; }

  // Glorot-uniform weights, zero biases; the last layer is scaled by
  // output_scale.
  void init(Rng& rng, double output_scale = 1.0);

  struct Tape {
    std::vector<Eigen::MatrixXd> activations;  // input, then each hidden layer
  };

  // Columns are samples.
  Eigen::MatrixXd forward(const Eigen::MatrixXd& x, Tape* tape = nullptr) const;
  // Adds the gradient of sum(dout .* output) with respect to the
  // parameters into grad.
  void backward(const Tape& tape, const Eigen::MatrixXd& dout, Eigen::VectorXd& grad) const;

 private:
  std::vector<int> sizes_;
  std::vector<Eigen::Index> offsets_;  // start of each layer's W
  Eigen::VectorXd params_;
};

}  // namespace dronesafe
