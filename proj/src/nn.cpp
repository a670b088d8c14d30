#include "dronesafe/nn.hpp"

#include <cmath>
#include <stdexcept>

namespace dronesafe {

Mlp::Mlp(std::vector<int> layer_sizes) : sizes_(std::move(layer_sizes)) {
  if (sizes_.size() < 2) throw std::invalid_argument("network needs at least an input and an output layer");
  Eigen::Index total = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    if (sizes_[l] <= 0 || sizes_[l + 1] <= 0) throw std::invalid_argument("layer sizes must be positive");
    offsets_.push_back(total);
    total += static_cast<Eigen::Index>(sizes_[l + 1]) * (sizes_[l] + 1);
  }
  params_ = Eigen::VectorXd::Zero(total);
}

void Mlp::init(Rng& rng, double output_scale) {
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    const int in = sizes_[l];
    const int out = sizes_[l + 1];
    double limit = std::sqrt(6.0 / (in + out));
    if (l + 2 == sizes_.size()) limit *= output_scale;
    std::uniform_real_distribution<double> u(-limit, limit);
    const Eigen::Index w = static_cast<Eigen::Index>(in) * out;
    for (Eigen::Index i = 0; i < w; ++i) params_[offsets_[l] + i] = u(rng);
    params_.segment(offsets_[l] + w, out).setZero();
  }
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x, Tape* tape) const {
  if (x.rows() != input_size()) throw std::invalid_argument("network input has the wrong size");
  if (tape) tape->activations.clear();
  Eigen::MatrixXd a = x;
  const std::size_t layers = sizes_.size() - 1;
  for (std::size_t l = 0; l < layers; ++l) {
    const int in = sizes_[l];
    const int out = sizes_[l + 1];
    Eigen::Map<const Eigen::MatrixXd> W(params_.data() + offsets_[l], out, in);
    Eigen::Map<const Eigen::VectorXd> b(params_.data() + offsets_[l] + static_cast<Eigen::Index>(out) * in, out);
    if (tape) tape->activations.push_back(a);
    Eigen::MatrixXd z = W * a;
    z.colwise() += b;
    a = l + 1 < layers ? Eigen::MatrixXd(z.array().tanh()) : z;
  }
  return a;
}

void Mlp::backward(const Tape& tape, const Eigen::MatrixXd& dout, Eigen::VectorXd& grad) const {
  if (grad.size() != params_.size()) throw std::invalid_argument("gradient has the wrong size");
  const std::size_t layers = sizes_.size() - 1;
  if (tape.activations.size() != layers) throw std::invalid_argument("tape does not match the network");
  Eigen::MatrixXd delta = dout;  // dL/dz of the current layer
  for (std::size_t l = layers; l-- > 0;) {
    const int in = sizes_[l];
    const int out = sizes_[l + 1];
    const Eigen::MatrixXd& a_in = tape.activations[l];
    Eigen::Map<const Eigen::MatrixXd> W(params_.data() + offsets_[l], out, in);
    Eigen::Map<Eigen::MatrixXd> gW(grad.data() + offsets_[l], out, in);
    Eigen::Map<Eigen::VectorXd> gb(grad.data() + offsets_[l] + static_cast<Eigen::Index>(out) * in, out);
    gW.noalias() += delta * a_in.transpose();
    gb += delta.rowwise().sum();
    if (l > 0) {
      Eigen::MatrixXd back = W.transpose() * delta;
      delta = back.array() * (1.0 - a_in.array().square());
    }
  }
}

}  // namespace dronesafe
