#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "projwass/core.hpp"

namespace projwass {

enum class Activation { kRelu, kTanh };

std::string to_string(Activation activation);
Activation activation_from_string(const std::string& name);

/// Partials of the scalar network output.
struct GradientBundle {
  Vector d_theta;  ///< w.r.t. the flat parameter vector (layer-major, W row-major then b)
  Vector d_input;  ///< w.r.t. the input z
};

/// Feed-forward network R^k -> R with hidden activations and a linear output
/// layer. Layer l maps dims[l] -> dims[l+1] via W_l (dims[l+1] x dims[l]) and
/// b_l. The ReLU subgradient at zero is 0.
class PotentialNetwork {
 public:
  PotentialNetwork(std::vector<std::size_t> dims, Activation activation);

  const std::vector<std::size_t>& dims() const noexcept { return dims_; }
  Activation activation() const noexcept { return activation_; }
  std::size_t input_dim() const noexcept { return dims_.front(); }
  std::size_t layer_count() const noexcept { return weights_.size(); }
  std::size_t parameter_count() const noexcept { return parameter_count_; }

  const Matrix& weight(std::size_t layer) const { return weights_.at(layer); }
  const Vector& bias(std::size_t layer) const { return biases_.at(layer); }
  Matrix& weight(std::size_t layer) { return weights_.at(layer); }
  Vector& bias(std::size_t layer) { return biases_.at(layer); }

  Vector parameters() const;
  void set_parameters(const Eigen::Ref<const Vector>& theta);
  /// theta <- theta + step
  void add_to_parameters(const Eigen::Ref<const Vector>& step);

  double forward(const Eigen::Ref<const Vector>& z) const;
  /// Row-wise forward pass over an N x k input matrix.
  Vector forward_batch(const Eigen::Ref<const RowMatrix>& z) const;
  GradientBundle backward(const Eigen::Ref<const Vector>& z) const;

 private:
  std::vector<std::size_t> dims_;
  Activation activation_;
  std::vector<Matrix> weights_;
  std::vector<Vector> biases_;
  std::size_t parameter_count_ = 0;
};

/// Weights ~ N(0, 1) / sqrt(fan_in), biases zero. Throws ConfigError when
/// dims has fewer than two entries, a zero entry, or does not end in 1.
PotentialNetwork init_network(const std::vector<std::size_t>& dims, Activation activation, RngSeed seed);

/// The default architecture [k, 32, 32, 1].
std::vector<std::size_t> default_network_dims(std::size_t k);

}  // namespace projwass
