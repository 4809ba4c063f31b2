#include "projwass/potential.hpp"

#include <cmath>

namespace projwass {

namespace {

void validate_dims(const std::vector<std::size_t>& dims) {
  if (dims.size() < 2) throw ConfigError("network dims need an input and an output entry");
  for (auto d : dims) {
    if (d < 1) throw ConfigError("network dims must all be >= 1");
  }
  if (dims.back() != 1) throw ConfigError("network output dimension must be 1");
}

double activate(Activation a, double x) {
  return a == Activation::kRelu ? (x > 0.0 ? x : 0.0) : std::tanh(x);
}

// Derivative expressed through the post-activation value.
double activate_derivative(Activation a, double pre, double post) {
  if (a == Activation::kRelu) return pre > 0.0 ? 1.0 : 0.0;
  return 1.0 - post * post;
}

}  // namespace

std::string to_string(Activation activation) {
  return activation == Activation::kRelu ? "relu" : "tanh";
}

Activation activation_from_string(const std::string& name) {
  if (name == "relu") return Activation::kRelu;
  if (name == "tanh") return Activation::kTanh;
  throw ConfigError("unknown activation '" + name + "'");
}

PotentialNetwork::PotentialNetwork(std::vector<std::size_t> dims, Activation activation)
    : dims_(std::move(dims)), activation_(activation) {
  validate_dims(dims_);
  for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
    const auto in = static_cast<Eigen::Index>(dims_[l]);
    const auto out = static_cast<Eigen::Index>(dims_[l + 1]);
    weights_.emplace_back(Matrix::Zero(out, in));
    biases_.emplace_back(Vector::Zero(out));
    parameter_count_ += dims_[l] * dims_[l + 1] + dims_[l + 1];
  }
}

Vector PotentialNetwork::parameters() const {
  Vector theta(static_cast<Eigen::Index>(parameter_count_));
  Eigen::Index at = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    const Matrix& w = weights_[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) theta(at++) = w(r, c);
    }
    theta.segment(at, biases_[l].size()) = biases_[l];
    at += biases_[l].size();
  }
  return theta;
}

void PotentialNetwork::set_parameters(const Eigen::Ref<const Vector>& theta) {
  if (static_cast<std::size_t>(theta.size()) != parameter_count_) {
    throw DimensionError("parameter vector has wrong length");
  }
  Eigen::Index at = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Matrix& w = weights_[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = theta(at++);
    }
    biases_[l] = theta.segment(at, biases_[l].size());
    at += biases_[l].size();
  }
}

void PotentialNetwork::add_to_parameters(const Eigen::Ref<const Vector>& step) {
  set_parameters(parameters() + step);
}

double PotentialNetwork::forward(const Eigen::Ref<const Vector>& z) const {
  if (static_cast<std::size_t>(z.size()) != input_dim()) {
    throw DimensionError("network input has length " + std::to_string(z.size()) + ", expected " +
                         std::to_string(input_dim()));
  }
  Vector h = z;
  const std::size_t last = weights_.size() - 1;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Vector pre = weights_[l] * h + biases_[l];
    if (l < last) {
      for (Eigen::Index i = 0; i < pre.size(); ++i) pre(i) = activate(activation_, pre(i));
    }
    h = std::move(pre);
  }
  return h(0);
}

Vector PotentialNetwork::forward_batch(const Eigen::Ref<const RowMatrix>& z) const {
  if (static_cast<std::size_t>(z.cols()) != input_dim()) {
    throw DimensionError("network batch input has wrong column count");
  }
  // Columns are samples: H_{l+1} = act(W_l H_l + b_l 1^T).
  Matrix h = z.transpose();
  const std::size_t last = weights_.size() - 1;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Matrix pre = weights_[l] * h;
    pre.colwise() += biases_[l];
    if (l < last) pre = pre.unaryExpr([a = activation_](double x) { return activate(a, x); });
    h = std::move(pre);
  }
  return h.row(0).transpose();
}

GradientBundle PotentialNetwork::backward(const Eigen::Ref<const Vector>& z) const {
  if (static_cast<std::size_t>(z.size()) != input_dim()) {
    throw DimensionError("network input has wrong length");
  }
  const std::size_t layers = weights_.size();
  std::vector<Vector> inputs(layers);
  std::vector<Vector> pres(layers);
  Vector h = z;
  for (std::size_t l = 0; l < layers; ++l) {
    inputs[l] = h;
    pres[l] = weights_[l] * h + biases_[l];
    h = pres[l];
    if (l + 1 < layers) {
      for (Eigen::Index i = 0; i < h.size(); ++i) h(i) = activate(activation_, h(i));
    }
  }

  GradientBundle g;
  g.d_theta = Vector::Zero(static_cast<Eigen::Index>(parameter_count_));
  std::vector<Eigen::Index> offsets(layers);
  Eigen::Index at = 0;
  for (std::size_t l = 0; l < layers; ++l) {
    offsets[l] = at;
    at += weights_[l].size() + biases_[l].size();
  }

  // delta = d output / d pre-activation of layer l.
  Vector delta = Vector::Ones(1);
  for (std::size_t step = 0; step < layers; ++step) {
    const std::size_t l = layers - 1 - step;
    const Matrix& w = weights_[l];
    Eigen::Index pos = offsets[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) g.d_theta(pos++) = delta(r) * inputs[l](c);
    }
    g.d_theta.segment(pos, delta.size()) = delta;
    Vector upstream = w.transpose() * delta;
    if (l > 0) {
      for (Eigen::Index i = 0; i < upstream.size(); ++i) {
        upstream(i) *= activate_derivative(activation_, pres[l - 1](i), inputs[l](i));
      }
    }
    delta = std::move(upstream);
  }
  g.d_input = std::move(delta);
  return g;
}

PotentialNetwork init_network(const std::vector<std::size_t>& dims, Activation activation, RngSeed seed) {
  PotentialNetwork net(dims, activation);
  Rng rng(seed);
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    Matrix& w = net.weight(l);
    const double scale = 1.0 / std::sqrt(static_cast<double>(w.cols()));
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = scale * rng.normal();
    }
  }
  return net;
}

std::vector<std::size_t> default_network_dims(std::size_t k) { return {k, 32, 32, 1}; }

}  // namespace projwass
